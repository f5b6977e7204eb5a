#include "tubal/random.hpp"

namespace tubal {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream)
    : key_(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream)))) {}

CounterRng::result_type CounterRng::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

// FNV-1a.
std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix64(base + kGolden);
    for (std::uint64_t p : parts) h = mix64(h ^ (mix64(p) + kGolden + (h << 6) + (h >> 2)));
    return h;
}

Tensor3 GaussianSource::tensor(Index n1, Index n2, Index n3) {
    Tensor3 t(n1, n2, n3);
    for (double& v : t.data()) v = (*this)();
    return t;
}

} // namespace tubal
