#pragma once

#include "tubal/tensor.hpp"

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>

namespace tubal {

/// Independent random streams drawn from one seed.
enum class Stream : std::uint64_t {
    map = 0x6d6170,     // measurement matrix entries
    noise = 0x6e6f6973, // additive measurement noise
    data = 0x64617461,  // ground-truth factor tensors
    probe = 0x70726f62, // RIP probe tensors and prox perturbations
};

std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator: the n-th output is mix64(key + (n + 1) * golden),
/// with key = mix64(seed ^ mix64(stream)). Outputs depend only on (seed,
/// stream, n), so streams never overlap and any draw can be reproduced.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, Stream stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t hash_string(std::string_view s);

// Order-sensitive combination of seed components.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

/// Standard-normal sampler on top of a CounterRng.
class GaussianSource {
public:
    GaussianSource(std::uint64_t seed, Stream stream) : rng_(seed, stream) {}

    double operator()() { return dist_(rng_); }

    Tensor3 tensor(Index n1, Index n2, Index n3);

private:
    CounterRng rng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace tubal
