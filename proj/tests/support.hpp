#pragma once

#include "tubal/random.hpp"
#include "tubal/t_algebra.hpp"
#include "tubal/tensor.hpp"

#include <algorithm>
#include <cstdint>

namespace tubal::testing {

inline Tensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    GaussianSource g(seed, Stream::probe);
    return g.tensor(n1, n2, n3);
}

// Random dims in [1, hi] for each mode.
inline Dims3 random_dims(std::uint64_t seed, Index hi) {
    CounterRng rng(seed, Stream::probe);
    auto pick = [&] { return static_cast<Index>(rng() % static_cast<std::uint64_t>(hi)) + 1; };
    const Index a = pick(), b = pick(), c = pick();
    return {a, b, c};
}

inline double rel_err(const Tensor3& got, const Tensor3& want) {
    return fro_norm(got - want) / std::max(fro_norm(want), 1e-300);
}

} // namespace tubal::testing
