#pragma once

#include <cstdint>

#include "lmqn/vec.hpp"

namespace lmqn {

/// Counter-based Gaussian sampler: draw i of stream s is a pure function of
/// (seed, s, i), so generated instances do not depend on draw order and are
/// reproducible bit-for-bit for a fixed seed.
class NormalSampler {
public:
    NormalSampler(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Uniform in (0, 1), never exactly 0 or 1.
    double uniform01(std::uint64_t index) const;

    /// Standard normal via Box-Muller on two counter words.
    double normal(std::uint64_t index) const;

    Vec normal_vector(std::size_t n, std::uint64_t offset = 0) const;

private:
    std::uint64_t word(std::uint64_t index) const;

    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace lmqn
