#include "lmqn/rng.hpp"

#include <cmath>
#include <numbers>

namespace lmqn {

namespace {
// murmur3-style finalizer
std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}
} // namespace

std::uint64_t NormalSampler::word(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1);
    z = mix(z) + 0xbf58476d1ce4e5b9ULL * (index + 1);
    return mix(z);
}

double NormalSampler::uniform01(std::uint64_t index) const {
    return (static_cast<double>(word(index) >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSampler::normal(std::uint64_t index) const {
    const double u1 = uniform01(2 * index);
    const double u2 = uniform01(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec NormalSampler::normal_vector(std::size_t n, std::uint64_t offset) const {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal(offset + i);
    return v;
}

} // namespace lmqn
