#pragma once

// Reproducible complex Wiener increments.
//
// The generator is Philox4x32-10 (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC'11). It is counter based: block k of a stream is a pure
// function of (seed, k). Each increment consumes exactly one block, so copying a
// stream replays the identical realization from the copy point onward, and a
// stream can be repositioned to any step without replaying its history.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "qduffing/error.hpp"
#include "qduffing/params.hpp"

namespace qduffing {

using Complex = std::complex<double>;

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
inline PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo32(kM0, ctr[0], hi0, lo0);
        detail::mulhilo32(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// SplitMix64 finalizer. Used to derive independent seeds from (seed, index).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ull));
}

class NoiseStream {
public:
    NoiseStream() = default;
    explicit NoiseStream(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    /// A handle that replays exactly the increments this stream will produce next.
    NoiseStream fork() const { return *this; }

    /// Complex increment with independent real and imaginary parts, each N(0, dt/2),
    /// so that E[dxi] = 0, E[dxi^2] = 0 and E[|dxi|^2] = dt.
    Complex next_increment(double dt) {
        if (dt < 0.0) throw ConfigError("noise increment requested for negative dt");
        const auto [n1, n2] = next_gaussian_pair();
        const double s = std::sqrt(0.5 * dt);
        return {s * n1, s * n2};
    }

    /// Two independent standard normals (Box-Muller on one Philox block).
    std::array<double, 2> next_gaussian_pair() {
        const auto [u1, u2] = next_uniform_pair();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = kTwoPi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    /// Two uniforms on the open interval (0, 1) with 53-bit resolution.
    std::array<double, 2> next_uniform_pair() {
        const PhiloxBlock out = block(counter_++);
        const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        return {to_unit(a), to_unit(b)};
    }

    friend bool operator==(const NoiseStream&, const NoiseStream&) = default;

private:
    PhiloxBlock block(std::uint64_t index) const {
        const PhiloxBlock ctr = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u,
                                 0u};
        const PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
        return philox4x32(ctr, key);
    }

    static double to_unit(std::uint64_t bits) {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace qduffing
