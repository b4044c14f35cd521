// Counter-based random number generation (Philox4x32-10).
//
// Every Gaussian draw is addressed by (master seed, stream, step, slot), so a
// path's noise is a pure function of those integers: paths can be simulated
// in any order, on any number of threads, and replayed bit-exactly.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "fcsl/errors.hpp"

namespace fcsl {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint64_t M0 = 0xD2511F53u;
    constexpr std::uint64_t M1 = 0xCD9E8D57u;
    const std::uint64_t p0 = M0 * c[0];
    const std::uint64_t p1 = M1 * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                  std::uint32_t key0, std::uint32_t key1) {
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key0, key1);
        key0 += W0;
        key1 += W1;
    }
    return counter;
}

// Map to the open interval (0,1); never returns 0 or 1, safe under log().
inline double to_open01(std::uint64_t u) {
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

// Stateless Gaussian stream for one path. `stream` is the path index within
// an ensemble; `step` and `slot` address the time step and noise mode.
class PathRng {
public:
    PathRng(std::uint64_t master_seed, std::uint64_t stream)
        : seed_(master_seed), stream_(stream) {}

    double uniform(std::uint64_t step, std::uint32_t slot) const {
        return detail::to_open01(words64(step, slot).first);
    }

    // Standard normal via Box-Muller on two independent 53-bit uniforms.
    double normal(std::uint64_t step, std::uint32_t slot) const {
        const auto [a, b] = words64(step, slot);
        const double u1 = detail::to_open01(a);
        const double u2 = detail::to_open01(b);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::pair<std::uint64_t, std::uint64_t> words64(std::uint64_t step, std::uint32_t slot) const {
        if (step >> 32)
            throw PreconditionError("PathRng: step index exceeds 2^32");
        const std::array<std::uint32_t, 4> counter = {
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32),
            static_cast<std::uint32_t>(step),
            slot,
        };
        const auto w = detail::philox4x32_10(counter, static_cast<std::uint32_t>(seed_),
                                             static_cast<std::uint32_t>(seed_ >> 32));
        return {(static_cast<std::uint64_t>(w[0]) << 32) | w[1],
                (static_cast<std::uint64_t>(w[2]) << 32) | w[3]};
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace fcsl
