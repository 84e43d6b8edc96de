// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_RNG_HPP
#define ISAC_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace isac {

/// Counter-based random stream (Philox2x64-10). Every output is a pure
/// function of (seed, stream, counter), so draws are reproducible no matter
/// how work is scheduled across threads: give each logical unit of work its
/// own stream id or counter window and the results cannot depend on timing.
class StreamRng {
  public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Raw 64-bit word for the current counter; advances the counter.
    std::uint64_t next_u64() { return philox(counter_++); }

    /// Uniform draw on (0, 1].
    double uniform() {
        // 53-bit mantissa, then flip [0,1) to (0,1] so log() is safe
        return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (consumes two counter slots).
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = var.
    std::complex<double> cgaussian(double var) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1) * var);
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Jump to an absolute counter position (for indexed parallel draws).
    void seek(std::uint64_t counter) { counter_ = counter; }

  private:
    static constexpr double two_pi = 6.283185307179586476925286766559;

    static void mulhilo(std::uint64_t a, std::uint64_t b,
                        std::uint64_t& hi, std::uint64_t& lo) {
        const unsigned __int128 p =
            static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    std::uint64_t philox(std::uint64_t counter) const {
        constexpr std::uint64_t mult = 0xD2B74407B1CE6E93ULL;
        constexpr std::uint64_t weyl = 0x9E3779B97F4A7C15ULL;
        std::uint64_t c0 = counter, c1 = stream_, key = seed_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi, lo;
            mulhilo(mult, c0, hi, lo);
            c0 = hi ^ key ^ c1;
            c1 = lo;
            key += weyl;
        }
        return c0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

/// Fixed stream ids; keeps independent random uses from colliding.
namespace rng_stream {
constexpr std::uint64_t symbols = 0x01;
constexpr std::uint64_t warden = 0x02;
constexpr std::uint64_t echo = 0x03;
constexpr std::uint64_t kl_mc = 0x04;
constexpr std::uint64_t willie_h0 = 0x05;
constexpr std::uint64_t willie_h1 = 0x06;
constexpr std::uint64_t ser = 0x07;
constexpr std::uint64_t scenario = 0x08;
constexpr std::uint64_t verify = 0x09;
}  // namespace rng_stream

}  // namespace isac

#endif
