#pragma once

// Philox4x32-10 counter-based generator.  Every Monte Carlo stream is
// addressed by (seed, stream, substream), so results never depend on how
// samples are split across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace kpz {

using Philox4x32Block = std::array<std::uint32_t, 4>;

inline Philox4x32Block philox4x32_10(Philox4x32Block ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
               std::uint32_t(p0)};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// A single stream: key = seed, counter = (block, substream, stream lo, stream hi).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint32_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_lo_(std::uint32_t(stream)),
          stream_hi_(std::uint32_t(stream >> 32)),
          substream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform_pos() { return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by multiply-shift (bias below 2^-32 n).
    std::uint32_t below(std::uint32_t n) { return std::uint32_t((std::uint64_t((*this)()) * n) >> 32); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform_pos(), v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    void refill() {
        buf_ = philox4x32_10({block_++, substream_, stream_lo_, stream_hi_}, key_);
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_, substream_;
    std::uint32_t block_ = 0;
    Philox4x32Block buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace kpz
