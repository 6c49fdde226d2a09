// rng.hpp — counter-based splittable random numbers (Philox4x32-10).
//
// Every stochastic component draws from a Philox substream keyed by
// (seed, stream_id).  Substreams are statistically independent and a given
// substream yields the same sequence regardless of how many worker threads
// are running, which makes ensemble runs bit-reproducible.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qchaos {

/** Philox4x32-10 block cipher acting as a counter-based RNG.
 *
 * Key = (seed, stream_id) split into four 32-bit words; the 128-bit counter
 * advances once per generated block of four 32-bit outputs.  Verified against
 * the canonical known-answer vectors of the Random123 distribution.
 */
class PhiloxRng {
public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream_id) noexcept {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        key_extra_[0] = static_cast<std::uint32_t>(stream_id);
        key_extra_[1] = static_cast<std::uint32_t>(stream_id >> 32);
        counter_ = 0;
        have_ = 0;
    }

    // One 10-round block: counter (4x32) x key (2x32) -> 4x32 output.
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& ctr,
                                              const std::array<std::uint32_t, 2>& key) noexcept {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        std::array<std::uint32_t, 4> x = ctr;
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * x[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * x[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
            k0 += W0;
            k1 += W1;
        }
        return x;
    }

    std::uint32_t next_u32() noexcept {
        if (have_ == 0) {
            const std::array<std::uint32_t, 4> ctr = {
                static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                key_extra_[0], key_extra_[1]};
            buf_ = block(ctr, key_);
            ++counter_;
            have_ = 4;
        }
        return buf_[4 - have_--];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 2> key_extra_{};  // stream id, fills counter words 2..3
    std::array<std::uint32_t, 4> buf_{};
    std::uint64_t counter_ = 0;
    int have_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace qchaos
