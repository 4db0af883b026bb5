#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace harnack {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * The output block is a pure function of (key, counter), so independent
 * streams are obtained by giving each one a distinct counter prefix; no
 * generator state is shared between paths or threads.
 */
inline std::array<std::uint32_t, 4>
philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round)
    {
        std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// SplitMix64 finalizer; used to derive Philox keys from seeds.
inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//---------------------------------------------------------------------------//
/*!
 * Random stream identified by (seed, substream, stream).
 *
 * The key is derived from (seed, substream); the upper half of the 128-bit
 * counter holds the stream index and the lower half counts blocks. A path
 * that uses fewer than 2^64 blocks never overlaps another stream.
 */
class CounterStream
{
  public:
    CounterStream(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t substream = 0)
        : stream_(stream)
    {
        std::uint64_t k = splitmix64(seed ^ splitmix64(substream));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    std::uint64_t next_u64()
    {
        if (used_ == 2)
        {
            refill();
        }
        std::uint64_t hi = buffer_[2 * used_];
        std::uint64_t lo = buffer_[2 * used_ + 1];
        ++used_;
        return (hi << 32) | lo;
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double next_uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; the second variate is cached.
    double next_normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    void refill()
    {
        buffer_ = philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             static_cast<std::uint32_t>(stream_),
             static_cast<std::uint32_t>(stream_ >> 32)},
            key_);
        ++block_;
        used_ = 0;
    }

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace harnack
