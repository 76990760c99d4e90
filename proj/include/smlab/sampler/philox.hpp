#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator.
 *
 * A pure function of (counter, key): any draw can be reproduced from its
 * coordinates without replaying a stream, which is what makes the path
 * matrix independent of how paths are distributed over threads.
 */
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key)
    {
        for (int r = 0; r < 10; ++r)
        {
            if (r > 0)
            {
                key[0] += W0;
                key[1] += W1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static Counter round(Counter const& c, Key const& k)
    {
        std::uint64_t p0 = std::uint64_t{M0} * c[0];
        std::uint64_t p1 = std::uint64_t{M1} * c[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

//! Stream purposes, kept in the last counter word.
enum class StreamPurpose : std::uint32_t
{
    increments = 0,
    initial = 1,
};

//! Double in (0, 1) from two 32-bit words, 52 bits of resolution.
inline double to_open_unit(std::uint32_t a, std::uint32_t b)
{
    std::uint64_t bits = (std::uint64_t{a >> 6} << 26) | (b >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1p-52;
}

//---------------------------------------------------------------------------//
/*!
 * Draws addressed by (seed, path, purpose, block).
 *
 * Each block yields four words: two uniforms, or one Box-Muller pair of
 * standard normals.
 */
class PathRandom
{
  public:
    PathRandom(std::uint64_t seed, std::uint64_t path, StreamPurpose purpose)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
        , path_(path)
        , purpose_(static_cast<std::uint32_t>(purpose))
    {
    }

    Philox4x32::Counter block(std::uint64_t index) const
    {
        Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(path_),
                                static_cast<std::uint32_t>(path_ >> 32),
                                purpose_ ^ (static_cast<std::uint32_t>(index >> 32) << 8)};
        return Philox4x32::generate(ctr, key_);
    }

    std::pair<double, double> uniforms(std::uint64_t index) const
    {
        auto w = this->block(index);
        return {to_open_unit(w[0], w[1]), to_open_unit(w[2], w[3])};
    }

    std::pair<double, double> normals(std::uint64_t index) const
    {
        auto [u1, u2] = this->uniforms(index);
        double r = std::sqrt(-2 * std::log(u1));
        double a = 2 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    Philox4x32::Key key_;
    std::uint64_t path_;
    std::uint32_t purpose_;
};

}  // namespace smlab
