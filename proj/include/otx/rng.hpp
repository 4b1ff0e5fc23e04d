#pragma once

#include <cstdint>
#include <initializer_list>

namespace otx::rng {

// Counter-based randomness: every draw is a pure function of (seed, counter),
// so results do not depend on how many draws happened elsewhere.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t counter) noexcept
{
    return splitmix64(seed ^ splitmix64(counter));
}

/// Uniform integer in [0, bound) via multiply-shift.
inline std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t counter, std::uint64_t bound) noexcept
{
    const unsigned __int128 wide = static_cast<unsigned __int128>(hash(seed, counter)) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

/// Child seed for a path of labels, e.g. derive(seed, {subcommand, cell, stream}).
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = splitmix64(seed);
    for (const auto label : path) s = hash(s, label);
    return s;
}

} // namespace otx::rng
