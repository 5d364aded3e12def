#ifndef ILLUMINATI_RANDOM_HPP
#define ILLUMINATI_RANDOM_HPP

#include <cstdint>

namespace illuminati {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based uniform draw in the open interval (0, 1), a pure function
/// of (seed, stream, index).
inline constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept
{
    const std::uint64_t bits = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace illuminati

#endif // ILLUMINATI_RANDOM_HPP
