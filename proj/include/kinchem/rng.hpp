// Counter-based random streams: every draw is a pure hash of
// (seed, stream id, step, counter), so particle updates are reproducible
// independent of evaluation order and thread count.
#pragma once

#include <cmath>
#include <cstdint>

namespace kinchem {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

struct CounterRng {
    std::uint64_t seed = 0;

    std::uint64_t bits(std::uint64_t stream, std::uint64_t step, std::uint64_t counter) const {
        std::uint64_t h = detail::splitmix64(seed ^ 0x243f6a8885a308d3ull);
        h = detail::splitmix64(h ^ (stream * 0x9e3779b97f4a7c15ull));
        h = detail::splitmix64(h ^ (step * 0xd1b54a32d192ed03ull));
        return detail::splitmix64(h ^ (counter * 0x8cb92ba72f3d8dd7ull));
    }

    // Uniform in [0,1).
    double u01(std::uint64_t stream, std::uint64_t step, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, step, counter) >> 11) * 0x1.0p-53;
    }

    // Exponential with unit rate, strictly positive.
    double exp1(std::uint64_t stream, std::uint64_t step, std::uint64_t counter) const {
        return -std::log1p(-u01(stream, step, counter));
    }
};

}  // namespace kinchem
