#ifndef DUALTEACH_RNG_HPP
#define DUALTEACH_RNG_HPP

#include <cstdint>
#include <random>

namespace dualteach {

// splitmix64; used to derive independent sub-seeds from one master seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t sub) {
    return mix64(derive_seed(master, stream) ^ mix64(sub + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

}  // namespace dualteach

#endif
