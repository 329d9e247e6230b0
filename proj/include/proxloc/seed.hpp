#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace proxloc {

// splitmix64 finalizer. Used to derive independent RNG streams from a master
// seed without any cross-stream correlation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a, for hashing beacon ids into the seed path. std::hash is not stable
// across implementations; this is.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter scheme for seed splitting: fold each path component into the master
// seed through splitmix64. derive_seed(m, {a, b}) != derive_seed(m, {b, a}),
// and streams for different beacons/repetitions never depend on how many
// other streams exist.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t component : path) {
        s = splitmix64(s ^ splitmix64(component));
    }
    return s;
}

}  // namespace proxloc
