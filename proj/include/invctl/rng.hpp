#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace invctl {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive combination of stream coordinates into one seed.
inline std::uint64_t mix_seed(std::uint64_t acc, std::uint64_t v) { return splitmix64(acc ^ splitmix64(v)); }

/// FNV-1a, used to turn policy names into stream tags.
inline std::uint64_t tag_of(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Random stream owned by one simulation run.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits; independent of the standard
    /// library's distribution implementations.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace invctl
