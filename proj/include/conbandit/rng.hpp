#pragma once

#include <cstdint>
#include <string_view>

namespace conbandit {

// splitmix64 step finalizer; bijective full-avalanche 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive combination of two words; bijective in b for fixed a.
constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(splitmix64(a) ^ b);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential splitmix64 stream. Deterministic across platforms (unlike the
// standard-library distributions) and cheap to seed, so every (policy, run)
// pair gets its own stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() noexcept { return to_unit(next_u64()); }

private:
    std::uint64_t state_;
};

// Counter-based reward randomness: the draw for (round, arm, level) is a pure
// function of its coordinates, so policies replayed against the same
// (base, run) pair see identical reward realizations.
struct RewardStream {
    std::uint64_t base = 0;
    std::uint64_t run = 0;

    double uniform(std::uint64_t round, std::uint64_t arm, std::uint64_t level) const noexcept {
        std::uint64_t h = splitmix64(splitmix64(base) ^ run);
        h = splitmix64(h ^ round);
        h = splitmix64(h ^ (arm * 2 + level));
        return to_unit(h);
    }
};

} // namespace conbandit
