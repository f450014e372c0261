#pragma once

#include <cstdint>

namespace ifsl {

// splitmix64, used to expand a master seed into stream seeds and xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2c62d02b3c5ULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Self-contained so trajectories are
// reproducible independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [-half_width, half_width].
    double next_symmetric(double half_width) {
        return (2.0 * next_double() - 1.0) * half_width;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Stream ids keep the map-choice, noise and replicate streams of one master
// seed decorrelated by fixed offsets.
enum class Stream : std::uint64_t {
    map_choice = 0x1000,
    observation_noise = 0x2000,
    replicate_base = 0x3000,
    mixing_base = 0x4000,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    std::uint64_t sm = master ^ (static_cast<std::uint64_t>(stream) + index * 0x9e3779b97f4a7c15ULL);
    return splitmix64(sm);
}

} // namespace ifsl
