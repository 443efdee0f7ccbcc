#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace graphon {

// SplitMix64 finalizer; used as the mixing primitive of the counter RNG.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based generator: the k-th draw of stream (seed, stream) is a pure
// function of (seed, stream, k), so parallel consumers agree on every draw
// regardless of scheduling.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t counter = 0;

    CounterRng(std::uint64_t s, std::uint64_t str) : seed(s), stream(str) {}

    std::uint64_t next_u64() {
        std::uint64_t h = mix64(seed ^ 0x2545F4914F6CDD1DULL);
        h = mix64(h ^ stream);
        h = mix64(h ^ counter++);
        return h;
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Inverse-CDF draw from nonnegative weights (need not be normalized).
    Eigen::Index next_categorical(const Eigen::VectorXd& w) {
        double u = next_double() * w.sum();
        double acc = 0.0;
        Eigen::Index last_pos = 0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (w[i] <= 0.0) continue;
            last_pos = i;
            acc += w[i];
            if (u < acc) return i;
        }
        return last_pos;
    }
};

// Stream tags keep independent uses of the same user seed decorrelated.
namespace stream_tag {
inline constexpr std::uint64_t edge = 0x01ULL << 56;
inline constexpr std::uint64_t conditional = 0x02ULL << 56;
inline constexpr std::uint64_t importance = 0x03ULL << 56;
inline constexpr std::uint64_t anneal = 0x04ULL << 56;
inline constexpr std::uint64_t ascent = 0x05ULL << 56;
}  // namespace stream_tag

}  // namespace graphon
