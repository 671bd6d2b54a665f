#pragma once

#include <cstdint>

namespace bflow {

/// Counter-based SplitMix64 stream.
///
/// Draw i of a stream seeded with s is mix(s + (i + 1) * 0x9E3779B97F4A7C15)
/// where mix is the SplitMix64 finalizer. Uniform doubles take the top 53
/// bits; normals use the cosine branch of Box-Muller on two consecutive
/// uniforms (u1 mapped to (0, 1]). Nothing here depends on the standard
/// library's distributions, so the streams are portable across languages.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;

    /// Stream for sub-task `index` of a seeded job; independent of draw order
    /// in other sub-tasks.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept;

private:
    std::uint64_t state_;
};

}  // namespace bflow
