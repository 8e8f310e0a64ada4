#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mfgcap {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the n-th draw of stream (seed, index) is
/// mix64(key + n * golden), with key derived from seed and index only, so a
/// path's numbers never depend on which thread or in what order it runs.
///
/// Normals use the Box-Muller transform (both outputs consumed in order).
/// This algorithm is part of the reproducibility contract; do not change it
/// without versioning golden outputs.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t index)
        : key_(mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mfgcap
