#pragma once

#include <cmath>

namespace bpvec {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2& a, const Vec2& b) = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Sizes are carried in bits internally; config files speak MB/KB with
// binary prefixes (MB = 2^20 bytes, KB = 2^10 bytes).
inline constexpr double kBitsPerMb = 8.0 * 1024.0 * 1024.0;
inline constexpr double kBitsPerKb = 8.0 * 1024.0;

inline double mb_to_bits(double mb) { return mb * kBitsPerMb; }
inline double bits_to_mb(double bits) { return bits / kBitsPerMb; }

}  // namespace bpvec
