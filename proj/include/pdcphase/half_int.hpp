#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pdcphase {

/// Exact half-integer spin label (j or m), stored as the doubled value so
/// that selection rules are integer arithmetic. j = 3/2 is HalfInt{3}.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int twice_value) : twice(twice_value) {}

    static constexpr HalfInt whole(int n) { return HalfInt{2 * n}; }

    constexpr double value() const { return 0.5 * static_cast<double>(twice); }
    constexpr bool is_whole() const { return twice % 2 == 0; }

    constexpr friend auto operator<=>(HalfInt, HalfInt) = default;
    constexpr HalfInt operator-() const { return HalfInt{-twice}; }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }
};

/// m and j pair validly only when they share parity and |m| <= j.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
    return (j.twice - m.twice) % 2 == 0 && std::abs(m.twice) <= j.twice;
}

inline std::string to_string(HalfInt h) {
    if (h.is_whole()) return std::to_string(h.twice / 2);
    return std::to_string(h.twice) + "/2";
}

/// Accepts "3", "-2", "3/2", "-1/2" and the decimal forms "1.5", "2.0".
HalfInt parse_half_int(const std::string& text);

}  // namespace pdcphase
