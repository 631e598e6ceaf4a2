#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

namespace qmx {

/// Space-time multi-index (alpha_0 = time order, alpha_1..3 = spatial orders).
struct MultiIndex {
    std::array<int, 4> a{0, 0, 0, 0};

    constexpr int operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
    constexpr int& operator[](int i) { return a[static_cast<std::size_t>(i)]; }

    constexpr int order() const { return a[0] + a[1] + a[2] + a[3]; }
    constexpr int time_order() const { return a[0]; }
    constexpr int space_order() const { return a[1] + a[2] + a[3]; }
    constexpr bool is_zero() const { return order() == 0; }

    static constexpr MultiIndex unit(int axis) {
        MultiIndex m;
        m[axis] = 1;
        return m;
    }
    static constexpr MultiIndex time(int p) { return MultiIndex{{p, 0, 0, 0}}; }

    constexpr MultiIndex operator+(const MultiIndex& o) const {
        return MultiIndex{{a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]}};
    }
    constexpr MultiIndex operator-(const MultiIndex& o) const {
        return MultiIndex{{a[0] - o.a[0], a[1] - o.a[1], a[2] - o.a[2], a[3] - o.a[3]}};
    }
    constexpr bool operator<=(const MultiIndex& o) const {
        return a[0] <= o.a[0] && a[1] <= o.a[1] && a[2] <= o.a[2] && a[3] <= o.a[3];
    }
    auto operator<=>(const MultiIndex&) const = default;

    std::string str() const {
        return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," +
               std::to_string(a[2]) + "," + std::to_string(a[3]) + ")";
    }
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

}  // namespace qmx
