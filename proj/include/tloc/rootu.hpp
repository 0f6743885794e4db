#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "tloc/rat.hpp"

namespace tloc {

// Exact root of unity e^{2*pi*i*num/den}, kept reduced with 0 <= num < den.
// The cheap value type for character tables; promoted to Cyclo only when
// roots of unity get summed.
struct RootU {
    int64_t num = 0;
    int64_t den = 1;

    RootU() = default;
    RootU(int64_t n, int64_t d) : num(n), den(d) { reduce(); }

    static RootU one() { return RootU(0, 1); }
    static RootU minus_one() { return RootU(1, 2); }

    void reduce() {
        if (den < 0) { den = -den; num = -num; }
        num %= den;
        if (num < 0) num += den;
        int64_t g = gcd64(num, den);
        num /= g; den /= g;
    }

    RootU operator*(const RootU& o) const {
        int64_t d = lcm64(den, o.den);
        return RootU(num * (d / den) + o.num * (d / o.den), d);
    }
    RootU inv() const { return RootU(-num, den); }
    RootU conj() const { return inv(); }
    RootU pow(int64_t k) const {
        int64_t e = ((k % den) + den) % den;
        return RootU((__int128)num * e % den, den);
    }

    bool operator==(const RootU& o) const { return num == o.num && den == o.den; }
    bool operator!=(const RootU& o) const { return !(*this == o); }
    bool operator<(const RootU& o) const {
        return den != o.den ? den < o.den : num < o.num;
    }

    bool is_one() const { return num == 0; }
    bool is_real() const { return num == 0 || 2 * num == den; }
    // +1 or -1 for real roots
    int real_sign() const { return num == 0 ? 1 : -1; }

    // multiplicative order
    int64_t order() const { return den; }

    std::string str() const {
        if (num == 0) return "1";
        if (2 * num == den) return "-1";
        return "zeta(" + std::to_string(den) + ")^" + std::to_string(num);
    }
};

struct RootUHash {
    size_t operator()(const RootU& r) const {
        return std::hash<int64_t>()(r.num * 1000003 + r.den);
    }
};

} // namespace tloc
