#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace tloc {

using Int = mpz_class;

// Reduced rational with positive denominator, backed by GMP.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(const Int& n) : v_(n) {}
    Rat(const Int& num, const Int& den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("Rat: zero denominator");
        v_.canonicalize();
    }
    Rat(long num, long den) : Rat(Int(num), Int(den)) {}

    const Int num() const { return v_.get_num(); }
    const Int den() const { return v_.get_den(); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
    Rat operator/(const Rat& o) const {
        if (o.v_ == 0) throw std::invalid_argument("Rat: division by zero");
        return Rat(mpq_class(v_ / o.v_));
    }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

    bool operator==(const Rat& o) const { return v_ == o.v_; }
    bool operator!=(const Rat& o) const { return v_ != o.v_; }
    bool operator<(const Rat& o) const { return v_ < o.v_; }
    bool operator>(const Rat& o) const { return v_ > o.v_; }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat pow(long k) const {
        if (k < 0) return Rat(1) / pow(-k);
        mpq_class r(1), b(v_);
        for (long i = 0; i < k; ++i) r *= b;
        return Rat(r);
    }

    long double to_ld() const {
        return (long double)v_.get_num().get_d() / (long double)v_.get_den().get_d();
    }

    std::string str() const {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

private:
    explicit Rat(const mpq_class& q) : v_(q) { }
    mpq_class v_;
};

inline Rat int_pow(long base, long k) { return Rat(base).pow(k); }

// base^k as an exact integer, k >= 0
inline Int ipow(const Int& base, long k) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), (unsigned long)k);
    return r;
}

inline int64_t i64pow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

inline int64_t gcd64(int64_t a, int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { int64_t t = a % b; a = b; b = t; }
    return a;
}

inline int64_t lcm64(int64_t a, int64_t b) { return a / gcd64(a, b) * b; }

// a^-1 mod m for gcd(a,m)=1
inline int64_t inv_mod(int64_t a, int64_t m) {
    int64_t t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
    while (nr != 0) {
        int64_t q = r / nr;
        int64_t tmp = t - q * nt; t = nt; nt = tmp;
        tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv_mod: not invertible");
    return ((t % m) + m) % m;
}

inline int64_t mod_pow(int64_t b, int64_t e, int64_t m) {
    int64_t r = 1 % m;
    b = ((b % m) + m) % m;
    while (e > 0) {
        if (e & 1) r = (__int128)r * b % m;
        b = (__int128)b * b % m;
        e >>= 1;
    }
    return r;
}

inline bool is_prime_small(int64_t n) {
    if (n < 2) return false;
    for (int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace tloc
