#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tloc/rat.hpp"
#include "tloc/rootu.hpp"

namespace tloc {

// Exact element of the cyclotomic field Q(zeta_N).
//
// Internally N = prod p_i^{a_i} and an element is a Q-linear combination of
// monomials zeta_{p_1^{a_1}}^{k_1} * ... * zeta_{p_r^{a_r}}^{k_r}, with each
// k_i restricted to the per-prime-power basis 0 <= k_i < (p_i - 1)*p_i^{a_i-1}.
// Out-of-basis exponents are rewritten through 1 + zeta_p + ... + zeta_p^{p-1} = 0,
// so equality is coefficient comparison. The conductor is shrunk by
// gcd-detection after every operation; rebase() re-raises it.
class Cyclo {
public:
    using Mono = std::vector<int64_t>;

    Cyclo() {}
    Cyclo(const Rat& r) { if (!r.is_zero()) coef_[{}] = r; }
    Cyclo(long n) : Cyclo(Rat(n)) {}

    static Cyclo zeta(int64_t N, int64_t k = 1);
    static Cyclo from_rootu(const RootU& r) { return zeta(r.den, r.num); }
    // positive square root of a prime p, via the quadratic Gauss sum
    static Cyclo sqrt_prime(int64_t p);
    // q^{h/2} for q = p^{f0}, h any integer (possibly negative)
    static Cyclo half_power(int64_t p, int64_t f0, int64_t h);

    int64_t conductor() const;

    Cyclo operator-() const;
    Cyclo operator+(const Cyclo& o) const;
    Cyclo operator-(const Cyclo& o) const { return *this + (-o); }
    Cyclo operator*(const Cyclo& o) const;
    Cyclo operator*(const Rat& r) const;
    Cyclo& operator+=(const Cyclo& o) { *this = *this + o; return *this; }
    Cyclo& operator*=(const Cyclo& o) { *this = *this * o; return *this; }

    bool operator==(const Cyclo& o) const {
        return fac_ == o.fac_ && coef_ == o.coef_;
    }
    bool operator!=(const Cyclo& o) const { return !(*this == o); }

    Cyclo conj() const;
    Cyclo abs_square() const { return *this * conj(); }
    // inverse via conjugate; requires abs_square() rational (true for all
    // epsilon-like values handled here)
    Cyclo inv() const;
    Cyclo pow(long k) const;

    // raise the conductor to M (value unchanged); M must be a multiple
    Cyclo rebase(int64_t M) const;

    bool is_zero() const { return coef_.empty(); }
    bool is_rational() const { return fac_.empty(); }
    Rat rat_value() const;       // requires is_rational()
    bool is_real() const { return *this == conj(); }

    std::complex<double> as_float() const;
    std::string str() const;     // exact rendering
    std::string str_float() const; // 12 significant digits

private:
    // factorization of the current conductor, sorted by prime
    std::vector<std::pair<int64_t, int>> fac_;
    std::map<Mono, Rat> coef_;

    void reduce_into(const Mono& m, const Rat& r);
    void shrink();
    static std::vector<std::pair<int64_t, int>> factorize(int64_t N);
    friend struct CycloBuilder;
};

inline Cyclo operator*(const Rat& r, const Cyclo& z) { return z * r; }

// Accumulates many roots of unity then reduces once; the fast path for
// Gauss sums.
struct CycloBuilder {
    void add(const RootU& r, const Rat& scale = Rat(1));
    void add(const Cyclo& z, const Rat& scale = Rat(1));
    Cyclo take();

private:
    std::map<std::pair<int64_t, int64_t>, Rat> raw_; // (den, num) -> coeff
    std::vector<Cyclo> general_;
};

} // namespace tloc
