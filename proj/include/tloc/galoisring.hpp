#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tloc/rat.hpp"

namespace tloc {

// Element of a Galois ring, coefficients in the Teichmüller-generator basis.
struct GRElem {
    std::vector<int64_t> c;
    bool operator==(const GRElem& o) const { return c == o.c; }
    bool operator!=(const GRElem& o) const { return c != o.c; }
    bool operator<(const GRElem& o) const { return c < o.c; }
};

// GR(p^M, d) = Z/p^M [x] / (h(x)), h a monic degree-d lift of an irreducible
// polynomial over F_p chosen so that the class xi of x is a Teichmüller
// element generating mu_{p^d - 1}. Frobenius permutes Teichmüller exponents.
class GaloisRing {
public:
    GaloisRing(int64_t p, int M, int d);

    int64_t p() const { return p_; }
    int M() const { return M_; }
    int d() const { return d_; }
    int64_t pM() const { return pM_; }
    int64_t res_units() const { return q_ - 1; } // |residue field| - 1

    GRElem zero() const { return GRElem{std::vector<int64_t>(d_, 0)}; }
    GRElem one() const { return from_int(1); }
    GRElem from_int(int64_t n) const;
    GRElem xi() const { return teich_pow(1); }
    GRElem teich_pow(int64_t k) const; // xi^k, k mod (p^d - 1)

    GRElem add(const GRElem& a, const GRElem& b) const;
    GRElem sub(const GRElem& a, const GRElem& b) const;
    GRElem neg(const GRElem& a) const;
    GRElem mul(const GRElem& a, const GRElem& b) const;
    GRElem mul_int(const GRElem& a, int64_t n) const;
    GRElem pow(const GRElem& a, int64_t e) const;
    GRElem inv(const GRElem& a) const; // a must be a unit
    GRElem frob(const GRElem& a, int j = 1) const; // phi_p^j

    bool is_zero(const GRElem& a) const;
    bool is_unit(const GRElem& a) const { return vval(a) == 0; }
    int vval(const GRElem& a) const; // p-adic valuation, M if zero

    // Teichmüller lift of the residue of a (0 if residue 0)
    GRElem teichmuller(const GRElem& a) const;
    // exponent k with residue(a) = residue(xi^k); requires unit
    int64_t teich_index(const GRElem& a) const;
    // x = sum p^i [t_i]: returns the exponents (or -1 for digit 0)
    std::vector<int64_t> teich_digits(const GRElem& a) const;

    GRElem divide_exact(const GRElem& a, int64_t pk) const; // all coeffs divisible
    GRElem truncate(const GRElem& a, int k) const;          // reduce mod p^k

    // sum of phi^j(a) over j < d; lands in Z/p^M (asserted)
    int64_t trace_to_prime_ring(const GRElem& a) const;

    GRElem from_coeffs(const std::vector<int64_t>& v) const;

private:
    int64_t p_, pM_, q_;
    int M_, d_;
    std::vector<std::vector<int64_t>> red_;   // x^k in basis, k in [d, 2d-2]
    std::vector<GRElem> teich_;               // xi^k, k < q-1
    std::unordered_map<int64_t, int64_t> teich_idx_; // residue key -> exponent
    std::vector<std::vector<int64_t>> frob_mat_;     // column j = phi(xi^j)

    int64_t norm(int64_t v) const { return ((v % pM_) + pM_) % pM_; }
    int64_t residue_key(const GRElem& a) const;
    GRElem mul_raw(const GRElem& a, const GRElem& b) const;
};

} // namespace tloc
