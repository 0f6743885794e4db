#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tloc/errors.hpp"
#include "tloc/galoisring.hpp"
#include "tloc/metacyclic.hpp"
#include "tloc/rootu.hpp"

namespace tloc {

enum class TauKind { TotallyRamified, UnramifiedOverKPlus };

struct TowerParams {
    int64_t p = 3;
    int f0 = 1;        // F/Q_p unramified of degree f0, q = p^f0
    int64_t e = 2, f = 1, m = 0;
    int r = 4;
    TauKind tau_kind = TauKind::TotallyRamified;

    int64_t q() const { return i64pow(p, f0); }
    int64_t qf() const { return i64pow(p, f0 * (int)f); } // residue size of K
    int64_t n() const { return e * f / 2; }
    int l() const { return (r + 1) / 2; }
    int lp() const { return r / 2; }
    bool totally_ramified() const { return tau_kind == TauKind::TotallyRamified; }
    int64_t e_plus() const { return totally_ramified() ? e / 2 : e; }
    int64_t f_plus() const { return totally_ramified() ? f : f / 2; }
    bool supercuspidal_certified() const {
        return lp() >= std::max<int64_t>(2, 2 * (e - 1));
    }
    void validate() const;
    std::string canonical_key(int precision) const;
};

// Element of O_K / p^Mp = O_K / varpi^{e*Mp}: coefficients over the
// unramified part, x = sum c_i varpi^i, i < e, with varpi^e = p*omega.
struct OKElem {
    std::vector<GRElem> c;
    bool operator==(const OKElem& o) const { return c == o.c; }
    bool operator!=(const OKElem& o) const { return c != o.c; }
};

struct OKElemHash {
    size_t operator()(const OKElem& x) const {
        size_t h = 1469598103934665603ull;
        for (auto& g : x.c)
            for (auto v : g.c) {
                h ^= (size_t)v;
                h *= 1099511628211ull;
            }
        return h;
    }
};

// Galois automorphism in the model: x -> sum phi^{frob}(c_i) * (xi^{uexp})^i varpi^i
struct TowerAuto {
    int64_t uexp = 0; // Teichmüller exponent of gamma(varpi)/varpi
    int frob = 0;     // power of the absolute Frobenius phi_p on the K0 part
};

struct Subfield {
    std::string name;
    std::vector<GammaElem> gal;  // Gal(K/L)
    int64_t e_KL = 1, f_KL = 1, e_LF = 1, f_LF = 1;
    OKElem pi;                   // a uniformizer of L, v_K(pi) = e_KL
    int64_t d_abs = 0;           // d(L/Q_p) = e_LF - 1 (tame, d(F) = 0)
    int64_t q_L = 0;             // residue field size of L
};

class TowerModel {
public:
    // precision = number of varpi-digits carried; must be >= e*(r+1)
    static TowerModel realize(const TowerParams& par, int precision = -1);

    const TowerParams& params() const { return par_; }
    const GaloisRing& R() const { return R_; }
    const MetacyclicGroup& gamma() const { return G_; }
    const GammaElem& tau() const { return tau_; }
    int Mp() const { return Mp_; }
    int Nw() const { return (int)par_.e * Mp_; }
    int64_t omega_exp() const { return omega_exp_; }
    const OKElem& beta() const { return beta_; }

    // --- ring operations -------------------------------------------------
    OKElem zero() const;
    OKElem one() const;
    OKElem from_int(int64_t v) const;
    OKElem from_gr(const GRElem& g) const; // K0-part element
    OKElem pi() const;                     // varpi
    OKElem teich(int64_t k) const;         // xi^k as element of O_K
    OKElem add(const OKElem& a, const OKElem& b) const;
    OKElem sub(const OKElem& a, const OKElem& b) const;
    OKElem neg(const OKElem& a) const;
    OKElem mul(const OKElem& a, const OKElem& b) const;
    OKElem pow(const OKElem& a, int64_t k) const; // k < 0 needs a unit
    OKElem unit_inv(const OKElem& a) const;
    bool is_zero(const OKElem& a) const;
    int val(const OKElem& a) const; // varpi-adic valuation, Nw() if zero
    OKElem truncate(const OKElem& a, int k) const; // mod varpi^k
    OKElem div_pi_exact(const OKElem& a, int k) const;
    OKElem teich_part(const OKElem& a) const;      // unit's Teichmüller component
    int64_t teich_exp(const OKElem& a) const;      // its exponent
    bool is_unit(const OKElem& a) const { return val(a) == 0; }

    // --- Galois ----------------------------------------------------------
    OKElem apply(const GammaElem& g, const OKElem& x) const;
    TowerAuto realize_auto(const GammaElem& g) const;
    OKElem apply_auto(const TowerAuto& A, const OKElem& x) const;
    // x^{1-tau} = x * tau(x)^{-1}, x a unit (or varpi-power times unit)
    OKElem one_minus_tau(const OKElem& x) const;
    OKElem trace_subgroup(const std::vector<GammaElem>& S, const OKElem& x) const;
    OKElem norm_subgroup(const std::vector<GammaElem>& S, const OKElem& x) const;
    // trace/norm from K down to the fixed field of S, then viewed in K
    std::vector<GammaElem> coset_reps(const std::vector<GammaElem>& S) const;

    // --- subfields ---------------------------------------------------------
    // tags: F, K0, K+, E, E0, Kgamma (gamma given explicitly)
    Subfield subfield(const std::string& tag,
                      std::optional<GammaElem> gamma_opt = std::nullopt) const;
    // fixed field of the subgroup generated by gens
    Subfield subfield_custom(const std::string& name,
                             const std::vector<GammaElem>& gens) const;
    // additive character: psi(p^{-j} x) for x in O_K, psi = psi_F o T_{K/F}
    RootU psi_frac(const OKElem& x, int j) const;
    // same for an element already in the subfield L (trace from K would
    // multiply by [K:L]); traces L -> Q_p directly
    RootU psi_frac_subfield(const Subfield& L, const OKElem& x, int j) const;

    // enumerate (O_L/p_L^j)^* as truncated OKElems (small j only)
    std::vector<OKElem> subfield_units(const Subfield& L, int j) const;
    // Teichmüller elements of mu intersect L (as exponents k of xi^k)
    std::vector<int64_t> subfield_teich_exps(const Subfield& L) const;
    // additive Teichmüller basis of the residue field of L (exponents)
    std::vector<int64_t> subfield_res_basis(const Subfield& L) const;

    std::string canonical_key() const { return par_.canonical_key(Nw()); }

private:
    TowerModel(const TowerParams& par, int Mp)
        : par_(par), Mp_(Mp), R_(par.p, Mp, par.f0 * (int)par.f),
          G_(par.e, par.f, par.q(), par.m) {}

    TowerParams par_;
    int Mp_;
    GaloisRing R_;
    MetacyclicGroup G_;
    GammaElem tau_;
    int64_t omega_exp_ = 0;
    GRElem omega_;
    TowerAuto aut_delta_, aut_rho_;
    OKElem beta_;
    int64_t zeta_e_exp_ = 0;

    void find_beta();
    friend struct TowerTestAccess;
};

} // namespace tloc
