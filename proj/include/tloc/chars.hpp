#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tloc/abelian.hpp"
#include "tloc/tower.hpp"

namespace tloc {

// the chi-data correction character c on U_{K/K+}; fixed compliant
// representative: trivial on principal units, quadratic on the Teichmüller
// part of the norm-one group
class CChar {
public:
    explicit CChar(const TowerModel& T);
    RootU eval(const OKElem& u) const; // u in U_{K/K+}
    RootU at_minus_one() const;
    // the closed-form value, used as the oracle in tests
    RootU expected_minus_one() const;

private:
    const TowerModel* T_;
    int mode_; // 0: trivial, 1: Legendre on mu-part, 2: order-2 on ker(N|mu)
    std::unordered_map<int64_t, int> parity_; // teich exponent -> parity
};

// Admissible characters theta of U_{K/K+} factoring through level er with the
// pinned restriction on U cap (1 + p^el).  Enumerated via the quotient
// Q = A/S and one base extension.
class ThetaFamily {
public:
    explicit ThetaFamily(const TowerModel& T);
    ThetaFamily(const ThetaFamily&) = delete;
    ThetaFamily& operator=(const ThetaFamily&) = delete;

    const TowerModel& model() const { return *T_; }
    int64_t count() const { return Q_.n(); }
    // |G_beta(F)| * q^{(l-1)n} from the closed form, for the count check
    int64_t expected_count() const;
    int64_t expected_S_size() const;
    int64_t S_size() const { return (int64_t)S_elems_.size(); }

    // the pinned character on S = U cap (1+p^el): theta0(1 + pi_F^l x) =
    // psi(pi_F^{-l'} T_{K/F}(x beta))
    RootU theta0(const OKElem& s) const;

    // theta with index k in the canonical (lexicographic) order
    struct Theta {
        std::vector<int64_t> chi; // exponents over the Q-basis
        int index = 0;
    };
    Theta theta(int64_t k) const;
    RootU eval(const Theta& th, const OKElem& u) const; // u in U_{K/K+}
    RootU theta_minus_one(const Theta& th) const;

    // vartheta-tilde(x) = c(x^{1-tau}) * theta(x^{1-tau}) for x in K^x
    RootU vartheta_tilde(const Theta& th, const OKElem& x) const;
    // with an extra Galois twist: x -> vartheta-tilde(gamma(x))
    RootU vartheta_tilde_twist(const Theta& th, const GammaElem& g, const OKElem& x) const;
    // vartheta_gamma(x) = vartheta-tilde(x^{1+gamma}) (gamma^2 != 1 pairs)
    RootU vartheta_gamma(const Theta& th, const GammaElem& g, const OKElem& x) const;

    const CChar& c() const { return c_; }
    const FinAbGroup& Q() const { return Q_; }
    const std::vector<OKElem>& S_elements() const { return S_elems_; }

private:
    const TowerModel* T_;
    CChar c_;
    int el_, er_;
    std::vector<OKElem> S_elems_;             // truncated at er
    std::vector<OKElem> Q_reps_;              // full-precision reps
    std::unordered_map<OKElem, int, OKElemHash> Q_key_; // truncate(.,el) -> idx
    FinAbGroup Q_;
    std::vector<RootU> base_on_basis_;        // theta*(b_i)
    int coset_index(const OKElem& u) const;
};

// conductor f(chi) of a unit character over subfield L: smallest k >= 0 with
// chi trivial on 1 + p_L^k (k=0 means trivial on all units)
int64_t unit_char_conductor(const TowerModel& T, const Subfield& L,
                            const std::function<RootU(const OKElem&)>& chi,
                            int depth_max);

// {sigma in Gamma : vartheta-tilde(x^sigma) = vartheta-tilde(x) for all
//  x in 1 + p_K^k}
std::vector<GammaElem> galois_twist_fixers(const TowerModel& T,
                                           const ThetaFamily& fam,
                                           const ThetaFamily::Theta& th,
                                           int k);

// norm residue symbol (x, L'/L) for a quadratic extension L'/L inside K;
// +1 iff x is a norm, by brute-force norm-subgroup enumeration
class QuadSymbol {
public:
    QuadSymbol(const TowerModel& T, const Subfield& L, const Subfield& Lp);
    int eval(const OKElem& x) const; // x in L^x (varpi_L-power times unit)
    int eval_split(int64_t v, const OKElem& unit) const;

private:
    const TowerModel* T_;
    Subfield L_, Lp_;
    int pi_class_ = 0; // bitmask of norm classes in (Z/2)^2
    std::function<std::pair<int64_t, OKElem>(const OKElem&)> split_;
    std::function<int(int64_t, const OKElem&)> cls_;
    void build();
};

} // namespace tloc
