#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tloc/chars.hpp"
#include "tloc/cyclo.hpp"
#include "tloc/tower.hpp"

namespace tloc {

// class of varpi^v * u in K^x / (<varpi^s> x (1+p^t)): v mod s, u a unit
struct KxElem {
    int64_t v = 0;
    OKElem u;
};

// Normalized 2-cocycle on Gamma with values in K^x/M classes.
class Cocycle {
public:
    enum class Kind { Trivial, CyclicFundamental, RandomValid };

    static Cocycle trivial(const TowerModel& T);
    // cyclic Gamma only: alpha(s^i, s^j) = a^{[i+j >= N]} with the class of a
    // generating F^x / N_{K/F}(K^x) (checked by norm-subgroup membership)
    static Cocycle cyclic_fundamental(const TowerModel& T);
    // coboundary of a seeded random 1-cochain, optionally times an inflated
    // class from the unramified cyclic quotient
    static Cocycle random_valid(const TowerModel& T, uint64_t seed);

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    const KxElem& at(const GammaElem& s, const GammaElem& t) const;
    // cocycle identity on Gamma^3, normalization, and alpha(s,s)^s = alpha(s,s)
    void verify() const;

private:
    Cocycle(const TowerModel& T, Kind k) : T_(&T), kind_(k) {}
    const TowerModel* T_;
    Kind kind_;
    std::map<std::pair<GammaElem, GammaElem>, KxElem> tab_;
    friend class WeilQuotient;
};

// Character of K^x/M recorded by its values on the fixed generator list
struct KCharKey {
    RootU on_pi;
    std::vector<RootU> on_units;
    bool operator==(const KCharKey& o) const {
        return on_pi == o.on_pi && on_units == o.on_units;
    }
    bool operator<(const KCharKey& o) const {
        if (!(on_pi == o.on_pi)) return on_pi < o.on_pi;
        return on_units < o.on_units;
    }
    KCharKey mul(const KCharKey& o) const {
        KCharKey r;
        r.on_pi = on_pi * o.on_pi;
        r.on_units.resize(on_units.size());
        for (size_t i = 0; i < on_units.size(); ++i)
            r.on_units[i] = on_units[i] * o.on_units[i];
        return r;
    }
    bool is_trivial() const {
        if (!on_pi.is_one()) return false;
        for (auto& v : on_units)
            if (!v.is_one()) return false;
        return true;
    }
};

// Class function on G = Gamma x_alpha (K^x/M) supported on sigma^2 = 1,
// stored per sigma as a merged linear combination of characters of K^x/M.
// Each kept character also records one defining monomial (a product of
// Galois twists fed to vartheta-tilde) for direct evaluation.
class ClassFunc {
public:
    struct Term {
        Cyclo coeff;
        std::vector<GammaElem> mono; // psi(x) = prod_j vartheta-tilde(g_j(x))
    };
    std::map<GammaElem, std::map<KCharKey, Term>> terms;

    void add(const GammaElem& s, const KCharKey& k, const Cyclo& c,
             const std::vector<GammaElem>& mono);
    ClassFunc plus(const ClassFunc& o) const;
    void prune();
    bool equal(const ClassFunc& o) const;
    std::string describe_mismatch(const ClassFunc& o) const;
    Cyclo degree() const;
};

// Finite Weil-group quotient with the monomial-character calculus for one
// admissible theta and one cocycle.
class WeilQuotient {
public:
    WeilQuotient(const TowerModel& T, const ThetaFamily& fam,
                 const ThetaFamily::Theta& th, const Cocycle& al);
    WeilQuotient(const WeilQuotient&) = delete;

    const TowerModel& model() const { return *T_; }
    int64_t s_ord() const { return s_; }
    int t_depth() const { return t_; }
    const Cocycle& cocycle() const { return al_; }
    int64_t kx_size() const; // |K^x / M|

    // K^x/M class arithmetic
    KxElem kx_one() const { return {0, T_->truncate(T_->one(), t_ * (int)T_->params().e)}; }
    KxElem kx_mul(const KxElem& a, const KxElem& b) const;
    KxElem kx_inv(const KxElem& a) const;
    KxElem kx_of(const OKElem& x) const; // split a ring element
    KxElem kx_apply(const GammaElem& g, const KxElem& x) const;
    KxElem kx_twist(const GammaElem& g, const KxElem& x) const; // x^g = g^{-1}(x)
    RootU vt_of(const KxElem& x) const;  // vartheta-tilde on the class

    // full group element and law
    struct GElem {
        GammaElem s;
        KxElem x;
    };
    GElem gmul(const GElem& a, const GElem& b) const;
    GElem gsquare(const GElem& a) const { return gmul(a, a); }

    // characters of the wedge-square decomposition pieces
    ClassFunc ind_vartheta() const;
    ClassFunc wedge_square(const ClassFunc& phi1) const;
    ClassFunc reg_minus_tau() const;
    ClassFunc ind_vartheta_gamma(const GammaElem& g) const;
    ClassFunc ind_chi_gamma(const GammaElem& g) const;
    ClassFunc adjoint() const;
    // two-step induction through the index-two-over-K^x subgroup generated
    // by the involution g (for the transitivity property test)
    ClassFunc induce_through(const GammaElem& g, const ClassFunc& inner) const;
    ClassFunc ind_to_quadratic(const GammaElem& g) const; // Ind_{K^x}^{W_{K/K_g}} vt

    struct DecompositionReport {
        bool equal = true;
        std::string mismatch;
    };
    DecompositionReport verify_wedge_decomposition() const;

    Cyclo inner_product(const ClassFunc& a, const ClassFunc& b) const;

    struct Nu {
        std::vector<RootU> on_gamma; // by Gamma enumeration order
        RootU on_pi = RootU::one();
        int unit_parity = 0; // 0: trivial on units; 1: Teichmüller-parity sign
    };
    struct FSResult {
        bool no_form = false;
        Cyclo value;
    };
    FSResult fs_indicator(const Nu& nu) const;

    struct LFactor {
        std::vector<Rat> poly; // det(1 - T Frob | V^{I_F}) coefficients
        int dim_fixed = 0;
        std::string str() const;
    };
    LFactor l_factor_adjoint() const;
    Rat artin_conductor_filtration() const;

    // ---- enumerated reference (feasible for small t) ----------------------
    bool enumerable(int64_t limit = 500000) const;
    struct EnumReport {
        bool equal = true;
        int64_t checked = 0;
        std::string mismatch;
    };
    EnumReport verify_wedge_decomposition_enumerated(bool parallel) const;
    Cyclo inner_product_enumerated(const ClassFunc& a, const ClassFunc& b) const;
    Cyclo eval_classfunc(const ClassFunc& F, const GElem& g) const;
    size_t unit_gens_count() const { return unit_gens_.size(); }

private:
    const TowerModel* T_;
    const ThetaFamily* fam_;
    ThetaFamily::Theta th_;
    Cocycle al_;
    int64_t s_;
    int t_;
    int trunc_; // t * e, truncation in varpi digits
    std::vector<OKElem> unit_gens_;
    std::vector<int> gen_depth_;
    std::vector<OKElem> cgam_; // unit part of g(varpi)/varpi per Gamma index
    std::vector<GammaElem> gamma_elems_;
    int gamma_index(const GammaElem& g) const;

    KCharKey key_of_mono(const std::vector<GammaElem>& mono) const;
    RootU mono_value(const std::vector<GammaElem>& mono, const KxElem& x) const;
    KxElem kx_of_raw_helper(const KxElem& raw) const;
};

} // namespace tloc
