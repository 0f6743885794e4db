#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tloc/cyclo.hpp"
#include "tloc/weilrep.hpp"

namespace tloc {

// abelian character of L^x: unit-part evaluator plus the value at L.pi
struct LChar {
    std::function<RootU(const OKElem&)> on_units;
    RootU on_pi = RootU::one();
    int64_t cond = -1; // conductor; computed when < 0
    // value at a general x = pi_L^v * u
    RootU eval(const TowerModel& T, const Subfield& L, const OKElem& x) const;
};

struct LPolynomial {
    std::vector<Rat> coef; // P(T) with P(0) = 1
    Rat at(const Rat& t) const {
        Rat v(0), p(1);
        for (auto& c : coef) {
            v += c * p;
            p *= t;
        }
        return v;
    }
    std::string str() const;
    bool operator==(const LPolynomial& o) const { return coef == o.coef; }
};

class FactorEngine {
public:
    explicit FactorEngine(const TowerModel& T) : T_(&T) {}

    // normalized Gauss sum G_{psi_L}(chi^{-1}, c) with c = c_unit * pi_L^{-k};
    // requires k = d(L) + f(chi) (WrongValuation otherwise); |G| = 1
    Cyclo gauss_sum(const Subfield& L, const LChar& chi, const OKElem& c_unit,
                    int64_t k, bool force_direct = false) const;

    // Tate's epsilon factor over L with the self-dual measure for psi_L
    Cyclo epsilon_abelian(const Subfield& L, const LChar& chi) const;
    // epsilon(chi, (psi_L)_a, r*dx) for a = pi_L^{va} * ua
    Cyclo epsilon_abelian_scaled(const Subfield& L, const LChar& chi,
                                 int64_t va, const OKElem& ua,
                                 const Rat& measure_scale) const;

    int64_t conductor(const Subfield& L, const LChar& chi) const;

    // lambda factors of L/F (d(F) = 0 throughout)
    Cyclo lambda_closed(const Subfield& L) const;
    // closed form for towers containing an unramified quadratic step
    Cyclo lambda_unram_quadratic(const Subfield& L) const;
    // product of abelian epsilons over the character group of Gal(L/B)
    Cyclo lambda_inductive(const Subfield& L, const Subfield& B) const;
    // chain rule via the maximal unramified subextension
    Cyclo lambda_chain(const Subfield& L) const;

    // vartheta-tilde and friends as LChars over K (or over K_gamma)
    LChar vartheta_char(const ThetaFamily& fam, const ThetaFamily::Theta& th) const;
    LChar vartheta_gamma_char(const ThetaFamily& fam, const ThetaFamily::Theta& th,
                              const GammaElem& g) const;
    LChar chi_gamma_char(const ThetaFamily& fam, const ThetaFamily::Theta& th,
                         const Subfield& Kg) const;

    struct FQReport {
        bool applicable = true;
        bool holds = false;
        Cyclo lhs, rhs;
    };
    // Fröhlich-Queyrut: G(vt^{-1}, pi^{-(d+f)}) * vt(pi)^{d+f} = vt(beta)
    FQReport frohlich_queyrut(const ThetaFamily& fam,
                              const ThetaFamily::Theta& th) const;
    // same identity for an arbitrary character of K^x; reports inapplicable
    // when the character is nontrivial on K_+^x
    FQReport frohlich_queyrut_char(const LChar& chi) const;

private:
    const TowerModel* T_;
    RootU psi_L_at(const Subfield& L, const OKElem& scale_unit, int64_t k,
                   const OKElem& t) const;
    OKElem w_L(const Subfield& L) const; // pi_L^{e_LF} / p
};

// --- adjoint assembly -------------------------------------------------------

struct FactorReport {
    int64_t a = 0;                  // Artin conductor (route agreement checked)
    Rat a_route_filtration, a_route_sum;
    Cyclo eps;                      // epsilon(Ad o phi, psi_F) by assembly
    Cyclo w;                        // eps / q^{a/2}
    Cyclo w_closed;                 // case-split closed form
    bool w_match = false;
    bool unimodular = false;        // |w|^2 == 1
    LPolynomial L;                  // adjoint L-factor P(T)
    LPolynomial L_expected;
    bool L_match = false;
    Cyclo gamma0_abs_sq;            // |gamma(phi,Ad,0)|^2 (exact rational)
    std::string notes;
};

class AdjointFactors {
public:
    AdjointFactors(const TowerModel& T, const ThetaFamily& fam,
                   const ThetaFamily::Theta& th, const Cocycle& co);

    // conductor by decomposition sum (Pi_1 + Pi_2 + Pi_3 abelian conductors)
    Rat artin_conductor_sum() const;
    // epsilon(Ad o phi, psi_F) assembled from abelian epsilons and lambdas
    Cyclo epsilon_assembled() const;
    Cyclo w_closed_form() const;    // case-split closed form for w
    FactorReport report() const;

    // gamma(phi, Ad, psi, dx, 0) = eps * L(1)/L(0), exact
    Cyclo gamma_value() const;
    // |gamma|^2 as an exact rational, from the assembled eps and L-factor
    Rat gamma_abs_squared() const;

private:
    const TowerModel* T_;
    const ThetaFamily* fam_;
    ThetaFamily::Theta th_;
    FactorEngine eng_;
    WeilQuotient W_;
    std::vector<GammaElem> pair_reps_;   // {g, g^{-1}} classes, g^2 != 1
    std::vector<GammaElem> extra_invol_; // involutions besides 1, tau
};

// --- principal parameter and Sym tensors ------------------------------------

struct SymTensor {
    int n;                                    // Sym_n on degree-n forms
    std::vector<std::vector<Rat>> form;       // <v_k, v_l>
    std::vector<std::vector<Rat>> nilpotent;  // N_0 = dSym(e)
    static SymTensor build(int n);
    static std::vector<std::vector<Rat>> matrix_of(int n,
                                                   const std::array<Rat, 4>& g);
};

struct PrincipalParameter {
    LPolynomial L;            // det(1 - T Ad rho_0(Fr) | ker ad N_0)
    std::vector<int> weights; // exponents 2k-1 found on the kernel basis
    Rat eps;                  // q^{n^2}, imported normalization
    Rat gamma0;               // eps * L(1)/L(0)
};
PrincipalParameter principal_parameter(int n, int64_t q);

} // namespace tloc
