#include "tloc/localfactors.hpp"

#include <cassert>
#include <memory>
#include <sstream>

namespace tloc {

RootU LChar::eval(const TowerModel& T, const Subfield& L, const OKElem& x) const {
    int vK = T.val(x);
    assert(vK % L.e_KL == 0);
    int64_t v = vK / L.e_KL;
    OKElem u = x;
    if (vK) {
        u = T.div_pi_exact(u, vK);
        // strip the Teichmüller twist of pi_L^v
        OKElem base = T.div_pi_exact(L.pi, (int)L.e_KL);
        int64_t w = T.teich_exp(base);
        int64_t muord = T.R().res_units();
        u = T.mul(u, T.teich((muord - w) % muord * (v % muord) % muord));
    }
    return on_units(u) * on_pi.pow(v);
}

std::string LPolynomial::str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coef.size(); ++i) {
        if (coef[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << coef[i].str();
        if (i == 1) os << "*T";
        if (i > 1) os << "*T^" << i;
    }
    if (first) os << "0";
    return os.str();
}

OKElem FactorEngine::w_L(const Subfield& L) const {
    const TowerModel& T = *T_;
    OKElem x = T.pow(L.pi, L.e_LF);
    // divide by p = varpi^e / omega
    OKElem y = T.div_pi_exact(x, (int)T.params().e);
    return T.mul(y, T.teich(T.omega_exp()));
}

RootU FactorEngine::psi_L_at(const Subfield& L, const OKElem& scale_unit, int64_t k,
                             const OKElem& t) const {
    const TowerModel& T = *T_;
    if (k <= 0) {
        // integral argument: psi_L is trivial on O_L when d(L) = 0; in general
        // handled by the caller keeping k >= 1
        return RootU::one();
    }
    int64_t a = (k + L.e_LF - 1) / L.e_LF;
    OKElem w = T.mul(scale_unit, t);
    int64_t extra = a * L.e_LF - k;
    if (extra) w = T.mul(w, T.pow(L.pi, extra));
    OKElem wl = w_L(L);
    w = T.mul(w, T.pow(T.unit_inv(wl), a));
    return T.psi_frac_subfield(L, w, (int)a);
}

int64_t FactorEngine::conductor(const Subfield& L, const LChar& chi) const {
    if (chi.cond >= 0) return chi.cond;
    int depth = (int)T_->params().e * T_->params().r + 1;
    return unit_char_conductor(*T_, L, chi.on_units, depth);
}

Cyclo FactorEngine::gauss_sum(const Subfield& L, const LChar& chi,
                              const OKElem& c_unit, int64_t k,
                              bool force_direct) const {
    const TowerModel& T = *T_;
    int64_t f = conductor(L, chi);
    if (f < 1) throw WrongValuation("gauss_sum: character must be ramified");
    if (k != L.d_abs + f)
        throw WrongValuation("gauss_sum: c must have valuation -(d(L)+f(chi))");
    int deg = T.params().f0 * (int)L.f_LF;

    if (f <= 2 || force_direct) {
        CycloBuilder cb;
        for (auto& t : T.subfield_units(L, (int)f))
            cb.add(chi.on_units(t).inv() * psi_L_at(L, c_unit, k, t));
        Cyclo g = cb.take() * Cyclo::half_power(T.params().p, deg, -f);
        assert(g.abs_square() == Cyclo(Rat(1)));
        return g;
    }

    // conductor lowering: t = t0(1+v), v in p_L^{kp}, chi(1+v) = psi_L(b v).
    // The unit b/pi_L^{-(d+f)} is found digit by digit: its value mod p_L^{i+1}
    // is pinned by the pairing against the layer at depth f-1-i.
    int64_t kh = f / 2;
    auto basis = T.subfield_res_basis(L);
    auto exps = T.subfield_teich_exps(L);
    std::vector<int64_t> digit_pool{-1}; // -1 encodes digit zero
    for (int64_t x : exps) digit_pool.push_back(x);
    OKElem ub = T.zero();
    for (int64_t step = 0; step < kh; ++step) {
        int64_t j = f - 1 - step; // layer determining this digit
        bool found = false;
        for (int64_t de : digit_pool) {
            if (step == 0 && de < 0) continue; // b is a unit
            OKElem cand = ub;
            if (de >= 0)
                cand = T.add(cand, T.mul(T.teich(de), T.pow(L.pi, step)));
            bool ok = true;
            for (int64_t b : basis) {
                OKElem v1 = T.add(T.one(), T.mul(T.teich(b), T.pow(L.pi, j)));
                RootU lhs = chi.on_units(v1);
                RootU rhs = psi_L_at(L, T.mul(cand, T.teich(b)), k - j, T.one());
                if (lhs != rhs) { ok = false; break; }
            }
            if (ok) {
                ub = cand;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error("gauss_sum: no stationary phase unit");
    }
    OKElem tstar = T.mul(ub, T.unit_inv(c_unit));

    if (f % 2 == 0) {
        RootU val = chi.on_units(tstar).inv() * psi_L_at(L, T.mul(c_unit, tstar), k, T.one());
        Cyclo g = Cyclo::from_rootu(val);
        assert(g.abs_square() == Cyclo(Rat(1)));
        return g;
    }
    // odd conductor: one residue-field sum remains
    CycloBuilder cb;
    std::vector<int64_t> digits(deg, 0);
    for (;;) {
        OKElem r = T.zero();
        for (int i = 0; i < deg; ++i)
            if (digits[i])
                r = T.add(r, T.mul(T.teich(basis[i]), T.from_int(digits[i])));
        OKElem tt = T.mul(tstar, T.add(T.one(), T.mul(r, T.pow(L.pi, kh))));
        cb.add(chi.on_units(tt).inv() * psi_L_at(L, T.mul(c_unit, tt), k, T.one()));
        int i = 0;
        while (i < deg && ++digits[i] == T.params().p) digits[i++] = 0;
        if (i == deg) break;
    }
    Cyclo g = cb.take() * Cyclo::half_power(T.params().p, deg, -1);
    assert(g.abs_square() == Cyclo(Rat(1)));
    return g;
}

Cyclo FactorEngine::epsilon_abelian(const Subfield& L, const LChar& chi) const {
    int64_t f = conductor(L, chi);
    int64_t d = L.d_abs;
    int deg = T_->params().f0 * (int)L.f_LF;
    if (f == 0)
        return Cyclo::from_rootu(chi.on_pi.pow(d)) * Cyclo::half_power(T_->params().p, deg, d);
    Cyclo g = gauss_sum(L, chi, T_->neg(T_->one()), d + f);
    return g * Cyclo::from_rootu(chi.on_pi.pow(d + f)) *
           Cyclo::half_power(T_->params().p, deg, d + f);
}

Cyclo FactorEngine::epsilon_abelian_scaled(const Subfield& L, const LChar& chi,
                                           int64_t va, const OKElem& ua,
                                           const Rat& measure_scale) const {
    int64_t f = conductor(L, chi);
    int64_t d = L.d_abs;
    int deg = T_->params().f0 * (int)L.f_LF;
    Cyclo val;
    if (f == 0) {
        val = Cyclo::from_rootu(chi.on_pi.pow(d + va)) *
              Cyclo::half_power(T_->params().p, deg, d + va);
    } else {
        Cyclo g = gauss_sum(L, chi, T_->neg(ua), d + f);
        val = g * Cyclo::from_rootu(chi.on_pi.pow(d + va + f)) *
              Cyclo::half_power(T_->params().p, deg, d + va + f);
    }
    // convert from the psi_a-self-dual measure back to the psi_L one
    val = val * Cyclo::half_power(T_->params().p, deg, va);
    return val * measure_scale;
}

Cyclo FactorEngine::lambda_closed(const Subfield& L) const {
    const auto& par = T_->params();
    if (L.e_LF % 2 == 1) return Cyclo(Rat(1)); // (-1)^{(f-1) d(F)}, d(F) = 0
    int64_t qf = i64pow(par.q(), L.f_LF);
    if ((qf - 1) % L.e_LF != 0)
        throw UnsupportedExtension("lambda_closed: e(L/F) does not divide q^{f}-1");
    int64_t expnt = ((qf - 1) / L.e_LF) % 2 * (L.e_LF * (L.e_LF + 2) / 8) % 2;
    Rat sign((expnt % 2) ? -1 : 1);

    // unramified part L0 of L/F and a norm prime of it
    std::vector<GammaElem> gens = L.gal;
    gens.push_back(T_->gamma().delta(1));
    Subfield L0 = T_->subfield_custom(L.name + "0", gens);
    // varpi_0 = N_{L/L0}(pi_L)
    std::vector<GammaElem> reps;
    for (auto& g : L0.gal) {
        bool dup = false;
        for (auto& r : reps) {
            GammaElem d0 = T_->gamma().mul(T_->gamma().inv(r), g);
            for (auto& s : L.gal)
                if (s == d0) { dup = true; break; }
            if (dup) break;
        }
        if (!dup) reps.push_back(g);
    }
    OKElem pi0 = T_->one();
    for (auto& g : reps) pi0 = T_->mul(pi0, T_->apply(g, L.pi));
    assert(T_->val(pi0) == (int)L0.e_KL);
    OKElem u0 = T_->mul(T_->div_pi_exact(pi0, (int)L0.e_KL),
                        T_->unit_inv(T_->div_pi_exact(L0.pi, (int)L0.e_KL)));

    // Legendre character of the residue field of L0
    int64_t muord = T_->R().res_units();
    auto exps = T_->subfield_teich_exps(L0);
    int64_t sz = (int64_t)exps.size();
    int64_t gen = 0;
    for (int64_t kk : exps)
        if (kk != 0 && muord / gcd64(kk, muord) == sz) { gen = kk; break; }
    std::unordered_map<int64_t, int> parity;
    {
        int64_t cur = 0;
        for (int64_t j = 0; j < sz; ++j) {
            parity[cur] = (int)(j % 2);
            cur = (cur + gen) % muord;
        }
    }
    const TowerModel* Tp = T_;
    LChar leg;
    leg.cond = 1;
    leg.on_units = [Tp, parity](const OKElem& u) {
        return parity.at(Tp->teich_exp(Tp->teich_part(u))) ? RootU::minus_one()
                                                           : RootU::one();
    };
    Cyclo g = gauss_sum(L0, leg, T_->unit_inv(u0), 1);
    return g * sign;
}

Cyclo FactorEngine::lambda_unram_quadratic(const Subfield& L) const {
    const auto& par = T_->params();
    if (L.f_LF % 2 != 0)
        throw UnsupportedExtension("lambda_unram_quadratic needs f(L/F) even");
    if (L.e_LF % 2 == 1) return Cyclo(Rat(1)); // (-1)^{d(F)}
    int64_t qfp = i64pow(par.q(), L.f_LF / 2);
    int64_t s = 1 + ((qfp - 1) / 2) % 2;
    return Cyclo(Rat((s % 2) ? -1 : 1));
}

Cyclo FactorEngine::lambda_inductive(const Subfield& L, const Subfield& B) const {
    const TowerModel& T = *T_;
    const auto& G = T.gamma();
    // Gal(L/B) = S_B / S_L must be abelian
    auto inL = [&](const GammaElem& g) {
        for (auto& s : L.gal)
            if (s == g) return true;
        return false;
    };
    for (auto& x : B.gal)
        for (auto& y : B.gal) {
            GammaElem c = G.mul(G.mul(x, y), G.inv(G.mul(y, x)));
            if (!inL(c))
                throw UnsupportedExtension("lambda_inductive: Gal(L/B) not abelian");
        }
    int64_t nrel = (int64_t)B.gal.size() / (int64_t)L.gal.size();
    int64_t frel = B.f_KL / L.f_KL;
    int64_t erel = B.e_KL / L.e_KL;

    // coset reps of S_L in S_B, for the relative norm
    std::vector<GammaElem> reps;
    for (auto& g : B.gal) {
        bool dup = false;
        for (auto& r : reps)
            if (inL(G.mul(G.inv(r), g))) { dup = true; break; }
        if (!dup) reps.push_back(g);
    }
    auto normLB = [&](const OKElem& x) {
        OKElem s = T.one();
        for (auto& g : reps) s = T.mul(s, T.apply(g, x));
        return s;
    };

    // mu_B with generator, and the norm image of mu_L
    int64_t muord = T.R().res_units();
    auto expsB = T.subfield_teich_exps(B);
    int64_t szB = (int64_t)expsB.size();
    int64_t genB = 0;
    for (int64_t kk : expsB)
        if (kk != 0 && muord / gcd64(kk, muord) == szB) { genB = kk; break; }
    std::unordered_map<int64_t, int64_t> dlogB;
    {
        int64_t cur = 0;
        for (int64_t j = 0; j < szB; ++j) {
            dlogB[cur] = j;
            cur = (cur + genB) % muord;
        }
    }
    auto expsL = T.subfield_teich_exps(L);
    std::unordered_map<int64_t, int> image;
    for (int64_t kk : expsL)
        image[T.teich_exp(T.teich_part(normLB(T.teich(kk))))] = 1;
    int64_t g0 = szB / (int64_t)image.size();
    if (g0 != erel)
        throw UnsupportedExtension("lambda_inductive: unexpected norm index");

    // unit part of N(pi_L) relative to B.pi^{frel}
    OKElem npi = normLB(L.pi);
    assert(T.val(npi) == (int)(frel * B.e_KL));
    OKElem w = T.mul(T.div_pi_exact(npi, T.val(npi)),
                     T.unit_inv(T.div_pi_exact(T.pow(B.pi, frel), (int)(frel * B.e_KL))));
    int64_t wlog = dlogB.at(T.teich_exp(T.teich_part(w)));

    // all characters eta = (chi_mu^{(j)}, z) with z^{frel} = chi_mu(w)^{-1}
    Cyclo prod(Rat(1));
    int64_t count = 0;
    const TowerModel* Tp = T_;
    for (int64_t j = 0; j < g0; ++j) {
        RootU chiw(j * (wlog % g0) % g0, g0);
        for (int64_t i = 0; i < frel; ++i) {
            LChar eta;
            auto dl = dlogB;
            int64_t jj = j, gg = g0;
            eta.on_units = [Tp, dl, jj, gg](const OKElem& u) {
                int64_t lg = dl.at(Tp->teich_exp(Tp->teich_part(u)));
                return RootU(jj * (lg % gg) % gg, gg);
            };
            eta.cond = (j % g0) ? 1 : 0;
            RootU base(-chiw.num, chiw.den * frel);
            eta.on_pi = base * RootU(i, frel);
            prod *= epsilon_abelian(B, eta);
            ++count;
        }
    }
    assert(count == nrel);
    // divide by eps(1_L, psi_L) = q_L^{d(L)/2}
    int degL = T.params().f0 * (int)L.f_LF;
    return prod * Cyclo::half_power(T.params().p, degL, -L.d_abs);
}

Cyclo FactorEngine::lambda_chain(const Subfield& L) const {
    std::vector<GammaElem> gens = L.gal;
    gens.push_back(T_->gamma().delta(1));
    Subfield L0 = T_->subfield_custom(L.name + "0", gens);
    Subfield F = T_->subfield("F");
    Cyclo below = lambda_inductive(L0, F); // unramified: should be 1
    Cyclo above = lambda_inductive(L, L0);
    int64_t deg_rel = (int64_t)L0.gal.size() / (int64_t)L.gal.size();
    return above * below.pow((long)deg_rel);
}

LChar FactorEngine::vartheta_char(const ThetaFamily& fam,
                                  const ThetaFamily::Theta& th) const {
    LChar c;
    const ThetaFamily* fp = &fam;
    ThetaFamily::Theta t2 = th;
    c.on_units = [fp, t2](const OKElem& u) { return fp->vartheta_tilde(t2, u); };
    c.on_pi = fam.vartheta_tilde(th, T_->pi());
    return c;
}

LChar FactorEngine::vartheta_gamma_char(const ThetaFamily& fam,
                                        const ThetaFamily::Theta& th,
                                        const GammaElem& g) const {
    LChar c;
    const ThetaFamily* fp = &fam;
    ThetaFamily::Theta t2 = th;
    GammaElem g2 = g;
    c.on_units = [fp, t2, g2](const OKElem& u) { return fp->vartheta_gamma(t2, g2, u); };
    c.on_pi = fam.vartheta_gamma(th, g, T_->pi());
    return c;
}

LChar FactorEngine::chi_gamma_char(const ThetaFamily& fam,
                                   const ThetaFamily::Theta& th,
                                   const Subfield& Kg) const {
    LChar c;
    auto sym = std::make_shared<QuadSymbol>(*T_, Kg, T_->subfield("K"));
    const ThetaFamily* fp = &fam;
    ThetaFamily::Theta t2 = th;
    c.on_units = [fp, t2, sym](const OKElem& u) {
        RootU s = sym->eval(u) < 0 ? RootU::minus_one() : RootU::one();
        return s * fp->vartheta_tilde(t2, u);
    };
    RootU spi = sym->eval(Kg.pi) < 0 ? RootU::minus_one() : RootU::one();
    c.on_pi = spi * fam.vartheta_tilde(th, Kg.pi);
    return c;
}

FactorEngine::FQReport FactorEngine::frohlich_queyrut(
    const ThetaFamily& fam, const ThetaFamily::Theta& th) const {
    return frohlich_queyrut_char(vartheta_char(fam, th));
}

FactorEngine::FQReport FactorEngine::frohlich_queyrut_char(const LChar& vt) const {
    const TowerModel& T = *T_;
    FQReport rep;
    Subfield K = T.subfield("K");
    Subfield Kp = T.subfield("K+");
    int64_t f = conductor(K, vt);
    // applicability: trivial on K_+^x, checked on full-precision generators
    // (truncated unit enumerations are not exactly tau-fixed)
    {
        auto exps = T.subfield_teich_exps(Kp);
        int64_t muord = T.R().res_units();
        int64_t sz = (int64_t)exps.size(), gen = 0;
        for (int64_t kk : exps)
            if (kk != 0 && muord / gcd64(kk, muord) == sz) { gen = kk; break; }
        std::vector<OKElem> gens;
        if (gen) gens.push_back(T.teich(gen));
        int64_t depth = (f + Kp.e_KL - 1) / Kp.e_KL + 1;
        auto rb = T.subfield_res_basis(Kp);
        for (int64_t j = 1; j <= depth; ++j)
            for (int64_t b : rb)
                gens.push_back(T.add(T.one(), T.mul(T.teich(b), T.pow(Kp.pi, j))));
        for (auto& g : gens)
            if (!vt.on_units(g).is_one()) {
                rep.applicable = false;
                return rep;
            }
        if (!vt.eval(T, K, Kp.pi).is_one()) {
            rep.applicable = false;
            return rep;
        }
    }
    int64_t dK = T.params().e - 1;
    Cyclo g = gauss_sum(K, vt, T.one(), dK + f);
    rep.lhs = g * Cyclo::from_rootu(vt.on_pi.pow(dK + f));
    rep.rhs = Cyclo::from_rootu(vt.eval(T, K, T.beta()));
    rep.holds = rep.lhs == rep.rhs;
    return rep;
}

// ---------------------------------------------------------------------------

AdjointFactors::AdjointFactors(const TowerModel& T, const ThetaFamily& fam,
                               const ThetaFamily::Theta& th, const Cocycle& co)
    : T_(&T), fam_(&fam), th_(th), eng_(T), W_(T, fam, th, co) {
    const auto& G = T.gamma();
    for (auto& g : G.elements()) {
        if (G.mul(g, g) == G.id()) continue;
        if (G.inv(g) < g) continue;
        pair_reps_.push_back(g);
    }
    for (auto& g : G.involutions())
        if (!g.is_identity() && g != T.tau()) extra_invol_.push_back(g);
}

Rat AdjointFactors::artin_conductor_sum() const {
    const auto& par = T_->params();
    const TowerModel& T = *T_;
    Subfield K = T.subfield("K");
    // a(Pi_1) = a(Ind_K 1) - a(Ind_{K+} 1) = f d(K) - f_+ d(K_+)
    Rat a = Rat(par.f * (par.e - 1) - par.f_plus() * (par.e_plus() - 1));
    // a(Pi_2): Ind of vartheta-tilde and the pair twists
    LChar vt = eng_.vartheta_char(*fam_, th_);
    a += Rat(par.f * (par.e - 1 + eng_.conductor(K, vt)));
    for (auto& g : pair_reps_) {
        LChar vg = eng_.vartheta_gamma_char(*fam_, th_, g);
        a += Rat(par.f * (par.e - 1 + eng_.conductor(K, vg)));
    }
    // a(Pi_3)
    for (auto& g : extra_invol_) {
        Subfield Kg = T.subfield("Kgamma", g);
        LChar cg = eng_.chi_gamma_char(*fam_, th_, Kg);
        a += Rat(Kg.f_LF * (Kg.d_abs + eng_.conductor(Kg, cg)));
    }
    return a;
}

Cyclo AdjointFactors::epsilon_assembled() const {
    const auto& par = T_->params();
    const TowerModel& T = *T_;
    Subfield K = T.subfield("K");
    Subfield Kp = T.subfield("K+");
    int64_t p = par.p;

    Cyclo lamK = eng_.lambda_closed(K);
    Cyclo lamKp = Kp.gal.size() == (size_t)T.gamma().order()
                      ? Cyclo(Rat(1)) // K_+ = F
                      : eng_.lambda_closed(Kp);
    // eps(Pi_1) = lam(K/F) q_K^{d(K)/2} / (lam(K_+/F) q_{K_+}^{d(K_+)/2})
    Cyclo eps1 = lamK * Cyclo::half_power(p, par.f0 * (int)par.f, par.e - 1);
    eps1 = eps1 * lamKp.inv() *
           Cyclo::half_power(p, par.f0 * (int)par.f_plus(), -(par.e_plus() - 1));

    // eps(Pi_2) = eps(vt) prod eps(vt_gamma) * lam(K/F)^{#inductions}
    LChar vt = eng_.vartheta_char(*fam_, th_);
    Cyclo eps2 = eng_.epsilon_abelian(K, vt);
    for (auto& g : pair_reps_) {
        LChar vg = eng_.vartheta_gamma_char(*fam_, th_, g);
        eps2 = eps2 * eng_.epsilon_abelian(K, vg);
    }
    eps2 = eps2 * lamK.pow((long)(1 + pair_reps_.size()));

    // eps(Pi_3) = prod lam(K_gamma/F) eps(chi_gamma, psi_{K_gamma})
    Cyclo eps3(Rat(1));
    for (auto& g : extra_invol_) {
        Subfield Kg = T.subfield("Kgamma", g);
        LChar cg = eng_.chi_gamma_char(*fam_, th_, Kg);
        eps3 = eps3 * eng_.lambda_closed(Kg) * eng_.epsilon_abelian(Kg, cg);
    }
    return eps1 * eps2 * eps3;
}

Cyclo AdjointFactors::w_closed_form() const {
    const auto& par = T_->params();
    RootU vtm1 = fam_->c().at_minus_one() * fam_->theta_minus_one(th_);
    Cyclo w = Cyclo::from_rootu(vtm1);
    auto H = T_->gamma().involutions();
    if (par.totally_ramified()) {
        int64_t n = par.n();
        int64_t ex = ((par.q() - 1) / (2 * n)) % 2 * ((n * (n + 1) / 2) % 2);
        if (ex % 2) w = w * Rat(-1);
    } else if (H.size() == 4) {
        int64_t qfp = i64pow(par.q(), par.f_plus());
        int64_t s = 1 + ((qfp - 1) / 2) % 2;
        if (s % 2) w = w * Rat(-1);
    }
    return w;
}

Cyclo AdjointFactors::gamma_value() const {
    const auto& par = T_->params();
    auto lf = W_.l_factor_adjoint();
    LPolynomial P{lf.poly};
    // L(s) = 1/P(q^{-s}); the adjoint is self-dual
    Rat ratio = P.at(Rat(1)) / P.at(Rat(1, (long)i64pow(par.p, par.f0)));
    return epsilon_assembled() * ratio;
}

Rat AdjointFactors::gamma_abs_squared() const {
    const auto& par = T_->params();
    Cyclo eps = epsilon_assembled();
    Cyclo e2 = eps.abs_square();
    assert(e2.is_rational());
    auto lf = W_.l_factor_adjoint();
    LPolynomial P{lf.poly};
    Rat ratio = P.at(Rat(1)) / P.at(Rat(1, (long)i64pow(par.p, par.f0)));
    return e2.rat_value() * ratio * ratio;
}

FactorReport AdjointFactors::report() const {
    const auto& par = T_->params();
    FactorReport rep;
    rep.a_route_filtration = W_.artin_conductor_filtration();
    rep.a_route_sum = artin_conductor_sum();
    int64_t n = par.n();
    rep.a = 2 * n * n * par.r;
    rep.eps = epsilon_assembled();
    rep.w = rep.eps * Cyclo(Rat(Int(1), ipow(Int(par.q()), n * n * par.r)));
    rep.w_closed = w_closed_form();
    rep.w_match = rep.w == rep.w_closed;
    rep.unimodular = rep.w.abs_square() == Cyclo(Rat(1));
    auto lf = W_.l_factor_adjoint();
    rep.L.coef = lf.poly;
    rep.L_expected.coef = {Rat(1)};
    if (!par.totally_ramified()) {
        rep.L_expected.coef.assign(par.f_plus() + 1, Rat(0));
        rep.L_expected.coef[0] = Rat(1);
        rep.L_expected.coef[par.f_plus()] = Rat(1);
    }
    rep.L_match = rep.L == rep.L_expected;
    rep.gamma0_abs_sq = Cyclo(gamma_abs_squared());
    std::ostringstream os;
    if (!(rep.a_route_filtration == Rat(rep.a)) || !(rep.a_route_sum == Rat(rep.a)))
        os << "conductor route disagreement; ";
    rep.notes = os.str();
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Rat>> SymTensor::matrix_of(int n, const std::array<Rat, 4>& g) {
    // v_k = X^{n+1-k} Y^{k-1} / (k-1)!, k = 1..n+1; (X,Y) -> (aX+cY, bX+dY)
    auto binom = [](int a, int b) {
        Rat r(1);
        for (int i = 0; i < b; ++i) r = r * Rat(a - i) / Rat(i + 1);
        return r;
    };
    std::vector<std::vector<Rat>> M(n + 1, std::vector<Rat>(n + 1, Rat(0)));
    for (int k = 1; k <= n + 1; ++k) {
        int a = n + 1 - k, b = k - 1; // X^a Y^b
        // (aX+cY)^a (bX+dY)^b expanded: coefficient of X^{n-i} Y^{i}
        std::vector<Rat> coef(n + 1, Rat(0));
        for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j) {
                Rat c = binom(a, i) * g[0].pow(a - i) * g[2].pow(i) * binom(b, j) *
                        g[1].pow(b - j) * g[3].pow(j);
                coef[i + j] += c; // Y-degree i + j
            }
        // target basis v_l = X^{n+1-l} Y^{l-1} / (l-1)!: Y-degree l-1
        Rat fact(1);
        for (int i = 2; i <= k - 1; ++i) fact *= Rat(i);
        for (int l = 1; l <= n + 1; ++l) {
            Rat lf(1);
            for (int i = 2; i <= l - 1; ++i) lf *= Rat(i);
            M[l - 1][k - 1] = coef[l - 1] * lf / fact;
        }
    }
    return M;
}

SymTensor SymTensor::build(int n) {
    SymTensor S;
    S.n = n;
    // bilinear form <v_k, v_l> = f(-dY, dX) g at 0
    auto fact = [](int a) {
        Rat r(1);
        for (int i = 2; i <= a; ++i) r *= Rat(i);
        return r;
    };
    S.form.assign(n + 1, std::vector<Rat>(n + 1, Rat(0)));
    for (int k = 1; k <= n + 1; ++k)
        for (int l = 1; l <= n + 1; ++l) {
            int a = n + 1 - k, b = k - 1;
            int c = n + 1 - l, d = l - 1;
            // op (-dY)^a (dX)^b applied to X^c Y^d: needs c = b, d = a
            if (c != b || d != a) continue;
            Rat v = fact(b) * fact(a) * Rat((a % 2) ? -1 : 1);
            S.form[k - 1][l - 1] = v / (fact(k - 1) * fact(l - 1));
        }
    // N_0 = X dY: v_k -> v_{k-1} on the normalized basis; computed honestly
    S.nilpotent.assign(n + 1, std::vector<Rat>(n + 1, Rat(0)));
    for (int k = 2; k <= n + 1; ++k) {
        // X dY (X^{n+1-k} Y^{k-1} / (k-1)!) = X^{n+2-k} Y^{k-2} (k-1)/(k-1)!
        //                                   = v_{k-1}
        S.nilpotent[k - 2][k - 1] = Rat(1);
    }
    return S;
}

PrincipalParameter principal_parameter(int n, int64_t q) {
    PrincipalParameter P;
    SymTensor S = SymTensor::build(2 * n);
    int N = 2 * n + 1;
    // N_0 powers, exact
    auto matmul = [&](const std::vector<std::vector<Rat>>& A,
                      const std::vector<std::vector<Rat>>& B) {
        std::vector<std::vector<Rat>> C(N, std::vector<Rat>(N, Rat(0)));
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k)
                if (!A[i][k].is_zero())
                    for (int j = 0; j < N; ++j) C[i][j] += A[i][k] * B[k][j];
        return C;
    };
    // membership in so(form): X J + J X^t = 0 where J = Gram matrix
    auto in_so = [&](const std::vector<std::vector<Rat>>& X) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Rat s(0);
                for (int k = 0; k < N; ++k)
                    s += X[i][k] * S.form[k][j] + S.form[i][k] * X[j][k];
                if (!s.is_zero()) return false;
            }
        return true;
    };
    // rho_0(Fr) = diag(q^{-n}, ..., q^{n}) on v_1..v_{2n+1}
    std::vector<Rat> Dg(N);
    for (int i = 0; i < N; ++i) Dg[i] = int_pow(q, i - n);
    // Ad(D) on the kernel basis {N_0^{2k-1}}
    std::vector<std::vector<Rat>> Npow = S.nilpotent;
    std::vector<std::vector<std::vector<Rat>>> pows{S.nilpotent};
    for (int j = 2; j <= 2 * n; ++j) pows.push_back(matmul(pows.back(), S.nilpotent));
    P.L.coef = {Rat(1)};
    for (int k = 1; k <= n; ++k) {
        auto& M = pows[2 * k - 2]; // N_0^{2k-1}
        if (!in_so(M)) throw std::runtime_error("N_0^{2k-1} not in so(2n+1)");
        // eigenvalue of Ad(D): entries at (i, i+2k-1) scale by D_i / D_{i+2k-1}
        Rat lam(0);
        bool seen = false;
        for (int i = 0; i + 2 * k - 1 < N; ++i)
            if (!M[i][i + 2 * k - 1].is_zero()) {
                Rat l2 = Dg[i] / Dg[i + 2 * k - 1];
                if (seen && !(l2 == lam))
                    throw std::runtime_error("kernel basis not an eigenvector");
                lam = l2;
                seen = true;
            }
        assert(seen);
        P.weights.push_back(2 * k - 1);
        // multiply P(T) by (1 - lam T)
        std::vector<Rat> nc(P.L.coef.size() + 1, Rat(0));
        for (size_t i = 0; i < P.L.coef.size(); ++i) {
            nc[i] += P.L.coef[i];
            nc[i + 1] -= P.L.coef[i] * lam;
        }
        P.L.coef = nc;
        // even powers N_0^{2k} must NOT be in so (sanity for the wedge split)
        if (2 * k <= 2 * n && in_so(pows[2 * k - 1]))
            throw std::runtime_error("even N_0 power unexpectedly in so");
    }
    P.eps = Rat(ipow(Int(q), (long)n * n));
    P.gamma0 = P.eps * P.L.at(Rat(1)) / P.L.at(Rat(1, (long)q));
    return P;
}

} // namespace tloc
