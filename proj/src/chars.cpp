#include "tloc/chars.hpp"

#include <cassert>

namespace tloc {

CChar::CChar(const TowerModel& T) : T_(&T) {
    auto H = T.gamma().involutions();
    if (T.params().totally_ramified()) {
        mode_ = 1;
    } else if (H.size() == 2) {
        mode_ = 0;
    } else {
        mode_ = 2;
        // ker(N_{K/K+} | mu), a cyclic group; record dlog parity
        int64_t muord = T.R().res_units();
        std::vector<int64_t> ker;
        std::vector<GammaElem> tg{T.gamma().id(), T.tau()};
        for (int64_t k = 0; k < muord; ++k)
            if (T.norm_subgroup(tg, T.teich(k)) == T.one()) ker.push_back(k);
        int64_t sz = (int64_t)ker.size();
        int64_t gen = -1;
        for (int64_t k : ker)
            if (k != 0 && muord / gcd64(k, muord) == sz) { gen = k; break; }
        assert(gen >= 0);
        int64_t cur = 0;
        for (int64_t j = 0; j < sz; ++j) {
            parity_[cur] = (int)(j % 2);
            cur = (cur + gen) % muord;
        }
    }
}

RootU CChar::eval(const OKElem& u) const {
    if (mode_ == 0) return RootU::one();
    int64_t k = T_->teich_exp(u);
    if (mode_ == 1) return (k % 2) ? RootU::minus_one() : RootU::one();
    auto it = parity_.find(k);
    assert(it != parity_.end());
    return it->second ? RootU::minus_one() : RootU::one();
}

RootU CChar::at_minus_one() const { return eval(T_->neg(T_->one())); }

RootU CChar::expected_minus_one() const {
    const auto& par = T_->params();
    auto H = T_->gamma().involutions();
    if (par.totally_ramified())
        return ((par.q() - 1) / 2) % 2 ? RootU::minus_one() : RootU::one();
    if (H.size() == 2) return RootU::one();
    int64_t qfp = i64pow(par.p, par.f0 * (int)par.f_plus());
    int64_t s = 1 + ((qfp - 1) / 2) % 2; // -(-1)^{(q^{f+}-1)/2}
    return (s % 2) ? RootU::minus_one() : RootU::one();
}

ThetaFamily::ThetaFamily(const TowerModel& T) : T_(&T), c_(T) {
    const auto& par = T.params();
    el_ = (int)par.e * par.l();
    er_ = (int)par.e * par.r;

    Subfield K = T.subfield("K");
    auto res_basis = T.subfield_res_basis(K);

    // S = U_{K/K+} cap (1 + p^el) mod (1 + p^er): generated by g^{1-tau}
    {
        std::vector<OKElem> gens;
        for (int j = el_; j < er_; ++j)
            for (int64_t b : res_basis) {
                OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(T.pi(), j)));
                gens.push_back(T.truncate(T.one_minus_tau(g), er_));
            }
        std::unordered_map<OKElem, int, OKElemHash> seen;
        S_elems_ = {T.truncate(T.one(), er_)};
        seen[S_elems_[0]] = 0;
        for (size_t h = 0; h < S_elems_.size(); ++h)
            for (auto& g : gens) {
                OKElem z = T.truncate(T.mul(S_elems_[h], g), er_);
                if (!seen.count(z)) {
                    seen[z] = 1;
                    S_elems_.push_back(z);
                }
            }
    }

    // Q = A / S keyed by truncation at level el
    {
        std::vector<OKElem> gens;
        gens.push_back(T.truncate(T.neg(T.one()), er_));
        OKElem ximg = T.teich(1);
        gens.push_back(T.truncate(T.one_minus_tau(ximg), er_));
        for (int j = 1; j < er_; ++j)
            for (int64_t b : res_basis) {
                OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(T.pi(), j)));
                gens.push_back(T.truncate(T.one_minus_tau(g), er_));
            }
        Q_reps_ = {T.truncate(T.one(), er_)};
        Q_key_[T.truncate(T.one(), el_)] = 0;
        for (size_t h = 0; h < Q_reps_.size(); ++h)
            for (auto& g : gens) {
                OKElem z = T.truncate(T.mul(Q_reps_[h], g), er_);
                OKElem key = T.truncate(z, el_);
                if (!Q_key_.count(key)) {
                    Q_key_[key] = (int)Q_reps_.size();
                    Q_reps_.push_back(z);
                }
            }
        int nq = (int)Q_reps_.size();
        const TowerModel* Tp = T_;
        int el = el_, er = er_;
        auto reps = &Q_reps_;
        auto keys = &Q_key_;
        Q_ = FinAbGroup(nq, 0, [Tp, el, er, reps, keys](int a, int b) {
            OKElem z = Tp->truncate(Tp->mul((*reps)[a], (*reps)[b]), er);
            return keys->at(Tp->truncate(z, el));
        });
        Q_.build_basis();
    }

    assert((int64_t)S_elems_.size() == expected_S_size());

    // base extension theta* on the lifted basis
    for (size_t i = 0; i < Q_.basis().size(); ++i) {
        OKElem b = Q_reps_[Q_.basis()[i]];
        int64_t ni = Q_.orders()[i];
        OKElem bn = T.truncate(T.pow(b, ni), er_);
        assert(T.truncate(bn, el_) == T.truncate(T.one(), el_));
        RootU t0 = theta0(bn);
        base_on_basis_.push_back(RootU(t0.num, t0.den * ni));
    }
}

int64_t ThetaFamily::expected_count() const {
    const auto& par = T_->params();
    int64_t n = par.n();
    int64_t gb;
    if (par.totally_ramified()) gb = 2 * i64pow(par.q(), n);
    else gb = i64pow(par.q(), n) + i64pow(par.q(), n - par.f_plus());
    return gb * i64pow(par.q(), (par.l() - 1) * n);
}

int64_t ThetaFamily::expected_S_size() const {
    const auto& par = T_->params();
    return i64pow(par.q(), par.lp() * par.n());
}

RootU ThetaFamily::theta0(const OKElem& s) const {
    const auto& par = T_->params();
    assert(T_->truncate(s, el_) == T_->truncate(T_->one(), el_));
    OKElem num = T_->sub(s, T_->one());
    // x = (s - 1) / p^l; divide each unramified coefficient
    OKElem x;
    x.c.reserve(num.c.size());
    int64_t pl = i64pow(par.p, par.l());
    for (auto& g : num.c) x.c.push_back(T_->R().divide_exact(g, pl));
    return T_->psi_frac(T_->mul(x, T_->beta()), par.lp());
}

ThetaFamily::Theta ThetaFamily::theta(int64_t k) const {
    Theta th;
    th.index = (int)k;
    const auto& ords = Q_.orders();
    th.chi.assign(ords.size(), 0);
    // lexicographic, last exponent fastest (matches FinAbGroup::characters)
    for (size_t i = ords.size(); i-- > 0;) {
        th.chi[i] = k % ords[i];
        k /= ords[i];
    }
    assert(k == 0);
    return th;
}

int ThetaFamily::coset_index(const OKElem& u) const {
    auto it = Q_key_.find(T_->truncate(u, el_));
    assert(it != Q_key_.end());
    return it->second;
}

RootU ThetaFamily::eval(const Theta& th, const OKElem& u) const {
    int idx = coset_index(u);
    const auto& co = Q_.dlog(idx);
    RootU val = RootU::one();
    OKElem rem = T_->truncate(u, er_);
    for (size_t i = 0; i < co.size(); ++i) {
        if (!co[i]) continue;
        OKElem bp = T_->pow(Q_reps_[Q_.basis()[i]], co[i]);
        rem = T_->truncate(T_->mul(rem, T_->unit_inv(bp)), er_);
        val = val * base_on_basis_[i].pow(co[i]);
        if (th.chi[i])
            val = val * RootU(th.chi[i] * co[i] % Q_.orders()[i], Q_.orders()[i]);
    }
    return val * theta0(rem);
}

RootU ThetaFamily::theta_minus_one(const Theta& th) const {
    return eval(th, T_->neg(T_->one()));
}

RootU ThetaFamily::vartheta_tilde(const Theta& th, const OKElem& x) const {
    OKElem y = T_->one_minus_tau(x);
    return c_.eval(y) * eval(th, y);
}

RootU ThetaFamily::vartheta_tilde_twist(const Theta& th, const GammaElem& g,
                                        const OKElem& x) const {
    return vartheta_tilde(th, T_->apply(g, x));
}

RootU ThetaFamily::vartheta_gamma(const Theta& th, const GammaElem& g,
                                  const OKElem& x) const {
    return vartheta_tilde(th, T_->mul(x, T_->apply(g, x)));
}

int64_t unit_char_conductor(const TowerModel& T, const Subfield& L,
                            const std::function<RootU(const OKElem&)>& chi,
                            int depth_max) {
    auto res_basis = T.subfield_res_basis(L);
    int64_t last = 0;
    for (int k = 1; k <= depth_max; ++k) {
        for (int64_t b : res_basis) {
            OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(L.pi, k)));
            if (!chi(g).is_one()) { last = k; break; }
        }
    }
    if (last > 0) return last + 1;
    // check the Teichmüller part
    auto exps = T.subfield_teich_exps(L);
    for (int64_t k : exps)
        if (k != 0 && !chi(T.teich(k)).is_one()) return 1;
    return 0;
}

std::vector<GammaElem> galois_twist_fixers(const TowerModel& T,
                                           const ThetaFamily& fam,
                                           const ThetaFamily::Theta& th,
                                           int k) {
    Subfield K = T.subfield("K");
    auto res_basis = T.subfield_res_basis(K);
    int er = (int)T.params().e * T.params().r;
    std::vector<GammaElem> out;
    for (auto& s : T.gamma().elements()) {
        bool fix = true;
        for (int j = k; j <= er && fix; ++j)
            for (int64_t b : res_basis) {
                OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(T.pi(), j)));
                if (fam.vartheta_tilde_twist(th, s, g) != fam.vartheta_tilde(th, g)) {
                    fix = false;
                    break;
                }
            }
        if (fix) out.push_back(s);
    }
    return out;
}

QuadSymbol::QuadSymbol(const TowerModel& T, const Subfield& L, const Subfield& Lp)
    : T_(&T), L_(L), Lp_(Lp) {
    build();
}

void QuadSymbol::build() {
    const TowerModel& T = *T_;
    assert(Lp_.gal.size() * 2 == L_.gal.size());
    // sigma: a generator of Gal(L'/L) acting on L'
    GammaElem sig{-1, -1};
    for (auto& g : L_.gal) {
        bool inLp = false;
        for (auto& h : Lp_.gal)
            if (h == g) { inLp = true; break; }
        if (!inLp) { sig = g; break; }
    }
    assert(sig.a >= 0);
    auto normLpL = [&](const OKElem& x) { return T.mul(x, T.apply(sig, x)); };

    // classes in J = L^x / ((L^x)^2 (1 + p_L)): (v mod 2, Teichmüller parity)
    int64_t muord = T.R().res_units();
    auto expsL = T.subfield_teich_exps(L_);
    int64_t szL = (int64_t)expsL.size();
    int64_t genL = 0;
    for (int64_t k : expsL)
        if (k != 0 && muord / gcd64(k, muord) == szL) { genL = k; break; }
    std::unordered_map<int64_t, int> muL_parity;
    {
        int64_t cur = 0;
        for (int64_t j = 0; j < szL; ++j) {
            muL_parity[cur] = (int)(j % 2);
            cur = (cur + genL) % muord;
        }
    }
    const TowerModel* Tp = T_;
    Subfield L = L_;
    auto cls = [Tp, muL_parity](int64_t v, const OKElem& unit) {
        return (int)(((v % 2) + 2) % 2) * 2 +
               muL_parity.at(Tp->teich_exp(Tp->teich_part(unit)));
    };
    auto split = [Tp, L, muord](const OKElem& x) {
        int vK = Tp->val(x);
        assert(vK % L.e_KL == 0);
        int64_t v = vK / L.e_KL;
        OKElem u = x;
        if (vK) {
            u = Tp->div_pi_exact(u, vK);
            OKElem base = Tp->div_pi_exact(L.pi, (int)L.e_KL);
            int64_t w = Tp->teich_exp(base);
            u = Tp->mul(u, Tp->teich((muord - w) % muord * (v % muord) % muord));
        }
        return std::make_pair(v, u);
    };

    // norm subgroup generated by N(pi_{L'}) and N(mu_{L'} generator)
    std::vector<int> gens_cls;
    {
        auto [v, u] = split(normLpL(Lp_.pi));
        gens_cls.push_back(cls(v, u));
    }
    {
        auto expsLp = T.subfield_teich_exps(Lp_);
        int64_t szLp = (int64_t)expsLp.size();
        int64_t genLp = 0;
        for (int64_t k : expsLp)
            if (k != 0 && muord / gcd64(k, muord) == szLp) { genLp = k; break; }
        auto [v, u] = split(normLpL(T.teich(genLp)));
        gens_cls.push_back(cls(v, u));
    }
    // subgroup closure in (Z/2)^2 written as {0,1,2,3} with xor
    std::vector<char> in(4, 0);
    in[0] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int g : gens_cls)
            for (int x = 0; x < 4; ++x)
                if (in[x] && !in[x ^ g]) { in[x ^ g] = 1; grew = true; }
    }
    int count = in[0] + in[1] + in[2] + in[3];
    assert(count == 2);
    pi_class_ = 0;
    for (int x = 0; x < 4; ++x)
        if (in[x]) pi_class_ |= (1 << x);
    split_ = split;
    cls_ = cls;
}

int QuadSymbol::eval(const OKElem& x) const {
    auto [v, u] = split_(x);
    int c = cls_(v, u);
    return (pi_class_ >> c) & 1 ? 1 : -1;
}

int QuadSymbol::eval_split(int64_t v, const OKElem& unit) const {
    int c = cls_(v, unit);
    return (pi_class_ >> c) & 1 ? 1 : -1;
}

} // namespace tloc
