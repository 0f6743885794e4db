#include "tloc/weilrep.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tloc {

namespace {

// raw K^x values at full model precision (v in Z, unit in O_K^x)
KxElem raw_mul(const TowerModel& T, const KxElem& a, const KxElem& b) {
    return {a.v + b.v, T.mul(a.u, b.u)};
}
KxElem raw_inv(const TowerModel& T, const KxElem& a) {
    return {-a.v, T.unit_inv(a.u)};
}
KxElem raw_twist(const TowerModel& T, const GammaElem& g, const KxElem& a) {
    GammaElem gi = T.gamma().inv(g);
    OKElem gpi = T.apply(gi, T.pi());
    OKElem c = T.div_pi_exact(gpi, 1);
    OKElem u = T.apply(gi, a.u);
    if (a.v != 0) {
        int64_t muord = T.R().res_units();
        int64_t ce = T.teich_exp(c); // c is a Teichmüller unit
        int64_t vv = ((a.v % muord) + muord) % muord;
        u = T.mul(u, T.teich(ce * vv % muord));
    }
    return {a.v, u};
}
} // namespace

void Cocycle::verify() const {
    const TowerModel& T = *T_;
    const auto& G = T.gamma();
    auto elems = G.elements();
    for (auto& s : elems) {
        auto& a1 = tab_.at({G.id(), s});
        auto& a2 = tab_.at({s, G.id()});
        if (!(a1.v == 0 && a1.u == T.one() && a2.v == 0 && a2.u == T.one()))
            throw CocycleInvalid("cocycle not normalized");
    }
    for (auto& s : elems)
        for (auto& t : elems)
            for (auto& u : elems) {
                KxElem lhs = raw_mul(T, tab_.at({G.mul(s, t), u}),
                                     raw_twist(T, u, tab_.at({s, t})));
                KxElem rhs = raw_mul(T, tab_.at({s, G.mul(t, u)}), tab_.at({t, u}));
                if (!(lhs.v == rhs.v && lhs.u == rhs.u))
                    throw CocycleInvalid("cocycle identity fails");
            }
    for (auto& s : elems) {
        if (s.is_identity() || G.mul(s, s) != G.id()) continue;
        auto& a = tab_.at({s, s});
        KxElem tw = raw_twist(T, s, a);
        if (!(tw.v == a.v && tw.u == a.u))
            throw CocycleInvalid("alpha(s,s) not s-fixed for an involution");
    }
}

std::string Cocycle::kind_name() const {
    switch (kind_) {
        case Kind::Trivial: return "trivial";
        case Kind::CyclicFundamental: return "cyclic-fundamental";
        case Kind::RandomValid: return "random-valid";
    }
    return "?";
}

const KxElem& Cocycle::at(const GammaElem& s, const GammaElem& t) const {
    return tab_.at({s, t});
}

Cocycle Cocycle::trivial(const TowerModel& T) {
    Cocycle c(T, Kind::Trivial);
    KxElem one{0, T.one()};
    for (auto& s : T.gamma().elements())
        for (auto& t : T.gamma().elements()) c.tab_[{s, t}] = one;
    return c;
}

namespace {

// membership in N_{K/F}(K^x) modulo 1+p_F^2, for the fundamental-class search
class NormBox {
public:
    explicit NormBox(const TowerModel& T) : T_(&T) {
        const auto& par = T.params();
        trunc_ = (int)par.e * 2; // 1 + p_F^2 at varpi-level
        auto all = T.gamma().elements();
        // unit-norm subgroup generators
        std::vector<OKElem> gens;
        gens.push_back(cls(T.norm_subgroup(all, T.teich(1))));
        Subfield K = T.subfield("K");
        auto basis = T.subfield_res_basis(K);
        for (int j = 1; j <= 2 * (int)par.e + 1; ++j)
            for (int64_t b : basis) {
                OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(T.pi(), j)));
                gens.push_back(cls(T.norm_subgroup(all, g)));
            }
        subgroup_ = {cls(T.one())};
        std::unordered_map<OKElem, int, OKElemHash> seen;
        seen[subgroup_[0]] = 1;
        for (size_t h = 0; h < subgroup_.size(); ++h)
            for (auto& g : gens) {
                OKElem z = cls(T.mul(subgroup_[h], g));
                if (!seen.count(z)) {
                    seen[z] = 1;
                    subgroup_.push_back(z);
                }
            }
        member_ = std::move(seen);
        // N(varpi_K) = p^{f} * w
        OKElem npi = T.norm_subgroup(all, T.pi());
        f_rel_ = par.f;
        OKElem w = T.div_pi_exact(npi, (int)(par.e * par.f));
        w = T.mul(w, T.pow(T.teich(T.omega_exp()), par.f));
        w_ = w;
    }

    // x = p^v * u in F^x
    bool member(int64_t v, const OKElem& u) const {
        if (v % f_rel_ != 0) return false;
        int64_t k = v / f_rel_;
        OKElem z = u;
        if (k > 0) z = T_->mul(z, T_->unit_inv(T_->pow(w_, k)));
        if (k < 0) z = T_->mul(z, T_->pow(w_, -k));
        return member_.count(cls(z)) > 0;
    }

    // multiplicative order of the class of a = p^va * ua in F^x / N(K^x)
    int64_t class_order(int64_t va, const OKElem& ua, int64_t bound) const {
        int64_t v = 0;
        OKElem u = T_->one();
        for (int64_t j = 1; j <= bound; ++j) {
            v += va;
            u = T_->mul(u, ua);
            if (member(v, u)) return j;
        }
        return bound + 1;
    }

private:
    const TowerModel* T_;
    int trunc_;
    int64_t f_rel_;
    OKElem w_;
    std::vector<OKElem> subgroup_;
    std::unordered_map<OKElem, int, OKElemHash> member_;
    OKElem cls(const OKElem& x) const { return T_->truncate(x, trunc_); }
};

} // namespace

Cocycle Cocycle::cyclic_fundamental(const TowerModel& T) {
    const auto& G = T.gamma();
    int64_t N = G.order();
    GammaElem gen{-1, -1};
    for (auto& g : G.elements())
        if (G.order_of(g) == N) { gen = g; break; }
    if (gen.a < 0)
        throw FundamentalClassUnsupported(
            "fundamental-class cocycle implemented for cyclic Gamma only");

    NormBox nb(T);
    // candidates: varpi_F * teich, then pure Teichmüller units
    int64_t va = -1;
    OKElem ua;
    auto Fexps = T.subfield_teich_exps(T.subfield("F"));
    for (int pass = 0; pass < 2 && va < 0; ++pass)
        for (int64_t k : Fexps) {
            int64_t v = (pass == 0) ? 1 : 0;
            OKElem u = T.teich(k);
            if (nb.class_order(v, u, 2 * N) == N) {
                va = v;
                ua = u;
                break;
            }
        }
    if (va < 0)
        throw FundamentalClassUnsupported("no generator of F^x/N(K^x) found");

    // a as an element of K^x: p = varpi^e * omega^{-1}
    KxElem a{va * (int64_t)T.params().e,
             T.mul(ua, T.pow(T.teich((T.R().res_units() - T.omega_exp()) %
                                     T.R().res_units()),
                             va))};

    Cocycle c(T, Kind::CyclicFundamental);
    // exponent of each element w.r.t. the generator
    std::map<GammaElem, int64_t> expo;
    GammaElem cur = G.id();
    for (int64_t i = 0; i < N; ++i) {
        expo[cur] = i;
        cur = G.mul(cur, gen);
    }
    KxElem one{0, T.one()};
    KxElem aval = a;
    for (auto& s : G.elements())
        for (auto& t : G.elements())
            c.tab_[{s, t}] = (expo[s] + expo[t] >= N) ? aval : one;
    return c;
}

Cocycle Cocycle::random_valid(const TowerModel& T, uint64_t seed) {
    std::mt19937_64 rng(seed * 2654435761ull + 88172645463325252ull);
    const auto& G = T.gamma();
    int64_t muord = T.R().res_units();
    Subfield K = T.subfield("K");
    auto basis = T.subfield_res_basis(K);

    std::map<GammaElem, KxElem> b;
    for (auto& g : G.elements()) {
        if (g.is_identity()) {
            b[g] = {0, T.one()};
            continue;
        }
        int64_t v = (int64_t)(rng() % 2);
        OKElem u = T.teich((int64_t)(rng() % muord));
        for (int rep = 0; rep < 2; ++rep) {
            int j = 1 + (int)(rng() % 3);
            int64_t be = basis[rng() % basis.size()];
            OKElem lay = T.add(T.one(), T.mul(T.teich(be), T.pow(T.pi(), j)));
            u = T.mul(u, T.pow(lay, (int64_t)(rng() % 3)));
        }
        b[g] = {v, u};
    }

    Cocycle c(T, Kind::RandomValid);
    for (auto& s : G.elements())
        for (auto& t : G.elements()) {
            KxElem val = raw_mul(T, raw_twist(T, t, b[s]), b[t]);
            val = raw_mul(T, val, raw_inv(T, b[G.mul(s, t)]));
            c.tab_[{s, t}] = val;
        }

    // optionally multiply by a class inflated from the unramified cyclic
    // quotient Gamma/<delta> (values in F^x, Gamma-fixed)
    if (T.params().f > 1 && (rng() & 1)) {
        int64_t f = T.params().f;
        KxElem aval{(int64_t)T.params().e,
                    T.teich((muord - T.omega_exp()) % muord)};
        for (auto& s : G.elements())
            for (auto& t : G.elements())
                if (s.b + t.b >= f)
                    c.tab_[{s, t}] = raw_mul(T, c.tab_[{s, t}], aval);
    }
    return c;
}

// ---------------------------------------------------------------------------

void ClassFunc::add(const GammaElem& s, const KCharKey& k, const Cyclo& c,
                    const std::vector<GammaElem>& mono) {
    auto& slot = terms[s];
    auto it = slot.find(k);
    if (it == slot.end()) {
        if (!c.is_zero()) slot[k] = Term{c, mono};
    } else {
        it->second.coeff += c;
        if (it->second.coeff.is_zero()) slot.erase(it);
    }
}

ClassFunc ClassFunc::plus(const ClassFunc& o) const {
    ClassFunc r = *this;
    for (auto& [s, m] : o.terms)
        for (auto& [k, t] : m) r.add(s, k, t.coeff, t.mono);
    r.prune();
    return r;
}

void ClassFunc::prune() {
    for (auto it = terms.begin(); it != terms.end();) {
        for (auto jt = it->second.begin(); jt != it->second.end();)
            jt = jt->second.coeff.is_zero() ? it->second.erase(jt) : std::next(jt);
        it = it->second.empty() ? terms.erase(it) : std::next(it);
    }
}

bool ClassFunc::equal(const ClassFunc& o) const {
    ClassFunc a = *this, b = o;
    a.prune();
    b.prune();
    if (a.terms.size() != b.terms.size()) return false;
    for (auto& [s, m] : a.terms) {
        auto it = b.terms.find(s);
        if (it == b.terms.end() || it->second.size() != m.size()) return false;
        for (auto& [k, t] : m) {
            auto jt = it->second.find(k);
            if (jt == it->second.end() || !(jt->second.coeff == t.coeff))
                return false;
        }
    }
    return true;
}

std::string ClassFunc::describe_mismatch(const ClassFunc& o) const {
    ClassFunc a = *this, b = o;
    a.prune();
    b.prune();
    std::ostringstream os;
    for (auto& [s, m] : a.terms)
        for (auto& [k, t] : m) {
            auto it = b.terms.find(s);
            const Cyclo* other = nullptr;
            if (it != b.terms.end()) {
                auto jt = it->second.find(k);
                if (jt != it->second.end()) other = &jt->second.coeff;
            }
            if (!other || !(*other == t.coeff)) {
                os << "slice (delta^" << s.a << " rho^" << s.b
                   << "): lhs coeff " << t.coeff.str() << " vs rhs "
                   << (other ? other->str() : std::string("0"));
                return os.str();
            }
        }
    for (auto& [s, m] : b.terms)
        for (auto& [k, t] : m) {
            auto it = a.terms.find(s);
            if (it == a.terms.end() || !it->second.count(k)) {
                os << "slice (delta^" << s.a << " rho^" << s.b
                   << "): rhs-only coeff " << t.coeff.str();
                return os.str();
            }
        }
    return "no mismatch";
}

Cyclo ClassFunc::degree() const {
    Cyclo d;
    auto it = terms.find(GammaElem{0, 0});
    if (it == terms.end()) return d;
    for (auto& [k, t] : it->second) d += t.coeff;
    return d;
}

// ---------------------------------------------------------------------------

WeilQuotient::WeilQuotient(const TowerModel& T, const ThetaFamily& fam,
                           const ThetaFamily::Theta& th, const Cocycle& al)
    : T_(&T), fam_(&fam), th_(th), al_(al) {
    const auto& par = T.params();
    gamma_elems_ = T.gamma().elements();
    // abelian Gamma is what the sigma-slice representation supports
    for (auto& a : gamma_elems_)
        for (auto& b : gamma_elems_)
            if (T.gamma().mul(a, b) != T.gamma().mul(b, a))
                throw std::runtime_error("WeilQuotient: Gamma must be abelian");

    // Gamma-stable M: s = lcm(2, e, ord of the varpi-twist units)
    int64_t s = lcm64(2, par.e);
    int64_t muord = T.R().res_units();
    cgam_.resize(gamma_elems_.size());
    for (size_t i = 0; i < gamma_elems_.size(); ++i) {
        OKElem gpi = T.apply(gamma_elems_[i], T.pi());
        cgam_[i] = T.div_pi_exact(gpi, 1);
        int64_t ce = T.teich_exp(cgam_[i]);
        int64_t ord = muord / gcd64(ce == 0 ? muord : ce, muord);
        if (ce != 0) s = lcm64(s, ord);
    }
    s_ = s;
    t_ = (int)par.e * (par.r - 1) + 2;
    trunc_ = t_;
    if (trunc_ > T.Nw()) throw PrecisionTooSmall("WeilQuotient: t exceeds precision");

    Subfield K = T.subfield("K");
    auto basis = T.subfield_res_basis(K);
    unit_gens_.push_back(T.truncate(T.teich(1), trunc_));
    gen_depth_.push_back(0);
    for (int j = 1; j < t_; ++j)
        for (int64_t b : basis) {
            OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(T.pi(), j)));
            unit_gens_.push_back(T.truncate(g, trunc_));
            gen_depth_.push_back(j);
        }
}

int WeilQuotient::gamma_index(const GammaElem& g) const {
    for (size_t i = 0; i < gamma_elems_.size(); ++i)
        if (gamma_elems_[i] == g) return (int)i;
    throw std::runtime_error("gamma_index: not found");
}

int64_t WeilQuotient::kx_size() const {
    const auto& par = T_->params();
    int64_t units = i64pow(par.qf(), t_ - 1) * (par.qf() - 1);
    return s_ * units;
}

KxElem WeilQuotient::kx_mul(const KxElem& a, const KxElem& b) const {
    return {(a.v + b.v) % s_, T_->truncate(T_->mul(a.u, b.u), trunc_)};
}

KxElem WeilQuotient::kx_inv(const KxElem& a) const {
    return {((s_ - a.v) % s_ + s_) % s_, T_->truncate(T_->unit_inv(a.u), trunc_)};
}

KxElem WeilQuotient::kx_of(const OKElem& x) const {
    int v = T_->val(x);
    OKElem u = v ? T_->div_pi_exact(x, v) : x;
    return {((v % s_) + s_) % s_, T_->truncate(u, trunc_)};
}

KxElem WeilQuotient::kx_apply(const GammaElem& g, const KxElem& x) const {
    OKElem u = T_->apply(g, x.u);
    if (x.v != 0) {
        int64_t muord = T_->R().res_units();
        int64_t ce = T_->teich_exp(cgam_[gamma_index(g)]);
        if (ce) {
            int64_t vv = ((x.v % muord) + muord) % muord;
            u = T_->mul(u, T_->teich(ce * vv % muord));
        }
    }
    return {x.v, T_->truncate(u, trunc_)};
}

KxElem WeilQuotient::kx_twist(const GammaElem& g, const KxElem& x) const {
    return kx_apply(T_->gamma().inv(g), x);
}

RootU WeilQuotient::vt_of(const KxElem& x) const {
    RootU r = fam_->vartheta_tilde(th_, x.u);
    if (x.v % s_) {
        RootU vp = fam_->vartheta_tilde(th_, T_->pi());
        r = r * vp.pow(((x.v % s_) + s_) % s_);
    }
    return r;
}

WeilQuotient::GElem WeilQuotient::gmul(const GElem& a, const GElem& b) const {
    KxElem al_ab = al_.at(a.s, b.s);
    KxElem x = kx_mul(kx_of_raw_helper(al_ab), kx_twist(b.s, a.x));
    x = kx_mul(x, b.x);
    return {T_->gamma().mul(a.s, b.s), x};
}

// normalize a raw cocycle value into the quotient
KxElem WeilQuotient::kx_of_raw_helper(const KxElem& raw) const {
    return {((raw.v % s_) + s_) % s_, T_->truncate(raw.u, trunc_)};
}

KCharKey WeilQuotient::key_of_mono(const std::vector<GammaElem>& mono) const {
    KCharKey k;
    k.on_pi = RootU::one();
    KxElem pic{1 % s_, T_->truncate(T_->one(), trunc_)};
    for (auto& g : mono) k.on_pi = k.on_pi * vt_of(kx_apply(g, pic));
    k.on_units.resize(unit_gens_.size(), RootU::one());
    for (size_t i = 0; i < unit_gens_.size(); ++i) {
        KxElem u{0, unit_gens_[i]};
        RootU v = RootU::one();
        for (auto& g : mono) v = v * vt_of(kx_apply(g, u));
        k.on_units[i] = v;
    }
    return k;
}

RootU WeilQuotient::mono_value(const std::vector<GammaElem>& mono,
                               const KxElem& x) const {
    RootU v = RootU::one();
    for (auto& g : mono) v = v * vt_of(kx_apply(g, x));
    return v;
}

ClassFunc WeilQuotient::ind_vartheta() const {
    ClassFunc F;
    for (auto& g : gamma_elems_) {
        std::vector<GammaElem> mono{g};
        F.add(T_->gamma().id(), key_of_mono(mono), Cyclo(Rat(1)), mono);
    }
    return F;
}

ClassFunc WeilQuotient::wedge_square(const ClassFunc& phi1) const {
    ClassFunc F;
    const auto& G = T_->gamma();
    auto id = G.id();
    // sigma = 1: (chi^2 - chi(g^2)) / 2
    auto it = phi1.terms.find(id);
    if (it != phi1.terms.end()) {
        for (auto& [k1, t1] : it->second)
            for (auto& [k2, t2] : it->second) {
                std::vector<GammaElem> mono = t1.mono;
                mono.insert(mono.end(), t2.mono.begin(), t2.mono.end());
                F.add(id, k1.mul(k2), t1.coeff * t2.coeff * Rat(1, 2), mono);
            }
    }
    for (auto& s : gamma_elems_) {
        if (G.mul(s, s) != id) continue;
        // chi_{phi_1}((s,x)^2) with (s,x)^2 = (1, alpha(s,s) * s^{-1}(x) * x)
        KxElem ass = kx_of_raw_helper(al_.at(s, s));
        GammaElem si = G.inv(s);
        for (auto& g : gamma_elems_) {
            Cyclo c = Cyclo::from_rootu(vt_of(kx_apply(g, ass))) * Rat(-1, 2);
            std::vector<GammaElem> mono{G.mul(g, si), g};
            F.add(s, key_of_mono(mono), c, mono);
        }
    }
    F.prune();
    return F;
}

ClassFunc WeilQuotient::reg_minus_tau() const {
    ClassFunc F;
    int64_t n = T_->params().n();
    std::vector<GammaElem> empty;
    F.add(T_->gamma().id(), key_of_mono(empty), Cyclo(Rat(n)), empty);
    F.add(T_->tau(), key_of_mono(empty), Cyclo(Rat(-n)), empty);
    return F;
}

ClassFunc WeilQuotient::ind_vartheta_gamma(const GammaElem& g) const {
    ClassFunc F;
    const auto& G = T_->gamma();
    for (auto& a : gamma_elems_) {
        GammaElem ai = G.inv(a);
        std::vector<GammaElem> mono{ai, G.mul(g, ai)};
        F.add(G.id(), key_of_mono(mono), Cyclo(Rat(1)), mono);
    }
    return F;
}

ClassFunc WeilQuotient::ind_to_quadratic(const GammaElem& g) const {
    ClassFunc F;
    const auto& G = T_->gamma();
    for (auto& a : {G.id(), g}) {
        std::vector<GammaElem> mono{G.inv(a)};
        F.add(G.id(), key_of_mono(mono), Cyclo(Rat(1)), mono);
    }
    return F;
}

ClassFunc WeilQuotient::induce_through(const GammaElem& g, const ClassFunc& inner) const {
    const auto& G = T_->gamma();
    // coset representatives of <g> in Gamma
    std::vector<GammaElem> reps;
    for (auto& a : gamma_elems_) {
        bool seen = false;
        for (auto& r : reps) {
            GammaElem d = G.mul(G.inv(r), a);
            if (d == G.id() || d == g) { seen = true; break; }
        }
        if (!seen) reps.push_back(a);
    }
    ClassFunc F;
    for (auto& [sig, slice] : inner.terms) {
        for (auto& a : reps) {
            // conj of (sig, x) by (a, 1) = (sig, C * twist(a, x)), Gamma abelian
            KxElem A = kx_of_raw_helper(al_.at(G.inv(a), a));
            KxElem z = kx_apply(a, kx_inv(A));
            KxElem C = kx_of_raw_helper(al_.at(G.inv(a), G.mul(sig, a)));
            C = kx_mul(C, kx_twist(G.mul(sig, a), z));
            C = kx_mul(C, kx_of_raw_helper(al_.at(sig, a)));
            GammaElem ai = G.inv(a);
            for (auto& [k, t] : slice) {
                RootU cv = mono_value(t.mono, C);
                std::vector<GammaElem> mono;
                mono.reserve(t.mono.size());
                for (auto& m : t.mono) mono.push_back(G.mul(m, ai));
                F.add(sig, key_of_mono(mono), t.coeff * Cyclo::from_rootu(cv), mono);
            }
        }
    }
    F.prune();
    return F;
}

ClassFunc WeilQuotient::ind_chi_gamma(const GammaElem& g) const {
    const auto& G = T_->gamma();
    // chi_g on <g> x K^x/M: (sig, y) -> sign(sig) vt(alpha(sig,g) y^{1+g})
    ClassFunc inner;
    for (auto& sig : {G.id(), g}) {
        Cyclo sgn(Rat(sig == g ? -1 : 1));
        KxElem asg = kx_of_raw_helper(al_.at(sig, g));
        std::vector<GammaElem> mono{G.id(), g};
        inner.add(sig, key_of_mono(mono), sgn * Cyclo::from_rootu(vt_of(asg)), mono);
    }
    return induce_through(g, inner);
}

ClassFunc WeilQuotient::adjoint() const {
    ClassFunc phi1 = ind_vartheta();
    return wedge_square(phi1).plus(phi1);
}

WeilQuotient::DecompositionReport WeilQuotient::verify_wedge_decomposition() const {
    const auto& G = T_->gamma();
    ClassFunc lhs = wedge_square(ind_vartheta());
    ClassFunc rhs = reg_minus_tau();
    // pairs {g, g^{-1}} with g^2 != 1
    std::vector<GammaElem> pair_reps;
    for (auto& g : gamma_elems_) {
        if (G.mul(g, g) == G.id()) continue;
        GammaElem gi = G.inv(g);
        if (gi < g) continue;
        pair_reps.push_back(g);
    }
    for (auto& g : pair_reps) rhs = rhs.plus(ind_vartheta_gamma(g));
    for (auto& g : G.involutions())
        if (!g.is_identity() && g != T_->tau()) rhs = rhs.plus(ind_chi_gamma(g));
    DecompositionReport rep;
    rep.equal = lhs.equal(rhs);
    if (!rep.equal) rep.mismatch = lhs.describe_mismatch(rhs);
    return rep;
}

Cyclo WeilQuotient::inner_product(const ClassFunc& a, const ClassFunc& b) const {
    Cyclo total;
    for (auto& [s, m] : a.terms) {
        auto it = b.terms.find(s);
        if (it == b.terms.end()) continue;
        for (auto& [k, t] : m) {
            auto jt = it->second.find(k);
            if (jt == it->second.end()) continue;
            total += t.coeff * jt->second.coeff.conj();
        }
    }
    return total * Rat(1, (long)T_->gamma().order());
}

WeilQuotient::FSResult WeilQuotient::fs_indicator(const Nu& nu) const {
    const auto& G = T_->gamma();
    // nu as a character of K^x/M on the generator list
    KCharKey nuk;
    nuk.on_pi = nu.on_pi;
    nuk.on_units.resize(unit_gens_.size(), RootU::one());
    if (nu.unit_parity) {
        for (size_t i = 0; i < unit_gens_.size(); ++i)
            if (gen_depth_[i] == 0)
                nuk.on_units[i] =
                    (T_->teich_exp(unit_gens_[i]) % 2) ? RootU::minus_one()
                                                       : RootU::one();
    }
    // validity: nu((s,x)(t,y)) = nu(s,x)nu(t,y)
    auto nu_of_kx = [&](const KxElem& x) {
        RootU r = nuk.on_pi.pow(x.v);
        if (nu.unit_parity) r = r * ((T_->teich_exp(x.u) % 2) ? RootU::minus_one() : RootU::one());
        return r;
    };
    for (auto& s : gamma_elems_)
        for (auto& t : gamma_elems_) {
            RootU lhs = nu.on_gamma[gamma_index(G.mul(s, t))] *
                        nu_of_kx(kx_of_raw_helper(al_.at(s, t)));
            RootU rhs = nu.on_gamma[gamma_index(s)] * nu.on_gamma[gamma_index(t)];
            if (lhs != rhs)
                throw std::invalid_argument("fs_indicator: nu is not a character of G");
        }

    // precondition nu * chi = chi on the sigma = 1 slice
    ClassFunc phi1 = ind_vartheta();
    {
        auto it = phi1.terms.find(G.id());
        std::vector<KCharKey> keys, keys2;
        for (auto& [k, t] : it->second) {
            keys.push_back(k);
            keys2.push_back(k.mul(nuk));
        }
        std::sort(keys.begin(), keys.end());
        std::sort(keys2.begin(), keys2.end());
        if (!(keys == keys2)) return {true, Cyclo()};
    }

    // (1/|Gamma|) sum_{s^2=1} nu(s) sum_gamma vt(gamma(alpha(s,s))) [psi nu trivial]
    Cyclo total;
    for (auto& s : gamma_elems_) {
        if (G.mul(s, s) != G.id()) continue;
        KxElem ass = kx_of_raw_helper(al_.at(s, s));
        GammaElem si = G.inv(s);
        for (auto& g : gamma_elems_) {
            std::vector<GammaElem> mono{G.mul(g, si), g};
            KCharKey k = key_of_mono(mono).mul(nuk);
            if (!k.is_trivial()) continue;
            total += Cyclo::from_rootu(nu.on_gamma[gamma_index(s)] *
                                       vt_of(kx_apply(g, ass)));
        }
    }
    return {false, total * Rat(1, (long)G.order())};
}

std::string WeilQuotient::LFactor::str() const {
    std::ostringstream os;
    os << "P(T) = ";
    bool first = true;
    for (size_t i = 0; i < poly.size(); ++i) {
        if (poly[i].is_zero()) continue;
        if (!first) os << " + ";
        os << poly[i].str();
        if (i == 1) os << "*T";
        if (i > 1) os << "*T^" << i;
        first = false;
    }
    return os.str();
}

WeilQuotient::LFactor WeilQuotient::l_factor_adjoint() const {
    const auto& G = T_->gamma();
    ClassFunc ad = adjoint();
    int64_t e = T_->params().e;

    auto unit_trivial = [&](const KCharKey& k) {
        for (size_t i = 0; i < k.on_units.size(); ++i)
            if (!k.on_units[i].is_one()) return false;
        return true;
    };

    // trace of Frob^k composed with the inertia projector
    // Frobenius lift: degree-one element of the quotient
    GElem fr{G.rho(1), kx_one()};
    if (T_->params().f == 1) {
        int64_t muord = T_->R().res_units();
        fr = GElem{G.id(), kx_of_raw_helper(KxElem{
                              (int64_t)T_->params().e,
                              T_->teich((muord - T_->omega_exp()) % muord)})};
    }
    auto power_sum = [&](int k) {
        GElem cur{G.id(), kx_one()};
        for (int i = 0; i < k; ++i) cur = gmul(fr, cur);
        Cyclo s;
        for (int64_t j = 0; j < e; ++j) {
            GElem h{G.delta(j), kx_one()};
            GElem P = gmul(cur, h);
            auto it = ad.terms.find(P.s);
            if (it == ad.terms.end()) continue;
            for (auto& [key, t] : it->second) {
                if (!unit_trivial(key)) continue;
                // psi is trivial on units, so psi(P.x) = on_pi^{v}
                s += t.coeff * Cyclo::from_rootu(key.on_pi.pow(P.x.v));
            }
        }
        return s * Rat(1, (long)e);
    };

    Cyclo dimfix_c = power_sum(0);
    assert(dimfix_c.is_rational());
    Rat dimfix = dimfix_c.rat_value();
    assert(dimfix.is_integer());
    int dim = (int)std::stoll(dimfix.num().get_str());

    LFactor lf;
    lf.dim_fixed = dim;
    lf.poly.assign(1, Rat(1));
    if (dim == 0) return lf;

    std::vector<Cyclo> s_k(dim + 1);
    for (int k = 1; k <= dim; ++k) s_k[k] = power_sum(k);
    // Newton: e_k = (1/k) sum_{i=1}^k (-1)^{i-1} e_{k-i} s_i
    std::vector<Cyclo> ek(dim + 1);
    ek[0] = Cyclo(Rat(1));
    for (int k = 1; k <= dim; ++k) {
        Cyclo acc;
        for (int i = 1; i <= k; ++i) {
            Cyclo term = ek[k - i] * s_k[i];
            acc += (i % 2 == 1) ? term : term * Rat(-1);
        }
        ek[k] = acc * Rat(1, k);
    }
    lf.poly.resize(dim + 1);
    for (int k = 0; k <= dim; ++k) {
        Cyclo c = ek[k] * Rat((k % 2 == 0) ? 1 : -1);
        assert(c.is_rational());
        lf.poly[k] = c.rat_value();
    }
    return lf;
}

Rat WeilQuotient::artin_conductor_filtration() const {
    const auto& G = T_->gamma();
    ClassFunc ad = adjoint();
    int64_t e = T_->params().e;
    Cyclo deg = ad.degree();
    assert(deg.is_rational());
    Rat dimV = deg.rat_value();

    // dim of inertia-fixed vectors (from the L-factor machinery)
    LFactor lf = l_factor_adjoint();
    Rat codim0 = dimV - Rat(lf.dim_fixed);

    auto trivial_from_depth = [&](const KCharKey& k, int depth) {
        for (size_t i = 0; i < k.on_units.size(); ++i)
            if (gen_depth_[i] >= depth && !k.on_units[i].is_one()) return false;
        return true;
    };

    Rat acc = codim0;
    auto it = ad.terms.find(G.id());
    for (int k = 1; k < t_; ++k) {
        Cyclo fixed;
        if (it != ad.terms.end())
            for (auto& [key, t] : it->second)
                if (trivial_from_depth(key, k)) fixed += t.coeff;
        assert(fixed.is_rational());
        acc += (dimV - fixed.rat_value()) * Rat(1, (long)e);
    }
    if (!acc.is_integer())
        throw NonIntegerConductor("artin conductor came out non-integral: " + acc.str());
    return acc;
}

// ---------------------------------------------------------------------------

bool WeilQuotient::enumerable(int64_t limit) const {
    return (int64_t)T_->gamma().order() * kx_size() <= limit;
}

Cyclo WeilQuotient::eval_classfunc(const ClassFunc& F, const GElem& g) const {
    auto it = F.terms.find(g.s);
    Cyclo v;
    if (it == F.terms.end()) return v;
    for (auto& [k, t] : it->second)
        v += t.coeff * Cyclo::from_rootu(mono_value(t.mono, g.x));
    return v;
}

WeilQuotient::EnumReport WeilQuotient::verify_wedge_decomposition_enumerated(bool parallel) const {
    const auto& G = T_->gamma();
    Subfield K = T_->subfield("K");
    std::vector<OKElem> units = T_->subfield_units(K, t_);
    std::unordered_map<OKElem, int, OKElemHash> uidx;
    for (size_t i = 0; i < units.size(); ++i) uidx[units[i]] = (int)i;

    int ng = (int)gamma_elems_.size();
    // per-gamma tables: P_g = vt(g(varpi-class)), T_g[u] = vt(g(u))
    std::vector<RootU> Pg(ng);
    std::vector<std::vector<RootU>> Tg(ng, std::vector<RootU>(units.size()));
    for (int gi = 0; gi < ng; ++gi) {
        Pg[gi] = vt_of(kx_apply(gamma_elems_[gi], KxElem{1 % s_, T_->truncate(T_->one(), trunc_)}));
        for (size_t ui = 0; ui < units.size(); ++ui)
            Tg[gi][ui] = fam_->vartheta_tilde(th_, T_->apply(gamma_elems_[gi], units[ui]));
    }
    auto vt_at = [&](int gi, int64_t v, int ui) {
        return Pg[gi].pow(v) * Tg[gi][ui];
    };
    // group-index helpers
    std::vector<std::vector<int>> gmul_tab(ng, std::vector<int>(ng));
    std::vector<int> ginv_tab(ng);
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j)
            gmul_tab[i][j] = gamma_index(G.mul(gamma_elems_[i], gamma_elems_[j]));
        ginv_tab[i] = gamma_index(G.inv(gamma_elems_[i]));
    }
    int id_idx = gamma_index(G.id());
    int tau_idx = gamma_index(T_->tau());
    int64_t n = T_->params().n();

    // involutions and pair representatives
    std::vector<int> invol;
    for (auto& h : G.involutions())
        if (!h.is_identity() && h != T_->tau()) invol.push_back(gamma_index(h));
    std::vector<int> pairs;
    for (auto& g : gamma_elems_) {
        if (G.mul(g, g) == G.id()) continue;
        if (G.inv(g) < g) continue;
        pairs.push_back(gamma_index(g));
    }
    // constants for the pi_gamma pieces: for sig in {1, g}: per coset rep a
    struct PiPiece {
        int g;
        std::vector<int> reps;                       // rep indices
        std::vector<std::array<RootU, 2>> conj_const; // per rep: const at sig=1, sig=g
        std::vector<std::array<KxElem, 2>> Cs;        // the C elements
    };
    std::vector<PiPiece> pip;
    for (int giv : invol) {
        PiPiece P;
        P.g = giv;
        GammaElem g = gamma_elems_[giv];
        std::vector<GammaElem> reps;
        for (auto& a : gamma_elems_) {
            bool seen = false;
            for (auto& r : reps) {
                GammaElem d = G.mul(G.inv(r), a);
                if (d == G.id() || d == g) { seen = true; break; }
            }
            if (!seen) reps.push_back(a);
        }
        for (auto& a : reps) {
            P.reps.push_back(gamma_index(a));
            KxElem A = kx_of_raw_helper(al_.at(G.inv(a), a));
            KxElem z = kx_apply(a, kx_inv(A));
            std::array<RootU, 2> cc;
            std::array<KxElem, 2> Cst;
            int slot = 0;
            for (auto& sig : {G.id(), g}) {
                KxElem C = kx_of_raw_helper(al_.at(G.inv(a), G.mul(sig, a)));
                C = kx_mul(C, kx_twist(G.mul(sig, a), z));
                C = kx_mul(C, kx_of_raw_helper(al_.at(sig, a)));
                KxElem asg = kx_of_raw_helper(al_.at(sig, g));
                // chi_g(sig, C * y) = sign * vt(alpha(sig,g)) vt(C) vt(g C) ...
                cc[slot] = vt_of(asg) * vt_of(C) * vt_of(kx_apply(g, C));
                Cst[slot] = C;
                ++slot;
            }
            P.conj_const.push_back(cc);
            P.Cs.push_back(Cst);
        }
        pip.push_back(P);
    }

    std::vector<std::string> mism;
    int64_t checked = 0;
    int nu_count = (int)units.size();

    auto run_range = [&](int lo, int hi, std::vector<std::string>& out) {
        for (int ui = lo; ui < hi; ++ui) {
            for (int64_t v = 0; v < s_; ++v)
                for (int si = 0; si < ng; ++si) {
                    GammaElem s = gamma_elems_[si];
                    GElem g{s, KxElem{v, units[ui]}};
                    bool s2 = G.mul(s, s) == G.id();
                    // LHS: wedge of Ind vartheta
                    Cyclo lhs;
                    if (s2) {
                        GElem g2 = gmul(g, g);
                        int u2 = uidx.at(g2.x.u);
                        CycloBuilder cb;
                        if (si == id_idx) {
                            // (sum_g vt)^2/2 - chi(g^2)/2
                            std::vector<RootU> vals(ng);
                            for (int gi = 0; gi < ng; ++gi)
                                vals[gi] = vt_at(gi, v, ui);
                            for (int i = 0; i < ng; ++i)
                                for (int j = 0; j < ng; ++j)
                                    cb.add(vals[i] * vals[j], Rat(1, 2));
                        }
                        for (int gi = 0; gi < ng; ++gi)
                            cb.add(vt_at(gi, g2.x.v, u2), Rat(-1, 2));
                        lhs = cb.take();
                    }
                    // RHS
                    CycloBuilder rb;
                    if (si == id_idx) rb.add(RootU::one(), Rat(n));
                    if (si == tau_idx) rb.add(RootU::one(), Rat(-n));
                    if (si == id_idx) {
                        for (int pg : pairs)
                            for (int ai = 0; ai < ng; ++ai) {
                                int i1 = ginv_tab[ai];
                                int i2 = gmul_tab[pg][i1];
                                rb.add(vt_at(i1, v, ui) * vt_at(i2, v, ui), Rat(1));
                            }
                    }
                    for (auto& P : pip) {
                        int slot = -1;
                        if (si == id_idx) slot = 0;
                        if (si == P.g) slot = 1;
                        if (slot < 0) continue;
                        Rat sgn(slot == 0 ? 1 : -1);
                        for (size_t ri = 0; ri < P.reps.size(); ++ri) {
                            int ai = P.reps[ri];
                            int i1 = ginv_tab[ai];
                            int i2 = gmul_tab[P.g][i1];
                            rb.add(P.conj_const[ri][slot] * vt_at(i1, v, ui) *
                                       vt_at(i2, v, ui),
                                   sgn);
                        }
                    }
                    Cyclo rhs = rb.take();
                    if (!(lhs == rhs)) {
                        std::ostringstream os;
                        os << "mismatch at sigma=(d^" << s.a << " r^" << s.b
                           << "), v=" << v << ", unit#" << ui;
                        out.push_back(os.str());
                        return;
                    }
                }
        }
    };

    if (parallel) {
#ifdef _OPENMP
        int nt = std::max(1, omp_get_max_threads());
#else
        int nt = 1;
#endif
        std::vector<std::vector<std::string>> outs(nt);
#pragma omp parallel for schedule(dynamic)
        for (int b = 0; b < nt; ++b) {
            int lo = (int)((int64_t)nu_count * b / nt);
            int hi = (int)((int64_t)nu_count * (b + 1) / nt);
            run_range(lo, hi, outs[b]);
        }
        for (auto& o : outs) mism.insert(mism.end(), o.begin(), o.end());
    } else {
        run_range(0, nu_count, mism);
    }
    checked = (int64_t)nu_count * s_ * ng;

    EnumReport rep;
    rep.checked = checked;
    rep.equal = mism.empty();
    if (!mism.empty()) rep.mismatch = mism.front();
    return rep;
}

Cyclo WeilQuotient::inner_product_enumerated(const ClassFunc& a, const ClassFunc& b) const {
    Subfield K = T_->subfield("K");
    std::vector<OKElem> units = T_->subfield_units(K, t_);
    Cyclo total;
    for (auto& s : gamma_elems_)
        for (int64_t v = 0; v < s_; ++v)
            for (auto& u : units) {
                GElem g{s, KxElem{v, u}};
                total += eval_classfunc(a, g) * eval_classfunc(b, g).conj();
            }
    int64_t order = (int64_t)gamma_elems_.size() * kx_size();
    return total * Rat(Int(1), Int(order));
}

} // namespace tloc
