#include "tloc/tower.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace tloc {

void TowerParams::validate() const {
    if (p < 3 || !is_prime_small(p)) throw InvalidParams("p must be an odd prime");
    if (f0 < 1 || e < 1 || f < 1) throw InvalidParams("bad f0/e/f");
    if ((e * f) % 2 != 0) throw InvalidParams("e*f = 2n must be even");
    if (r < 2) throw InvalidParams("r >= 2 required");
    int64_t Q = qf();
    if ((Q - 1) % e != 0)
        throw InvalidParams("tame inertia needs e | q^f - 1");
    if (m < 0 || m >= e || (m * (q() - 1)) % e != 0)
        throw InvalidParams("need 0 <= m < e and m(q-1) = 0 mod e");
    if (tau_kind == TauKind::TotallyRamified && f != 1)
        throw InvalidParams("totally ramified case needs f = 1");
    if (tau_kind == TauKind::UnramifiedOverKPlus && f % 2 != 0)
        throw InvalidParams("unramified K/K+ needs f even");
}

std::string TowerParams::canonical_key(int precision) const {
    std::ostringstream os;
    os << "p=" << p << "\nf0=" << f0 << "\ne=" << e << "\nf=" << f
       << "\nm=" << m << "\nr=" << r
       << "\ntau=" << (totally_ramified() ? "ram" : "unram")
       << "\nprec=" << precision << "\n";
    return os.str();
}

namespace {
inline TowerAuto compose(const TowerAuto& A, const TowerAuto& B, int64_t muord,
                         int64_t p, int d) {
    // A after B
    TowerAuto C;
    C.frob = (A.frob + B.frob) % d;
    int64_t pj = 1;
    for (int i = 0; i < A.frob; ++i) pj = pj * (p % muord) % muord;
    C.uexp = (A.uexp + B.uexp % muord * pj) % muord;
    return C;
}
} // namespace

TowerModel TowerModel::realize(const TowerParams& par, int precision) {
    par.validate();
    int need = (int)par.e * (par.r + 1);
    if (precision < 0) precision = need;
    if (precision < (int)par.e * par.r + (int)par.e)
        throw PrecisionTooSmall("precision must be at least e*r + e varpi-digits");
    int Mp = (precision + par.e - 1) / par.e;

    TowerModel t(par, Mp);
    const auto& R = t.R_;
    int d = R.d();
    int64_t muord = R.res_units(); // q^f - 1
    t.zeta_e_exp_ = muord / par.e;

    // search omega (Teichmüller class) and rho's varpi-twist realizing m
    int frob_rho = (int)((int64_t)par.f0 * (par.f - 1) % d);
    int64_t P = mod_pow(par.p, frob_rho, muord);
    bool found = false;
    for (int64_t w = 0; w < muord && !found; ++w) {
        int64_t rhs = w % muord * ((P - 1 + muord) % muord) % muord;
        for (int64_t u = 0; u < muord && !found; ++u) {
            if ((u * par.e) % muord != rhs) continue;
            TowerAuto D{t.zeta_e_exp_ % muord, 0};
            TowerAuto Rh{u, frob_rho};
            // rho^f must be delta^m
            TowerAuto Rf{0, 0};
            for (int i = 0; i < par.f; ++i) Rf = compose(Rh, Rf, muord, par.p, d);
            if (Rf.frob != 0) continue;
            if (Rf.uexp % t.zeta_e_exp_ != 0) continue;
            int64_t mreal = (Rf.uexp / t.zeta_e_exp_) % par.e;
            if (mreal != par.m) continue;
            // rho^{-1} delta rho = delta^q
            TowerAuto Rinv;
            Rinv.frob = (d - frob_rho) % d;
            int64_t pj = mod_pow(par.p, Rinv.frob, muord);
            Rinv.uexp = (muord - u % muord * pj % muord) % muord;
            TowerAuto lhs = compose(Rinv, compose(D, Rh, muord, par.p, d), muord, par.p, d);
            TowerAuto rhs2{t.zeta_e_exp_ * (par.q() % par.e) % muord, 0};
            if (lhs.frob != rhs2.frob || lhs.uexp != rhs2.uexp) continue;
            t.omega_exp_ = w;
            t.aut_delta_ = D;
            t.aut_rho_ = Rh;
            found = true;
        }
    }
    if (!found)
        throw Unrealizable("no Teichmüller class omega realizes the requested m");
    t.omega_ = R.teich_pow(t.omega_exp_);

    // choose tau
    if (par.totally_ramified()) {
        t.tau_ = t.G_.delta(par.e / 2);
    } else {
        auto H = t.G_.involutions();
        GammaElem pick{-1, -1};
        GammaElem pref = par.m % 2 == 0
            ? t.G_.mul(GammaElem{0, par.f / 2}, t.G_.delta(-(par.m / 2)))
            : t.G_.mul(GammaElem{0, par.f / 2}, t.G_.delta((par.e - par.m) / 2));
        for (auto& h : H)
            if (h == pref) pick = h;
        if (pick.a < 0) {
            for (auto& h : H)
                if (!h.is_identity() && h.b != 0) { pick = h; break; }
        }
        if (pick.a < 0) throw Unrealizable("no involution outside inertia");
        t.tau_ = pick;
    }
    t.find_beta();
    return t;
}

OKElem TowerModel::zero() const {
    OKElem z;
    z.c.assign(par_.e, R_.zero());
    return z;
}

OKElem TowerModel::one() const { return from_int(1); }

OKElem TowerModel::from_int(int64_t v) const {
    OKElem z = zero();
    z.c[0] = R_.from_int(v);
    return z;
}

OKElem TowerModel::from_gr(const GRElem& g) const {
    OKElem z = zero();
    z.c[0] = g;
    return z;
}

OKElem TowerModel::pi() const {
    OKElem z = zero();
    if (par_.e == 1) {
        z.c[0] = R_.mul_int(R_.teich_pow(omega_exp_), par_.p);
    } else {
        z.c[1] = R_.one();
    }
    return z;
}

OKElem TowerModel::teich(int64_t k) const { return from_gr(R_.teich_pow(k)); }

OKElem TowerModel::add(const OKElem& a, const OKElem& b) const {
    OKElem z;
    z.c.resize(par_.e);
    for (int64_t i = 0; i < par_.e; ++i) z.c[i] = R_.add(a.c[i], b.c[i]);
    return z;
}

OKElem TowerModel::sub(const OKElem& a, const OKElem& b) const {
    OKElem z;
    z.c.resize(par_.e);
    for (int64_t i = 0; i < par_.e; ++i) z.c[i] = R_.sub(a.c[i], b.c[i]);
    return z;
}

OKElem TowerModel::neg(const OKElem& a) const {
    OKElem z;
    z.c.resize(par_.e);
    for (int64_t i = 0; i < par_.e; ++i) z.c[i] = R_.neg(a.c[i]);
    return z;
}

OKElem TowerModel::mul(const OKElem& a, const OKElem& b) const {
    int64_t e = par_.e;
    std::vector<GRElem> conv(2 * e - 1, R_.zero());
    for (int64_t i = 0; i < e; ++i) {
        if (R_.is_zero(a.c[i])) continue;
        for (int64_t j = 0; j < e; ++j) {
            if (R_.is_zero(b.c[j])) continue;
            conv[i + j] = R_.add(conv[i + j], R_.mul(a.c[i], b.c[j]));
        }
    }
    GRElem pw = R_.mul_int(omega_, par_.p); // varpi^e = p*omega
    OKElem z;
    z.c.assign(conv.begin(), conv.begin() + e);
    for (int64_t k = e; k < 2 * e - 1; ++k)
        z.c[k - e] = R_.add(z.c[k - e], R_.mul(conv[k], pw));
    return z;
}

bool TowerModel::is_zero(const OKElem& a) const {
    for (auto& g : a.c)
        if (!R_.is_zero(g)) return false;
    return true;
}

int TowerModel::val(const OKElem& a) const {
    int best = Nw();
    for (int64_t i = 0; i < par_.e; ++i) {
        if (R_.is_zero(a.c[i])) continue;
        best = std::min(best, (int)(par_.e * R_.vval(a.c[i]) + i));
    }
    return best;
}

OKElem TowerModel::truncate(const OKElem& a, int k) const {
    OKElem z;
    z.c.resize(par_.e);
    for (int64_t i = 0; i < par_.e; ++i) {
        int lvl = (int)((k - i + par_.e - 1) / par_.e); // p-precision for coeff i
        if (lvl < 0) lvl = 0;
        z.c[i] = R_.truncate(a.c[i], lvl);
    }
    return z;
}

OKElem TowerModel::div_pi_exact(const OKElem& a, int k) const {
    OKElem z = a;
    GRElem winv = R_.inv(omega_);
    for (int rep = 0; rep < k; ++rep) {
        OKElem w = zero();
        for (int64_t i = 1; i < par_.e; ++i) w.c[i - 1] = z.c[i];
        // c0 / varpi = c0/(p*omega) * varpi^{e-1}
        GRElem c0p = R_.divide_exact(z.c[0], par_.p);
        w.c[par_.e - 1] = R_.add(w.c[par_.e - 1], R_.mul(c0p, winv));
        z = w;
    }
    return z;
}

OKElem TowerModel::teich_part(const OKElem& a) const {
    return from_gr(R_.teichmuller(a.c[0]));
}

int64_t TowerModel::teich_exp(const OKElem& a) const {
    return R_.teich_index(a.c[0]);
}

OKElem TowerModel::unit_inv(const OKElem& a) const {
    if (!is_unit(a)) throw std::invalid_argument("unit_inv: not a unit");
    OKElem y = from_gr(R_.teich_pow((R_.res_units() - teich_exp(a)) % R_.res_units()));
    int it = 1;
    while ((1 << it) < Nw() + 2) ++it;
    for (int rep = 0; rep <= it; ++rep)
        y = mul(y, sub(from_int(2), mul(a, y)));
    assert(mul(a, y) == one());
    return y;
}

OKElem TowerModel::pow(const OKElem& a, int64_t k) const {
    if (k < 0) return pow(unit_inv(a), -k);
    OKElem r = one(), b = a;
    while (k > 0) {
        if (k & 1) r = mul(r, b);
        b = mul(b, b);
        k >>= 1;
    }
    return r;
}

TowerAuto TowerModel::realize_auto(const GammaElem& g) const {
    int64_t muord = R_.res_units();
    TowerAuto A{0, 0};
    for (int64_t i = 0; i < g.b; ++i) A = compose(aut_rho_, A, muord, par_.p, R_.d());
    for (int64_t i = 0; i < g.a; ++i) A = compose(aut_delta_, A, muord, par_.p, R_.d());
    return A;
}

OKElem TowerModel::apply_auto(const TowerAuto& A, const OKElem& x) const {
    OKElem z;
    z.c.resize(par_.e);
    int64_t muord = R_.res_units();
    for (int64_t i = 0; i < par_.e; ++i) {
        GRElem g = R_.frob(x.c[i], A.frob);
        if (A.uexp)
            g = R_.mul(g, R_.teich_pow(A.uexp * i % muord));
        z.c[i] = g;
    }
    return z;
}

OKElem TowerModel::apply(const GammaElem& g, const OKElem& x) const {
    return apply_auto(realize_auto(g), x);
}

OKElem TowerModel::one_minus_tau(const OKElem& x) const {
    OKElem tx = apply(tau_, x);
    int v = val(x);
    assert(val(tx) == v);
    if (v == 0) return mul(x, unit_inv(tx));
    return mul(div_pi_exact(x, v), unit_inv(div_pi_exact(tx, v)));
}

OKElem TowerModel::trace_subgroup(const std::vector<GammaElem>& S, const OKElem& x) const {
    OKElem s = zero();
    for (auto& g : S) s = add(s, apply(g, x));
    return s;
}

OKElem TowerModel::norm_subgroup(const std::vector<GammaElem>& S, const OKElem& x) const {
    OKElem s = one();
    for (auto& g : S) s = mul(s, apply(g, x));
    return s;
}

std::vector<GammaElem> TowerModel::coset_reps(const std::vector<GammaElem>& S) const {
    std::vector<GammaElem> reps;
    for (auto& g : G_.elements()) {
        bool dup = false;
        for (auto& r : reps) {
            // same coset: r^{-1} g in S
            GammaElem d = G_.mul(G_.inv(r), g);
            for (auto& s : S)
                if (s == d) { dup = true; break; }
            if (dup) break;
        }
        if (!dup) reps.push_back(g);
    }
    return reps;
}

Subfield TowerModel::subfield(const std::string& tag,
                              std::optional<GammaElem> gamma_opt) const {
    std::vector<GammaElem> gens;
    auto H = G_.involutions();
    if (tag == "F") gens = {G_.delta(1), G_.rho(1)};
    else if (tag == "K") gens = {};
    else if (tag == "K0") gens = {G_.delta(1)};
    else if (tag == "K+") gens = {tau_};
    else if (tag == "E") {
        if (H.size() != 4) throw UnknownSubfield("E needs |H| = 4");
        gens = {tau_, G_.delta(par_.e / 2)};
    } else if (tag == "E0") {
        if (H.size() != 4) throw UnknownSubfield("E0 needs |H| = 4");
        gens = {tau_, G_.delta(par_.e / 2), G_.delta(1)};
    } else if (tag == "Kgamma") {
        if (!gamma_opt) throw UnknownSubfield("Kgamma needs gamma");
        GammaElem g = *gamma_opt;
        if (g.is_identity() || G_.mul(g, g) != G_.id())
            throw TauNotInvolution("Kgamma: gamma must be an involution");
        gens = {g};
    } else {
        throw UnknownSubfield("unknown subfield tag: " + tag);
    }

    return subfield_custom(tag, gens);
}

Subfield TowerModel::subfield_custom(const std::string& tag,
                                     const std::vector<GammaElem>& gens) const {
    Subfield L;
    L.name = tag;
    L.gal = G_.subgroup(gens);
    int64_t inertia = 0;
    for (auto& g : L.gal)
        if (G_.in_inertia(g)) ++inertia;
    L.e_KL = inertia;
    L.f_KL = (int64_t)L.gal.size() / inertia;
    L.e_LF = par_.e / L.e_KL;
    L.f_LF = par_.f / L.f_KL;
    L.d_abs = L.e_LF - 1;
    L.q_L = i64pow(par_.p, par_.f0 * (int)L.f_LF);

    // uniformizer: Teichmüller twist of varpi^{e_KL} fixed by Gal(K/L)
    int64_t muord = R_.res_units();
    bool ok = false;
    for (int64_t v = 0; v < muord && !ok; ++v) {
        OKElem cand = mul(teich(v), pow(pi(), L.e_KL));
        bool fixed = true;
        for (auto& g : L.gal)
            if (apply(g, cand) != cand) { fixed = false; break; }
        if (fixed) { L.pi = cand; ok = true; }
    }
    if (!ok) throw UnknownSubfield("no Teichmüller-twisted uniformizer for " + tag);
    return L;
}

RootU TowerModel::psi_frac(const OKElem& x, int j) const {
    if (j <= 0) return RootU::one();
    if (j > Mp_) throw PrecisionTooSmall("psi_frac: j exceeds p-precision");
    OKElem tr = trace_subgroup(G_.elements(), x);
    for (int64_t i = 1; i < par_.e; ++i) assert(R_.is_zero(tr.c[i]));
    // now trace F -> Q_p
    GRElem z = tr.c[0];
    GRElem s = R_.zero();
    GRElem w = z;
    for (int i = 0; i < par_.f0; ++i) {
        s = R_.add(s, w);
        w = R_.frob(w);
    }
    for (int i = 1; i < R_.d(); ++i) assert(s.c[i] % i64pow(par_.p, j) == 0);
    int64_t pj = i64pow(par_.p, j);
    return RootU(s.c[0] % pj, pj);
}

RootU TowerModel::psi_frac_subfield(const Subfield& L, const OKElem& x, int j) const {
    if (j <= 0) return RootU::one();
    OKElem tr = trace_subgroup(coset_reps(L.gal), x);
    // tr = T_{L/F}(x) viewed in K; then F -> Q_p
    GRElem z = tr.c[0];
    for (int64_t i = 1; i < par_.e; ++i) assert(R_.is_zero(tr.c[i]));
    GRElem s = R_.zero();
    GRElem w = z;
    for (int i = 0; i < par_.f0; ++i) {
        s = R_.add(s, w);
        w = R_.frob(w);
    }
    int64_t pj = i64pow(par_.p, j);
    for (int i = 1; i < R_.d(); ++i) assert(s.c[i] % pj == 0);
    return RootU(s.c[0] % pj, pj);
}

std::vector<int64_t> TowerModel::subfield_teich_exps(const Subfield& L) const {
    int64_t muord = R_.res_units();
    std::vector<int64_t> out;
    for (int64_t k = 0; k < muord; ++k) {
        bool fixed = true;
        for (auto& g : L.gal) {
            TowerAuto A = realize_auto(g);
            if (k * mod_pow(par_.p, A.frob, muord) % muord != k) { fixed = false; break; }
        }
        if (fixed) out.push_back(k);
    }
    assert((int64_t)out.size() == L.q_L - 1);
    return out;
}

std::vector<int64_t> TowerModel::subfield_res_basis(const Subfield& L) const {
    auto exps = subfield_teich_exps(L);
    int64_t muord = R_.res_units();
    int64_t sub = L.q_L - 1;
    // pick a generator of mu_{q_L - 1}; its powers give an additive basis
    // of the residue field of L over F_p
    int64_t gen = 0;
    for (int64_t k : exps)
        if (k != 0 && muord / gcd64(k, muord) == sub) { gen = k; break; }
    int deg = par_.f0 * (int)L.f_LF;
    std::vector<int64_t> basis;
    for (int i = 0; i < deg; ++i) basis.push_back(gen * i % muord);
    return basis;
}

std::vector<OKElem> TowerModel::subfield_units(const Subfield& L, int j) const {
    int trunc = (int)L.e_KL * j;
    if (trunc > Nw()) throw PrecisionTooSmall("subfield_units: depth too large");
    auto res_basis = subfield_res_basis(L);
    auto exps = subfield_teich_exps(L);
    int64_t sub = L.q_L - 1;
    int64_t muord = R_.res_units();
    // generator of mu_L
    int64_t gen = 0;
    for (int64_t k : exps)
        if (k != 0 && muord / gcd64(k, muord) == sub) { gen = k; break; }
    std::vector<OKElem> gens;
    if (gen) gens.push_back(truncate(teich(gen), trunc));
    for (int i = 1; i < j; ++i)
        for (int64_t b : res_basis) {
            OKElem u = add(one(), mul(teich(b), pow(L.pi, i)));
            gens.push_back(truncate(u, trunc));
        }
    // BFS closure
    std::vector<OKElem> out{truncate(one(), trunc)};
    std::unordered_map<OKElem, int, OKElemHash> seen;
    seen[out[0]] = 0;
    for (size_t head = 0; head < out.size(); ++head) {
        for (auto& g : gens) {
            OKElem z = truncate(mul(out[head], g), trunc);
            if (!seen.count(z)) {
                seen[z] = 1;
                out.push_back(z);
            }
        }
    }
    return out;
}

void TowerModel::find_beta() {
    int64_t muord = R_.res_units();
    if (par_.totally_ramified()) {
        beta_ = pi();
        OKElem tb = apply(tau_, beta_);
        if (tb != neg(beta_)) throw NoSuchGenerator("tau(varpi) != -varpi");
        return;
    }
    // K/K+ unramified: beta = a(1 + v*varpi) with a, v Teichmüller,
    // tau(a) = -a, Frobenius moves a, and v*varpi fixed by tau.
    TowerAuto At = realize_auto(tau_);
    int64_t half = muord / 2;
    for (int64_t ka = 0; ka < muord; ++ka) {
        // tau(xi^ka) = -xi^ka  <=>  ka*p^{frob_tau} = ka + half  (mod muord)
        if (ka * mod_pow(par_.p, At.frob, muord) % muord != (ka + half) % muord)
            continue;
        // residue must move under Frobenius of K0/F when f > 1
        if (par_.f > 1 &&
            ka * mod_pow(par_.p, par_.f0, muord) % muord == ka)
            continue;
        if (par_.e == 1) {
            beta_ = teich(ka);
            return;
        }
        for (int64_t kv = 0; kv < muord; ++kv) {
            OKElem vpi = mul(teich(kv), pi());
            if (apply(tau_, vpi) != vpi) continue;
            beta_ = mul(teich(ka), add(one(), vpi));
            OKElem tb = apply(tau_, beta_);
            if (tb != neg(beta_)) continue;
            return;
        }
    }
    throw NoSuchGenerator("no symplectic generator found");
}

} // namespace tloc
