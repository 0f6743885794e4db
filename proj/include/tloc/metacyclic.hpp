#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tloc/errors.hpp"
#include "tloc/rat.hpp"

namespace tloc {

// delta^a rho^b in normal form, 0 <= a < e, 0 <= b < f
struct GammaElem {
    int64_t a = 0, b = 0;
    bool operator==(const GammaElem& o) const { return a == o.a && b == o.b; }
    bool operator!=(const GammaElem& o) const { return !(*this == o); }
    bool operator<(const GammaElem& o) const { return b != o.b ? b < o.b : a < o.a; }
    bool is_identity() const { return a == 0 && b == 0; }
};

// Gamma(e,f,q,m) = <delta, rho | delta^e = 1, rho^f = delta^m, rho^-1 delta rho = delta^q>
class MetacyclicGroup {
public:
    MetacyclicGroup(int64_t e, int64_t f, int64_t q, int64_t m)
        : e_(e), f_(f), q_(q), m_(m) {
        if (e < 1 || f < 1 || q < 2) throw InvalidParams("Gamma: bad e,f,q");
        if (mod_pow(q, f, e) != 1 % e)
            throw InvalidParams("Gamma: e does not divide q^f - 1");
        if ((m % e) * ((q - 1) % e) % e != 0)
            throw InvalidParams("Gamma: m(q-1) != 0 mod e");
        if (m < 0 || m >= e) throw InvalidParams("Gamma: m out of range");
        qpow_.resize(f + 1);
        qinv_.resize(f + 1);
        qpow_[0] = 1 % e;
        int64_t qi = inv_mod(q % e == 0 ? 1 : q % e, e); // e=1 degenerate
        qinv_[0] = 1 % e;
        for (int64_t b = 1; b <= f; ++b) {
            qpow_[b] = qpow_[b - 1] * (q % e) % e;
            qinv_[b] = qinv_[b - 1] * qi % e;
        }
    }

    int64_t e() const { return e_; }
    int64_t f() const { return f_; }
    int64_t q() const { return q_; }
    int64_t m() const { return m_; }
    int64_t order() const { return e_ * f_; }

    GammaElem id() const { return {0, 0}; }
    GammaElem delta(int64_t k = 1) const { return {((k % e_) + e_) % e_, 0}; }
    GammaElem rho(int64_t k = 1) const {
        GammaElem r1 = (f_ == 1) ? GammaElem{m_ % e_, 0} : GammaElem{0, 1};
        return pow(r1, k);
    }

    GammaElem mul(const GammaElem& x, const GammaElem& y) const {
        // delta^a rho^b delta^c rho^d = delta^{a + c q^{-b}} rho^{b+d}
        int64_t a = (x.a + y.a % e_ * qinv_[x.b]) % e_;
        int64_t bt = x.b + y.b;
        int64_t b = bt % f_, t = bt / f_;
        if (t) a = (a + m_ % e_ * t % e_ * qinv_[b]) % e_;
        return {a, b};
    }

    GammaElem inv(const GammaElem& x) const {
        if (x == id()) return id();
        GammaElem p = x, prev = id();
        while (!(p == id())) { prev = p; p = mul(p, x); }
        return prev;
    }

    GammaElem pow(const GammaElem& x, int64_t k) const {
        if (k < 0) return pow(inv(x), -k);
        GammaElem r = id(), b = x;
        while (k > 0) {
            if (k & 1) r = mul(r, b);
            b = mul(b, b);
            k >>= 1;
        }
        return r;
    }

    int64_t order_of(const GammaElem& x) const {
        int64_t n = 1;
        GammaElem p = x;
        while (!(p == id())) { p = mul(p, x); ++n; }
        return n;
    }

    int64_t ord_rho_formula() const { return f_ * (e_ / gcd64(e_, m_ == 0 ? e_ : m_)); }

    std::vector<GammaElem> elements() const {
        std::vector<GammaElem> out;
        for (int64_t b = 0; b < f_; ++b)
            for (int64_t a = 0; a < e_; ++a) out.push_back({a, b});
        return out;
    }

    bool is_central(const GammaElem& x) const {
        for (auto& g : elements())
            if (mul(x, g) != mul(g, x)) return false;
        return true;
    }

    // H = {gamma : gamma^2 = 1}, by brute force
    std::vector<GammaElem> involutions() const {
        std::vector<GammaElem> H;
        for (auto& g : elements())
            if (mul(g, g) == id()) H.push_back(g);
        return H;
    }

    // The case table describes H when the group arises as a tame Galois
    // group with the K_+-structure of the construction.  For f even that
    // forces e | q^{f/2} - 1 and makes the mixed involutions commute with
    // rho; outside this range (e.g. semidihedral (8,2,3,0) or (4,2,3,2))
    // the table does not apply.
    bool involution_table_applies() const {
        if ((e_ * f_) % 2 == 1) return false;
        if (f_ % 2 == 1) return true;
        if (mod_pow(q_, f_ / 2, e_) != 1 % e_) return false;
        for (int64_t a = 0; a < e_; ++a) {
            if ((2 * a + m_) % e_ != 0) continue;
            if ((a * (q_ - 1)) % e_ != 0) return false;
        }
        return true;
    }

    struct InvolutionTable {
        std::vector<GammaElem> H;
        std::string label;
    };
    InvolutionTable involution_table() const {
        InvolutionTable t;
        t.H.push_back(id());
        if ((e_ * f_) % 2 == 1) { t.label = "odd order"; return t; }
        auto dpow = [&](int64_t k) { return GammaElem{((k % e_) + e_) % e_, 0}; };
        if (f_ % 2 == 1 || (e_ % 2 == 0 && m_ % 2 == 1)) {
            t.H.push_back(dpow(e_ / 2));
            t.label = "f odd, or e even and m odd";
        } else if (e_ % 2 == 1 && m_ % 2 == 0) {
            t.H.push_back(mul(GammaElem{0, f_ / 2}, dpow(-m_ / 2)));
            t.label = "e odd, m even";
        } else if (e_ % 2 == 1 && m_ % 2 == 1) {
            t.H.push_back(mul(GammaElem{0, f_ / 2}, dpow((e_ - m_) / 2)));
            t.label = "e odd, m odd";
        } else {
            t.H.push_back(dpow(e_ / 2));
            t.H.push_back(mul(GammaElem{0, f_ / 2}, dpow(-m_ / 2)));
            t.H.push_back(mul(GammaElem{0, f_ / 2}, dpow((e_ - m_) / 2)));
            t.label = "f, e, m all even";
        }
        return t;
    }

    std::vector<GammaElem> subgroup(const std::vector<GammaElem>& gens) const {
        std::vector<GammaElem> out{id()};
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto& g : gens)
                for (size_t i = 0; i < out.size(); ++i) {
                    GammaElem z = mul(out[i], g);
                    bool seen = false;
                    for (auto& w : out)
                        if (w == z) { seen = true; break; }
                    if (!seen) { out.push_back(z); grew = true; }
                }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool in_inertia(const GammaElem& g) const { return g.b == 0; }

private:
    int64_t e_, f_, q_, m_;
    std::vector<int64_t> qpow_, qinv_;
};

// Fixed field data of a subgroup S: K^S = L between F and K.
struct SubfieldInfo {
    std::string name;
    std::vector<GammaElem> subgroup;
    int64_t e_KL, f_KL;   // of K/L
    int64_t e_LF, f_LF;   // of L/F
    bool quadratic_over;  // [K:L] == 2
    bool ramified_KL;     // meaningful for quadratic (and general: e_KL > 1)
};

inline SubfieldInfo make_subfield(const MetacyclicGroup& G, const std::string& name,
                                  const std::vector<GammaElem>& gens) {
    SubfieldInfo s;
    s.name = name;
    s.subgroup = G.subgroup(gens);
    int64_t inertia = 0;
    for (auto& g : s.subgroup)
        if (G.in_inertia(g)) ++inertia;
    s.e_KL = inertia;
    s.f_KL = (int64_t)s.subgroup.size() / inertia;
    s.e_LF = G.e() / s.e_KL;
    s.f_LF = G.f() / s.f_KL;
    s.quadratic_over = s.subgroup.size() == 2;
    s.ramified_KL = s.e_KL > 1;
    return s;
}

// Lattice of the fields the verification needs. For |H| = 4 this is the
// seven-field diagram; for |H| = 2 the chain K, K_+, K_0, F.
std::vector<SubfieldInfo> subfield_lattice(const MetacyclicGroup& G, const GammaElem& tau);

} // namespace tloc
