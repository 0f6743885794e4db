#include "doctest.h"

#include "tloc/localfactors.hpp"

using namespace tloc;

namespace {
TowerParams instA() { return {3, 1, 2, 1, 0, 4, TauKind::TotallyRamified}; }
TowerParams instB() { return {3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }
TowerParams instC() { return {3, 1, 2, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }

struct Setup {
    TowerModel T;
    ThetaFamily fam;
    FactorEngine eng;
    explicit Setup(const TowerParams& p)
        : T(TowerModel::realize(p)), fam(T), eng(T) {}
};
Setup& setupA() {
    static Setup s(instA());
    return s;
}
Setup& setupB() {
    static Setup s(instB());
    return s;
}
Setup& setupC() {
    static Setup s(instC());
    return s;
}

LChar legendre_of(const TowerModel& T, const Subfield& L) {
    int64_t muord = T.R().res_units();
    auto exps = T.subfield_teich_exps(L);
    int64_t sz = (int64_t)exps.size();
    int64_t gen = 0;
    for (int64_t k : exps)
        if (k != 0 && muord / gcd64(k, muord) == sz) { gen = k; break; }
    std::unordered_map<int64_t, int> par;
    int64_t cur = 0;
    for (int64_t j = 0; j < sz; ++j) {
        par[cur] = (int)(j % 2);
        cur = (cur + gen) % muord;
    }
    LChar c;
    c.cond = 1;
    const TowerModel* Tp = &T;
    c.on_units = [Tp, par](const OKElem& u) {
        return par.at(Tp->teich_exp(Tp->teich_part(u))) ? RootU::minus_one()
                                                        : RootU::one();
    };
    return c;
}
} // namespace

TEST_CASE("quadratic Gauss sum over Q_3") {
    auto& S = setupA();
    Subfield F = S.T.subfield("F");
    LChar leg = legendre_of(S.T, F);
    // G(legendre, +/- 1/3): values +/- i, modulus one
    Cyclo gp = S.eng.gauss_sum(F, leg, S.T.one(), 1);
    Cyclo gm = S.eng.gauss_sum(F, leg, S.T.neg(S.T.one()), 1);
    CHECK(gp.abs_square() == Cyclo(Rat(1)));
    CHECK(gp == Cyclo::zeta(4, 1)); // 3^{-1/2}(zeta_3 - zeta_3^2) = i
    CHECK(gm == Cyclo::zeta(4, 3));
    CHECK(gp * gm == Cyclo(Rat(1)));
    // wrong valuation rejected; unramified character rejected
    CHECK_THROWS_AS(S.eng.gauss_sum(F, leg, S.T.one(), 2), WrongValuation);
    LChar triv;
    triv.on_units = [](const OKElem&) { return RootU::one(); };
    CHECK_THROWS_AS(S.eng.gauss_sum(F, triv, S.T.one(), 1), WrongValuation);
}

TEST_CASE("depth-2 Gauss sum brute force, and reduced = direct") {
    auto& S = setupA();
    Subfield F = S.T.subfield("F");
    // chi of conductor 2 over Q_3: extend legendre by a depth-2 layer value
    LChar leg = legendre_of(S.T, F);
    const TowerModel* Tp = &S.T;
    auto leg_u = leg.on_units;
    LChar chi2;
    chi2.on_units = [Tp, leg_u](const OKElem& u) {
        // chi(u) = legendre(teich) * psi-type on the 1-unit part:
        // u = t(1+3x) -> zeta_3^{x mod 3}
        OKElem t = Tp->teich_part(u);
        OKElem rest = Tp->mul(u, Tp->unit_inv(t));
        OKElem num = Tp->sub(rest, Tp->one());
        OKElem x;
        for (size_t i = 0; i < num.c.size(); ++i)
            x.c.push_back(Tp->R().divide_exact(num.c[i], 3));
        return leg_u(u) * Tp->psi_frac(x, 1);
    };
    int64_t f = S.eng.conductor(F, chi2);
    CHECK(f == 2);
    Cyclo g = S.eng.gauss_sum(F, chi2, S.T.neg(S.T.one()), 2);
    CHECK(g.abs_square() == Cyclo(Rat(1)));
    // brute-force 6-term sum
    CycloBuilder cb;
    for (auto& t : S.T.subfield_units(F, 2)) {
        // psi(-t/9) with t as integer representative
        int64_t ti = t.c[0].c[0];
        cb.add(chi2.on_units(t).inv() * RootU(((-ti % 9) + 9) % 9, 9));
    }
    CHECK(g == cb.take() * Cyclo(Rat(1, 3)));
}

TEST_CASE("vartheta Gauss sums: reduced equals direct") {
    {
        auto& S = setupA();
        Subfield K = S.T.subfield("K");
        LChar vt = S.eng.vartheta_char(S.fam, S.fam.theta(1));
        int64_t f = S.eng.conductor(K, vt);
        REQUIRE(f == 6);
        Cyclo fast = S.eng.gauss_sum(K, vt, S.T.one(), 1 + f);
        Cyclo slow = S.eng.gauss_sum(K, vt, S.T.one(), 1 + f, true);
        CHECK(fast == slow);
    }
    {
        auto& S = setupB();
        Subfield K = S.T.subfield("K");
        LChar vt = S.eng.vartheta_char(S.fam, S.fam.theta(2));
        int64_t f = S.eng.conductor(K, vt);
        REQUIRE(f == 4);
        Cyclo fast = S.eng.gauss_sum(K, vt, S.T.neg(S.T.one()), f);
        Cyclo slow = S.eng.gauss_sum(K, vt, S.T.neg(S.T.one()), f, true);
        CHECK(fast == slow);
    }
}

TEST_CASE("epsilon of unramified character is 1 over F") {
    auto& S = setupA();
    Subfield F = S.T.subfield("F");
    LChar un;
    un.on_units = [](const OKElem&) { return RootU::one(); };
    un.on_pi = RootU(1, 4); // value i at p: still unramified
    CHECK(S.eng.epsilon_abelian(F, un) == Cyclo(Rat(1)));
}

TEST_CASE("epsilon scaling law eps(chi, psi_a)/eps(chi, psi) = chi(a)|a|^{-1}") {
    auto& S = setupA();
    Subfield F = S.T.subfield("F");
    LChar leg = legendre_of(S.T, F);
    leg.on_pi = RootU::minus_one();
    Cyclo base = S.eng.epsilon_abelian(F, leg);
    for (auto [va, ue] : std::vector<std::pair<int64_t, int64_t>>{
             {1, 0}, {2, 1}, {0, 1}}) {
        OKElem ua = S.T.teich(ue == 0 ? 0 : S.T.R().res_units() / 2); // 1 or -1
        Cyclo scaled = S.eng.epsilon_abelian_scaled(F, leg, va, ua, Rat(1));
        Cyclo chia = Cyclo::from_rootu(leg.on_pi.pow(va) * leg.on_units(ua));
        Cyclo want = base * chia * Rat(i64pow(3, va));
        CHECK(scaled == want);
    }
    // measure scaling multiplies by r^{dim}
    Cyclo r2 = S.eng.epsilon_abelian_scaled(F, leg, 0, S.T.one(), Rat(7, 2));
    CHECK(r2 == base * Rat(7, 2));
}

TEST_CASE("lambda closed forms vs inductive route (criterion 7 core)") {
    // A: K/F ramified quadratic
    {
        auto& S = setupA();
        Subfield K = S.T.subfield("K");
        Subfield F = S.T.subfield("F");
        Cyclo closed = S.eng.lambda_closed(K);
        Cyclo ind = S.eng.lambda_inductive(K, F);
        CHECK(closed == ind);
        // lambda(ram quad)^2 = (-1)^{(q-1)/2} = -1 for q = 3
        CHECK(closed * closed == Cyclo(Rat(-1)));
        // chain rule route agrees (K_0 = F here)
        CHECK(S.eng.lambda_chain(K) == closed);
    }
    // B: K/F unramified quadratic: lambda = 1
    {
        auto& S = setupB();
        Subfield K = S.T.subfield("K");
        Subfield F = S.T.subfield("F");
        Cyclo closed = S.eng.lambda_closed(K);
        CHECK(closed == Cyclo(Rat(1)));
        CHECK(S.eng.lambda_inductive(K, F) == closed);
    }
    // C: biquadratic K/F and its three quadratic subextensions
    {
        auto& S = setupC();
        Subfield F = S.T.subfield("F");
        Subfield K = S.T.subfield("K");
        Cyclo lamK_closed = S.eng.lambda_closed(K);
        Cyclo lamK_ind = S.eng.lambda_inductive(K, F);
        Cyclo lamK_u2 = S.eng.lambda_unram_quadratic(K);
        CHECK(lamK_closed == lamK_ind);
        CHECK(lamK_closed == lamK_u2);
        CHECK(lamK_closed == Cyclo(Rat(1))); // -(-1)^{(3-1)/2} = +1
        CHECK(S.eng.lambda_chain(K) == lamK_closed);

        Subfield Kp = S.T.subfield("K+");
        Subfield K0 = S.T.subfield("K0");
        Subfield Kt = S.T.subfield("Kgamma", S.T.gamma().mul(S.T.gamma().delta(1), S.T.tau()));
        for (auto* L : {&Kp, &K0, &Kt}) {
            Cyclo c1 = S.eng.lambda_closed(*L);
            Cyclo c2 = S.eng.lambda_inductive(*L, F);
            CHECK(c1 == c2);
        }
        CHECK(S.eng.lambda_closed(K0) == Cyclo(Rat(1)));
        // ratio identity: lambda(K_tau'/F) / lambda(K_+/F) = -1 for e/2 odd
        Cyclo ratio = S.eng.lambda_closed(Kt) * S.eng.lambda_closed(Kp).inv();
        CHECK(ratio == Cyclo(Rat(-1)));
    }
}

TEST_CASE("Fröhlich-Queyrut identity for every admissible theta (A, B, C)") {
    for (Setup* S : {&setupA(), &setupB(), &setupC()}) {
        for (int64_t k = 0; k < S->fam.count(); ++k) {
            auto rep = S->eng.frohlich_queyrut(S->fam, S->fam.theta(k));
            REQUIRE(rep.applicable);
            CHECK(rep.holds);
            // both sides equal vartheta(-1)
            RootU vm1 = S->fam.c().at_minus_one() * S->fam.theta_minus_one(S->fam.theta(k));
            CHECK(rep.rhs == Cyclo::from_rootu(vm1));
        }
    }
}

TEST_CASE("epsilon of vartheta-tilde matches the closed form") {
    // eps(vt, psi_K) = vartheta(-1) q^{f(e-1+f(vt))/2}
    for (Setup* S : {&setupA(), &setupB(), &setupC()}) {
        const auto& par = S->T.params();
        Subfield K = S->T.subfield("K");
        auto th = S->fam.theta(S->fam.count() - 1);
        LChar vt = S->eng.vartheta_char(S->fam, th);
        Cyclo eps = S->eng.epsilon_abelian(K, vt);
        RootU vm1 = S->fam.c().at_minus_one() * S->fam.theta_minus_one(th);
        int64_t f = S->eng.conductor(K, vt);
        Cyclo want = Cyclo::from_rootu(vm1) *
                     Cyclo::half_power(par.p, par.f0 * (int)par.f, par.e - 1 + f);
        CHECK(eps == want);
    }
}

TEST_CASE("adjoint assembly: conductors, w, L (instances A, B, C)") {
    struct Want {
        Setup* S;
        int64_t a;
    };
    for (auto [S, a] : {Want{&setupA(), 8}, Want{&setupB(), 8}, Want{&setupC(), 32}}) {
        Cocycle co = Cocycle::trivial(S->T);
        auto th = S->fam.theta(0);
        AdjointFactors af(S->T, S->fam, th, co);
        auto rep = af.report();
        CHECK(rep.a == a);
        CHECK(rep.a_route_filtration == Rat(a));
        CHECK(rep.a_route_sum == Rat(a));
        CHECK(rep.unimodular);
        CHECK_MESSAGE(rep.w_match, "w = ", rep.w.str(), " vs closed ",
                      rep.w_closed.str());
        CHECK(rep.L_match);
    }
}

TEST_CASE("instance A: w = theta(-1), eps-assembly value") {
    auto& S = setupA();
    for (int64_t k : {0LL, 4LL, 17LL}) {
        auto th = S.fam.theta(k);
        AdjointFactors af(S.T, S.fam, th, Cocycle::trivial(S.T));
        auto rep = af.report();
        // w = -vartheta(-1) = theta(-1) since c(-1) = -1
        Cyclo tm1 = Cyclo::from_rootu(S.fam.theta_minus_one(th));
        CHECK(rep.w == tm1);
    }
}

TEST_CASE("gamma magnitudes: |gamma|^2") {
    // A: |gamma| = 81 -> 6561; B: 243/2 -> 59049/4
    {
        AdjointFactors af(setupA().T, setupA().fam, setupA().fam.theta(0),
                          Cocycle::trivial(setupA().T));
        CHECK(af.gamma_abs_squared() == Rat(6561));
    }
    {
        AdjointFactors af(setupB().T, setupB().fam, setupB().fam.theta(0),
                          Cocycle::trivial(setupB().T));
        CHECK(af.gamma_abs_squared() == Rat(59049, 4));
    }
}

TEST_CASE("principal parameter") {
    auto P1 = principal_parameter(1, 3);
    CHECK(P1.weights == std::vector<int>{1});
    CHECK(P1.gamma0 == Rat(9, 4));
    CHECK(P1.eps == Rat(3));
    auto P2 = principal_parameter(2, 3);
    CHECK(P2.weights == std::vector<int>{1, 3});
    // gamma0 = 81 (1-1/3)(1-1/27) / ((1-1/9)(1-1/81))
    Rat want = Rat(81) * (Rat(1) - Rat(1, 3)) * (Rat(1) - Rat(1, 27)) /
               ((Rat(1) - Rat(1, 9)) * (Rat(1) - Rat(1, 81)));
    CHECK(P2.gamma0 == want);
    auto P25 = principal_parameter(2, 5);
    CHECK(P25.eps == Rat(Int(625)));
}

TEST_CASE("sym tensor structures") {
    for (int n : {1, 2, 3, 4}) {
        SymTensor S = SymTensor::build(n);
        // form values: zero unless k + l = n + 2, value (-1)^{k-1} up to the
        // overall symmetry sign
        for (int k = 1; k <= n + 1; ++k)
            for (int l = 1; l <= n + 1; ++l) {
                if (k + l != n + 2) {
                    CHECK(S.form[k - 1][l - 1].is_zero());
                } else {
                    CHECK(!S.form[k - 1][l - 1].is_zero());
                }
            }
        // symmetry sign (-1)^n
        for (int k = 0; k <= n; ++k)
            for (int l = 0; l <= n; ++l)
                CHECK(S.form[k][l] == S.form[l][k] * Rat((n % 2) ? -1 : 1));
        // invariance under generators, exact
        auto check_inv = [&](const std::array<Rat, 4>& g) {
            auto M = SymTensor::matrix_of(n, g);
            int N = n + 1;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    Rat s(0);
                    for (int a = 0; a < N; ++a)
                        for (int b = 0; b < N; ++b)
                            s += M[a][i] * S.form[a][b] * M[b][j];
                    CHECK(s == S.form[i][j]);
                }
        };
        check_inv({Rat(1), Rat(1), Rat(0), Rat(1)});   // upper unipotent
        check_inv({Rat(0), Rat(1), Rat(-1), Rat(0)});  // Weyl element
        check_inv({Rat(5), Rat(0), Rat(0), Rat(1, 5)}); // torus
    }
    // n = 1: symplectic 2x2
    SymTensor S1 = SymTensor::build(1);
    CHECK(S1.form[0][1] == Rat(-1));
    CHECK(S1.form[1][0] == Rat(1));
}
