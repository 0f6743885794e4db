#include "doctest.h"

#include <random>

#include "tloc/weilrep.hpp"

using namespace tloc;

namespace {
TowerParams instA() { return {3, 1, 2, 1, 0, 4, TauKind::TotallyRamified}; }
TowerParams instB() { return {3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }
TowerParams instC() { return {3, 1, 2, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }

struct Setup {
    TowerModel T;
    ThetaFamily fam;
    explicit Setup(const TowerParams& p) : T(TowerModel::realize(p)), fam(T) {}
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
} // namespace

TEST_CASE("cocycles satisfy the 2-cocycle identity") {
    for (Setup* S : {&setupA(), &setupB(), &setupC()}) {
        Cocycle::trivial(S->T).verify();
        Cocycle::random_valid(S->T, 1).verify();
        Cocycle::random_valid(S->T, 2).verify();
    }
    // fundamental class for the cyclic instances
    Cocycle::cyclic_fundamental(setupA().T).verify();
    Cocycle::cyclic_fundamental(setupB().T).verify();
    // non-cyclic Gamma is rejected
    CHECK_THROWS_AS(Cocycle::cyclic_fundamental(setupC().T),
                    FundamentalClassUnsupported);
}

TEST_CASE("fundamental class is nonsplit for the ramified quadratic") {
    // alpha(delta,delta) = a with a not a norm from K^x
    auto& S = setupA();
    Cocycle c = Cocycle::cyclic_fundamental(S.T);
    GammaElem d = S.T.gamma().delta(1);
    const KxElem& a = c.at(d, d);
    QuadSymbol sym(S.T, S.T.subfield("F"), S.T.subfield("K"));
    OKElem ring = S.T.mul(S.T.pow(S.T.pi(), a.v), a.u);
    CHECK(sym.eval(ring) == -1);
}

TEST_CASE("wedge decomposition: instance A under all providers") {
    auto& S = setupA();
    auto th = S.fam.theta(0);
    std::vector<Cocycle> cs;
    cs.push_back(Cocycle::trivial(S.T));
    cs.push_back(Cocycle::cyclic_fundamental(S.T));
    for (uint64_t seed = 1; seed <= 5; ++seed)
        cs.push_back(Cocycle::random_valid(S.T, seed));
    for (auto& c : cs) {
        WeilQuotient W(S.T, S.fam, th, c);
        auto rep = W.verify_wedge_decomposition();
        CHECK_MESSAGE(rep.equal, c.kind_name(), ": ", rep.mismatch);
    }
}

TEST_CASE("wedge decomposition: every admissible theta on instance A") {
    auto& S = setupA();
    Cocycle c = Cocycle::trivial(S.T);
    for (int64_t k = 0; k < S.fam.count(); ++k) {
        WeilQuotient W(S.T, S.fam, S.fam.theta(k), c);
        CHECK(W.verify_wedge_decomposition().equal);
    }
}

TEST_CASE("wedge decomposition enumerated reference matches (instance A)") {
    auto& S = setupA();
    auto th = S.fam.theta(3);
    for (auto c : {Cocycle::trivial(S.T), Cocycle::random_valid(S.T, 7)}) {
        WeilQuotient W(S.T, S.fam, th, c);
        REQUIRE(W.enumerable());
        auto ser = W.verify_wedge_decomposition_enumerated(false);
        CHECK(ser.equal);
        CHECK(ser.checked == (int64_t)S.T.gamma().order() * W.kx_size());
        auto par = W.verify_wedge_decomposition_enumerated(true);
        CHECK(par.equal);
        CHECK(par.checked == ser.checked);
    }
}

TEST_CASE("wedge square values and degree") {
    auto& S = setupA();
    auto th = S.fam.theta(1);
    Cocycle c = Cocycle::random_valid(S.T, 11);
    WeilQuotient W(S.T, S.fam, th, c);
    ClassFunc wedge = W.wedge_square(W.ind_vartheta());
    int64_t n = S.T.params().n();
    // degree n(2n-1)
    CHECK(wedge.degree() == Cyclo(Rat(n * (2 * n - 1))));
    // value -n on the (tau, x) slice
    WeilQuotient::GElem g{S.T.tau(), KxElem{0, S.T.truncate(S.T.one(), W.t_depth())}};
    CHECK(W.eval_classfunc(wedge, g) == Cyclo(Rat(-n)));
    // adjoint degree n(2n+1)
    CHECK(W.adjoint().degree() == Cyclo(Rat(n * (2 * n + 1))));
}

TEST_CASE("irreducibility: <Ind vt, Ind vt> = 1 on all instances and thetas") {
    for (Setup* S : {&setupA(), &setupB(), &setupC()}) {
        Cocycle c = Cocycle::trivial(S->T);
        for (int64_t k = 0; k < S->fam.count(); ++k) {
            WeilQuotient W(S->T, S->fam, S->fam.theta(k), c);
            ClassFunc phi1 = W.ind_vartheta();
            CHECK(W.inner_product(phi1, phi1) == Cyclo(Rat(1)));
        }
    }
}

TEST_CASE("inner products: enumerated agreement and regular rep") {
    auto& S = setupA();
    auto th = S.fam.theta(2);
    Cocycle c = Cocycle::trivial(S.T);
    WeilQuotient W(S.T, S.fam, th, c);
    ClassFunc phi1 = W.ind_vartheta();
    CHECK(W.inner_product_enumerated(phi1, phi1) == Cyclo(Rat(1)));
    // <R_Gamma, 1> = 1
    ClassFunc reg, one;
    std::vector<GammaElem> empty;
    KCharKey triv;
    triv.on_pi = RootU::one();
    triv.on_units.assign(W.unit_gens_count(), RootU::one());
    reg.add(S.T.gamma().id(), triv, Cyclo(Rat(S.T.gamma().order())), empty);
    for (auto& g : S.T.gamma().elements()) one.add(g, triv, Cyclo(Rat(1)), empty);
    CHECK(W.inner_product(reg, one) == Cyclo(Rat(1)));
}

TEST_CASE("induction is transitive through quadratic subgroups") {
    auto& S = setupC();
    auto th = S.fam.theta(5);
    Cocycle c = Cocycle::random_valid(S.T, 3);
    WeilQuotient W(S.T, S.fam, th, c);
    for (auto& g : S.T.gamma().involutions()) {
        if (g.is_identity()) continue;
        ClassFunc two_step = W.induce_through(g, W.ind_to_quadratic(g));
        CHECK(two_step.equal(W.ind_vartheta()));
    }
}

TEST_CASE("wedge decomposition: instances B and C, multiple providers") {
    {
        auto& S = setupB();
        auto th = S.fam.theta(1);
        for (auto c : {Cocycle::trivial(S.T), Cocycle::cyclic_fundamental(S.T),
                       Cocycle::random_valid(S.T, 1), Cocycle::random_valid(S.T, 2)}) {
            WeilQuotient W(S.T, S.fam, th, c);
            CHECK(W.verify_wedge_decomposition().equal);
        }
    }
    {
        auto& S = setupC();
        auto th = S.fam.theta(17);
        for (uint64_t seed = 1; seed <= 5; ++seed) {
            Cocycle c = Cocycle::random_valid(S.T, seed);
            WeilQuotient W(S.T, S.fam, th, c);
            auto rep = W.verify_wedge_decomposition();
            CHECK_MESSAGE(rep.equal, rep.mismatch);
        }
        WeilQuotient W(S.T, S.fam, th, Cocycle::trivial(S.T));
        CHECK(W.verify_wedge_decomposition().equal);
        // Pi_3 pieces present: two involutions besides 1, tau
        int extra = 0;
        for (auto& g : S.T.gamma().involutions())
            if (!g.is_identity() && g != S.T.tau()) ++extra;
        CHECK(extra == 2);
    }
}

TEST_CASE("frobenius-schur indicator cases") {
    auto& S = setupA();
    auto th = S.fam.theta(4);
    Cocycle c = Cocycle::trivial(S.T);
    WeilQuotient W(S.T, S.fam, th, c);
    int ng = (int)S.T.gamma().order();

    WeilQuotient::Nu nu1;
    nu1.on_gamma.assign(ng, RootU::one());
    auto r1 = W.fs_indicator(nu1);
    CHECK(!r1.no_form);
    CHECK(r1.value == Cyclo(Rat(1)));

    // nu(tau) = -1, trivial on K^x: Gamma = Z/2 here, sign character
    WeilQuotient::Nu nu2;
    nu2.on_gamma.assign(ng, RootU::one());
    for (int i = 0; i < ng; ++i)
        if (S.T.gamma().elements()[i] == S.T.tau())
            nu2.on_gamma[i] = RootU::minus_one();
    auto r2 = W.fs_indicator(nu2);
    CHECK(!r2.no_form);
    CHECK(r2.value == Cyclo(Rat(-1)));

    // nu nontrivial on units: nu * chi != chi -> NoForm
    WeilQuotient::Nu nu3;
    nu3.on_gamma.assign(ng, RootU::one());
    nu3.unit_parity = 1;
    auto r3 = W.fs_indicator(nu3);
    CHECK(r3.no_form);
}

TEST_CASE("class functions are constant on conjugacy classes") {
    auto& S = setupC();
    auto th = S.fam.theta(23);
    Cocycle c = Cocycle::random_valid(S.T, 13);
    WeilQuotient W(S.T, S.fam, th, c);
    ClassFunc ad = W.adjoint();
    std::mt19937_64 rng(77);
    auto elems = S.T.gamma().elements();
    for (int t0 = 0; t0 < 12; ++t0) {
        // random group element and a random conjugator
        OKElem u = S.T.teich((int64_t)(rng() % S.T.R().res_units()));
        for (int rep = 0; rep < 2; ++rep) {
            OKElem lay = S.T.add(S.T.one(),
                                 S.T.mul(S.T.teich((int64_t)(rng() % 8)),
                                         S.T.pow(S.T.pi(), 1 + (int)(rng() % 3))));
            u = S.T.mul(u, lay);
        }
        WeilQuotient::GElem g{elems[rng() % elems.size()],
                              KxElem{(int64_t)(rng() % W.s_ord()),
                                     S.T.truncate(u, W.t_depth())}};
        WeilQuotient::GElem h{elems[rng() % elems.size()],
                              KxElem{(int64_t)(rng() % W.s_ord()),
                                     S.T.truncate(S.T.one(), W.t_depth())}};
        // h^{-1} g h via the group law: solve h * x = g * h
        // i.e. evaluate at both g and the conjugate and compare values
        WeilQuotient::GElem gh = W.gmul(g, h);
        // find x with h*x = gh by brute inversion of the K-part
        // simpler: conj = h^{-1} (g h); build h^{-1} explicitly
        KxElem hi_x = W.kx_inv(W.kx_twist(S.T.gamma().inv(h.s), h.x));
        WeilQuotient::GElem hinv{S.T.gamma().inv(h.s), hi_x};
        // fix the cocycle part: h * hinv should be the identity; correct by it
        WeilQuotient::GElem idc = W.gmul(h, hinv);
        REQUIRE(idc.s.is_identity());
        hinv.x = W.kx_mul(hinv.x, W.kx_inv(idc.x));
        WeilQuotient::GElem conj = W.gmul(hinv, gh);
        CHECK(W.eval_classfunc(ad, g) == W.eval_classfunc(ad, conj));
    }
}

TEST_CASE("L factor of the adjoint") {
    {
        auto& S = setupA();
        WeilQuotient W(S.T, S.fam, S.fam.theta(0), Cocycle::trivial(S.T));
        auto lf = W.l_factor_adjoint();
        CHECK(lf.dim_fixed == 0);
        CHECK(lf.poly == std::vector<Rat>{Rat(1)});
    }
    {
        auto& S = setupB();
        for (auto c : {Cocycle::trivial(S.T), Cocycle::random_valid(S.T, 9)}) {
            WeilQuotient W(S.T, S.fam, S.fam.theta(0), c);
            auto lf = W.l_factor_adjoint();
            CHECK(lf.dim_fixed == 1); // f_+ = 1
            CHECK(lf.poly == std::vector<Rat>{Rat(1), Rat(1)}); // 1 + T
        }
    }
    {
        auto& S = setupC();
        WeilQuotient W(S.T, S.fam, S.fam.theta(3), Cocycle::random_valid(S.T, 4));
        auto lf = W.l_factor_adjoint();
        CHECK(lf.dim_fixed == 1);
        CHECK(lf.poly == std::vector<Rat>{Rat(1), Rat(1)});
    }
}

TEST_CASE("Artin conductor by filtration = 2 n^2 r") {
    for (Setup* S : {&setupA(), &setupB(), &setupC()}) {
        int64_t n = S->T.params().n();
        Rat want(2 * n * n * S->T.params().r);
        for (uint64_t seed : {0ull, 5ull}) {
            Cocycle c = seed ? Cocycle::random_valid(S->T, seed) : Cocycle::trivial(S->T);
            WeilQuotient W(S->T, S->fam, S->fam.theta(0), c);
            CHECK(W.artin_conductor_filtration() == want);
        }
    }
}
