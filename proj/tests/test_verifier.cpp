#include "doctest.h"

#include "tloc/abelian.hpp"
#include "tloc/verifier.hpp"

using namespace tloc;

namespace {
TowerParams instA() { return {3, 1, 2, 1, 0, 4, TauKind::TotallyRamified}; }
TowerParams instB() { return {3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }
TowerParams instFail() { return {5, 1, 4, 1, 0, 4, TauKind::TotallyRamified}; }
} // namespace

TEST_CASE("closed forms: dimensions and formal degrees") {
    CHECK(dim_delta(instA()) == Rat(36));
    CHECK(dim_delta(instB()) == Rat(54));
    CHECK(formal_degree_lhs(instA()) == Rat(18));
    CHECK(formal_degree_lhs(instB()) == Rat(27));
    CHECK(gamma_adjoint_abs_closed(instA()) == Rat(81));
    CHECK(gamma_adjoint_abs_closed(instB()) == Rat(243, 2));
}

TEST_CASE("root number equality prediction") {
    CHECK(root_number_expected_equal(instA()));       // n = 1: condition vacuous
    CHECK(root_number_expected_equal(instB()));       // not totally ramified
    CHECK(!root_number_expected_equal(instFail()));   // (q-1)/2 (n-1) = 2 mod 4
    // q = 13, n = 2, e = 4: (13-1)/2 * 1 = 6, not 0 mod 4 -> failure predicted
    TowerParams q13{13, 1, 4, 1, 0, 4, TauKind::TotallyRamified};
    CHECK(!root_number_expected_equal(q13));
    // q = 17, n = 2: (17-1)/2 = 8 = 0 mod 4 -> equality predicted
    TowerParams q17{17, 1, 4, 1, 0, 4, TauKind::TotallyRamified};
    CHECK(root_number_expected_equal(q17));
}

TEST_CASE("verdicts on the named instances") {
    Verifier V;
    for (auto par : {instA(), instB()}) {
        Instance inst{par, 0, Cocycle::Kind::Trivial, 1};
        CHECK(V.verify_formal_degree(inst).ok());
        CHECK(V.verify_root_number(inst).ok());
        CHECK(V.verify_decomposition(inst).ok());
        CHECK(V.verify_conductors(inst).ok());
    }
    // predicted failure instance: report is ok (failure expected and observed)
    Instance bad{instFail(), 2, Cocycle::Kind::Trivial, 1};
    auto rep = V.verify_root_number(bad);
    CHECK(rep.ok());
    bool saw = false;
    for (auto& c : rep.checks)
        if (!c.expected) {
            CHECK(!c.equal);
            saw = true;
        }
    CHECK(saw);
}

TEST_CASE("sweep grid, error isolation, empty grid") {
    Verifier V;
    Verifier::SweepOptions opt;
    opt.qs = {};
    auto res = V.sweep(opt);
    CHECK(res.reports.empty());
    // an unrealizable cell (here: impossible tau structure) is recorded as an
    // error without aborting the others
    auto grid = Verifier::sweep_grid({});
    CHECK(grid.size() == 9);
    // q=3, n=2 has no (4,1) cell since 4 does not divide 3-1
    for (auto& par : grid)
        CHECK(!(par.p == 3 && par.e == 4));
}

TEST_CASE("reports render to json and csv") {
    Verifier V;
    Instance inst{instA(), 0, Cocycle::Kind::Trivial, 1};
    auto rep = V.verify_formal_degree(inst);
    std::string j = to_json(rep, false);
    CHECK(j.find("\"status\":\"ok\"") != std::string::npos);
    CHECK(j.find("\"p\":3") != std::string::npos);
    std::string c = to_csv({rep});
    CHECK(c.find("formal-degree") != std::string::npos);
    // identical invocations give identical bytes
    auto rep2 = V.verify_formal_degree(inst);
    CHECK(to_json(rep2, false) == j);
}

TEST_CASE("unit group quotient with dlog tables") {
    Verifier V;
    const TowerModel& T = V.model(instA());
    // |(O_K/p_K)^x| = q^f - 1
    auto u1 = unit_group_quotient(T, 0, 1);
    CHECK(u1.elems.size() == 2);
    // n=1, q=3 ramified: |ker N on (O_K/p_K^2)^x| = 6 = |G_beta(F)| = 2q^n
    auto u2 = unit_group_quotient(T, 1, 2);
    CHECK(u2.elems.size() == 6); // q_K (q_K - 1) = 3*2
    CHECK(u2.norm_one.size() == 6);
    CHECK(u2.filtered.size() == 3); // |(1+p)/(1+p^2)| = q_K
    CHECK_THROWS_AS(unit_group_quotient(T, 2, 2), PrecisionTooSmall);
    // dlog round trip
    for (int i = 0; i < u2.grp.n(); ++i)
        CHECK(u2.grp.from_coords(u2.grp.dlog(i)) == i);
    // orders multiply to the group size
    int64_t prod = 1;
    for (auto o : u2.grp.orders()) prod *= o;
    CHECK(prod == (int64_t)u2.elems.size());
}

TEST_CASE("norm-one kernel size matches |G_beta(F)| = 2 q^n") {
    // brute-force kernel count at depth e = 2 equals 2 q^n = 6
    Verifier V;
    const TowerModel& T = V.model(instA());
    auto uq = unit_group_quotient(T, 0, 2);
    CHECK(uq.elems.size() == 6);
    CHECK(uq.norm_one.size() == 6);
}

TEST_CASE("FQ inapplicable branch for a K_+-nontrivial twist") {
    Verifier V;
    const TowerModel& T = V.model(instA());
    FactorEngine eng(T);
    // Legendre-type character of K^x: nontrivial on mu = mu_{q-1} subset K_+^x
    const TowerModel* Tp = &T;
    LChar leg;
    leg.on_units = [Tp](const OKElem& u) {
        return (Tp->teich_exp(Tp->teich_part(u)) % 2) ? RootU::minus_one()
                                                      : RootU::one();
    };
    auto rep = eng.frohlich_queyrut_char(leg);
    CHECK(!rep.applicable);
}

TEST_CASE("conductor of pair twists in the totally ramified case") {
    // q=5, n=2, e=4: pairs {delta, delta^3}: f(vt_gamma) = e(r-1) = 12
    Verifier V;
    const TowerModel& T = V.model(instFail());
    const ThetaFamily& fam = V.family(instFail());
    FactorEngine eng(T);
    Subfield K = T.subfield("K");
    LChar vg = eng.vartheta_gamma_char(fam, fam.theta(0), T.gamma().delta(1));
    CHECK(eng.conductor(K, vg) == 12);
    LChar vt = eng.vartheta_char(fam, fam.theta(0));
    CHECK(eng.conductor(K, vt) == 12);
}

TEST_CASE("conductor case split for pair twists, all admissible theta") {
    // totally ramified (q=5, n=2, e=4): f(vt_gamma) = e(r-1) for every pair;
    // unramified (1,4): gamma = rho^{+-1} not in the inertia: e(r-1)+1
    Verifier V;
    {
        const TowerModel& T = V.model(instFail());
        const ThetaFamily& fam = V.family(instFail());
        FactorEngine eng(T);
        Subfield K = T.subfield("K");
        for (int64_t k = 0; k < fam.count(); k += 7) {
            LChar vg = eng.vartheta_gamma_char(fam, fam.theta(k), T.gamma().delta(1));
            CHECK(eng.conductor(K, vg) == 12);
        }
    }
    {
        TowerParams p14{3, 1, 1, 4, 0, 4, TauKind::UnramifiedOverKPlus};
        const TowerModel& T = V.model(p14);
        const ThetaFamily& fam = V.family(p14);
        FactorEngine eng(T);
        Subfield K = T.subfield("K");
        for (int64_t k = 0; k < fam.count(); ++k) {
            LChar vg = eng.vartheta_gamma_char(fam, fam.theta(k), T.gamma().rho(1));
            CHECK(eng.conductor(K, vg) == 4); // e(r-1)+1, gamma outside inertia
            LChar vt = eng.vartheta_char(fam, fam.theta(k));
            CHECK(eng.conductor(K, vt) == 4);
        }
    }
}

TEST_CASE("<wedge, Ind vt_gamma> = 1 for a pair class") {
    Verifier V;
    const TowerModel& T = V.model(instFail());
    const ThetaFamily& fam = V.family(instFail());
    Cocycle co = Cocycle::trivial(T);
    WeilQuotient W(T, fam, fam.theta(1), co);
    ClassFunc wedge = W.wedge_square(W.ind_vartheta());
    ClassFunc rg = W.ind_vartheta_gamma(T.gamma().delta(1));
    CHECK(W.inner_product(wedge, rg) == Cyclo(Rat(1)));
}
