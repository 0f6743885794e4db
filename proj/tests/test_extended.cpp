// Off-grid coverage: odd r, base fields with f0 > 1, and m != 0 towers.

#include "doctest.h"

#include "tloc/verifier.hpp"

using namespace tloc;

TEST_CASE("odd depth r = 5: theta family, conductor, identities") {
    TowerParams par{3, 1, 2, 1, 0, 5, TauKind::TotallyRamified};
    Verifier V;
    const TowerModel& T = V.model(par);
    const ThetaFamily& fam = V.family(par);
    // l = 3, l' = 2: count = |G_beta(F)| q^{(l-1)n} = 6 * 9
    CHECK(fam.count() == 54);
    CHECK(fam.count() == fam.expected_count());
    CHECK(fam.S_size() == 9); // q^{l' n}
    FactorEngine eng(T);
    Subfield K = T.subfield("K");
    LChar vt = eng.vartheta_char(fam, fam.theta(7));
    CHECK(eng.conductor(K, vt) == 8); // e(r-1)
    auto fq = eng.frohlich_queyrut(fam, fam.theta(7));
    CHECK(fq.applicable);
    CHECK(fq.holds);
    CHECK(formal_degree_lhs(par) == Rat(54));
    Instance inst{par, 3, Cocycle::Kind::RandomValid, 2};
    CHECK(V.verify_formal_degree(inst).ok());
    CHECK(V.verify_root_number(inst).ok());
    CHECK(V.verify_decomposition(inst).ok());
}

TEST_CASE("unramified base of degree f0 = 2 (q = 9)") {
    TowerParams par{3, 2, 2, 1, 0, 2, TauKind::TotallyRamified};
    par.validate();
    CHECK(par.q() == 9);
    Verifier V;
    const TowerModel& T = V.model(par);
    // psi factors through the trace to Q_3 and is trivial exactly on O_F
    CHECK(T.psi_frac(T.one(), 0).is_one());
    CHECK(!T.psi_frac(T.teich(1), 1).is_one());
    const ThetaFamily& fam = V.family(par);
    CHECK(fam.count() == fam.expected_count());
    CHECK(fam.count() == 18); // 2q at l = 1
    Instance inst{par, 1, Cocycle::Kind::Trivial, 1};
    CHECK(V.verify_formal_degree(inst).ok());
    CHECK(V.verify_root_number(inst).ok());
    CHECK(V.verify_decomposition(inst).ok());
    CHECK(V.verify_conductors(inst).ok());
}

TEST_CASE("m = 2 tower with |H| = 4: full pipeline") {
    TowerParams par{5, 1, 4, 2, 2, 2, TauKind::UnramifiedOverKPlus};
    par.validate();
    Verifier V;
    const TowerModel& T = V.model(par);
    CHECK(T.gamma().involutions().size() == 4);
    const ThetaFamily& fam = V.family(par);
    CHECK(fam.count() == fam.expected_count());
    // c(-1) matches the closed form in the |H| = 4 case
    CHECK(fam.c().at_minus_one() == fam.c().expected_minus_one());
    Instance inst{par, 2, Cocycle::Kind::Trivial, 1};
    CHECK(V.verify_decomposition(inst).ok());
    CHECK(V.verify_formal_degree(inst).ok());
    CHECK(V.verify_root_number(inst).ok());
    Instance inst2{par, 0, Cocycle::Kind::RandomValid, 4};
    CHECK(V.verify_decomposition(inst2).ok());
}

TEST_CASE("generator criterion via module span on instances B and C") {
    for (auto par : {TowerParams{3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus},
                     TowerParams{3, 1, 2, 2, 0, 4, TauKind::UnramifiedOverKPlus}}) {
        TowerModel T = TowerModel::realize(par);
        int twon = (int)(2 * par.n());
        int lvl = (int)par.e * 2; // work mod p^2
        int64_t p2 = 9;
        auto span_count = [&](const OKElem& b) {
            std::vector<OKElem> pows{T.truncate(T.one(), lvl)};
            for (int i = 1; i < twon; ++i)
                pows.push_back(T.truncate(T.mul(pows.back(), b), lvl));
            std::unordered_map<OKElem, int, OKElemHash> seen;
            std::vector<int64_t> digits(twon, 0);
            for (;;) {
                OKElem z = T.zero();
                for (int i = 0; i < twon; ++i)
                    z = T.add(z, T.mul(pows[i], T.from_int(digits[i])));
                seen[T.truncate(z, lvl)] = 1;
                int i = 0;
                while (i < twon && ++digits[i] == p2) digits[i++] = 0;
                if (i == twon) break;
            }
            return (int64_t)seen.size();
        };
        // |O_K/p^2 O_K| = (p^2)^{f0 * 2n}
        int64_t full = 1;
        for (int64_t i = 0; i < 2 * par.n() * par.f0; ++i) full *= 9;
        CHECK(span_count(T.beta()) == full);       // O_K = O_F[beta]
        CHECK(span_count(T.one()) < full);         // 1 generates O_F only
    }
}

TEST_CASE("sweep json output is deterministic") {
    Verifier::SweepOptions opt;
    opt.qs = {3};
    opt.ns = {1};
    opt.theta_cap = 1;
    Verifier V1, V2;
    auto r1 = V1.sweep(opt);
    auto r2 = V2.sweep(opt);
    CHECK(to_json(r1.reports, false) == to_json(r2.reports, false));
}
