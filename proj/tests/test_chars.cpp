#include "doctest.h"

#include <random>

#include "tloc/chars.hpp"

using namespace tloc;

namespace {
TowerParams instA() { return {3, 1, 2, 1, 0, 4, TauKind::TotallyRamified}; }
TowerParams instB() { return {3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }
TowerParams instC() { return {3, 1, 2, 2, 0, 4, TauKind::UnramifiedOverKPlus}; }

const TowerModel& modelA() {
    static TowerModel T = TowerModel::realize(instA());
    return T;
}
const TowerModel& modelB() {
    static TowerModel T = TowerModel::realize(instB());
    return T;
}
const TowerModel& modelC() {
    static TowerModel T = TowerModel::realize(instC());
    return T;
}
const ThetaFamily& famA() {
    static ThetaFamily f(modelA());
    return f;
}
const ThetaFamily& famB() {
    static ThetaFamily f(modelB());
    return f;
}
const ThetaFamily& famC() {
    static ThetaFamily f(modelC());
    return f;
}
} // namespace

TEST_CASE("admissible theta counts") {
    // n=1, q=3, r=4 ramified: 2*3 * 3 = 18
    CHECK(famA().count() == 18);
    CHECK(famA().expected_count() == 18);
    CHECK(famA().S_size() == famA().expected_S_size());
    // unramified: (1+3^-1)*3 * 3 = 12
    CHECK(famB().count() == 12);
    CHECK(famB().expected_count() == 12);
    // |H|=4 instance: 12 * 9 = 108
    CHECK(famC().count() == 108);
    CHECK(famC().expected_count() == 108);
    CHECK(famC().S_size() == famC().expected_S_size());
}

TEST_CASE("theta restricted to the pinned subgroup reproduces theta0") {
    for (const ThetaFamily* fam : {&famA(), &famB(), &famC()}) {
        auto th = fam->theta(fam->count() - 1);
        for (auto& s : fam->S_elements())
            CHECK(fam->eval(th, s) == fam->theta0(s));
    }
}

TEST_CASE("theta0 is multiplicative on S") {
    for (const ThetaFamily* fam : {&famA(), &famB()}) {
        const auto& S = fam->S_elements();
        const auto& T = fam->model();
        int er = (int)T.params().e * T.params().r;
        std::mt19937_64 rng(3);
        for (int t = 0; t < 40; ++t) {
            const OKElem& x = S[rng() % S.size()];
            const OKElem& y = S[rng() % S.size()];
            OKElem xy = T.truncate(T.mul(x, y), er);
            CHECK(fam->theta0(xy) == fam->theta0(x) * fam->theta0(y));
        }
    }
}

TEST_CASE("every theta is multiplicative (sampled)") {
    for (const ThetaFamily* fam : {&famA(), &famB(), &famC()}) {
        const auto& T = fam->model();
        int er = (int)T.params().e * T.params().r;
        std::mt19937_64 rng(17);
        auto th = fam->theta(1 % fam->count());
        auto th2 = fam->theta(fam->count() / 2);
        // random elements of U_{K/K+}: u^{1-tau} over random units u
        auto rnd_unit = [&]() {
            OKElem z = T.zero();
            for (auto& g : z.c)
                for (auto& v : g.c) v = (int64_t)(rng() % T.R().pM());
            z.c[0].c[0] |= 1; // force a unit
            while (!T.is_unit(z)) z.c[0].c[0] = (int64_t)(rng() % T.R().pM());
            return T.one_minus_tau(z);
        };
        for (int t = 0; t < 25; ++t) {
            OKElem x = rnd_unit(), y = rnd_unit();
            OKElem xy = T.truncate(T.mul(x, y), er);
            CHECK(fam->eval(th, xy) == fam->eval(th, x) * fam->eval(th, y));
            CHECK(fam->eval(th2, xy) == fam->eval(th2, x) * fam->eval(th2, y));
        }
    }
}

TEST_CASE("c character: certified properties") {
    // ramified q=3: c(-1) = -1
    CHECK(famA().c().at_minus_one() == RootU::minus_one());
    CHECK(famA().c().expected_minus_one() == RootU::minus_one());
    // unramified |H|=2: c = 1 on U
    CHECK(famB().c().at_minus_one() == RootU::one());
    // |H|=4, q=3, f_+=1: c(-1) = -(-1)^1 = +1
    CHECK(famC().c().at_minus_one() == RootU::one());
    CHECK(famC().c().expected_minus_one() == RootU::one());
    // c trivial on U cap (1+p^2): sample via (1+p^2)-units' 1-tau image
    for (const ThetaFamily* fam : {&famA(), &famC()}) {
        const auto& T = fam->model();
        std::mt19937_64 rng(5);
        for (int t = 0; t < 20; ++t) {
            OKElem u = T.add(T.one(), T.mul(T.pow(T.pi(), 2), T.teich(rng() % 8)));
            OKElem y = T.one_minus_tau(u);
            CHECK(fam->c().eval(y).is_one());
        }
    }
}

TEST_CASE("conductor of vartheta-tilde matches the case table") {
    // ramified: e(r-1) = 6; unramified: e(r-1)+1 (B: 4, C: 7)
    auto cond = [&](const ThetaFamily& fam, int64_t k) {
        const auto& T = fam.model();
        Subfield K = T.subfield("K");
        auto th = fam.theta(k);
        return unit_char_conductor(
            T, K, [&](const OKElem& u) { return fam.vartheta_tilde(th, u); },
            (int)T.params().e * T.params().r + 1);
    };
    for (int64_t k : {0, 1, 7, 17}) CHECK(cond(famA(), k) == 6);
    for (int64_t k : {0, 5, 11}) CHECK(cond(famB(), k) == 4);
    for (int64_t k : {0, 51, 107}) CHECK(cond(famC(), k) == 7);
    // trivial character has conductor 0 by convention
    const auto& T = modelA();
    Subfield K = T.subfield("K");
    CHECK(unit_char_conductor(T, K, [](const OKElem&) { return RootU::one(); }, 9) == 0);
}

TEST_CASE("galois twist fixers match the case table") {
    for (const ThetaFamily* fam : {&famA(), &famB(), &famC()}) {
        const auto& T = fam->model();
        const auto& par = T.params();
        int erm1 = (int)par.e * (par.r - 1);
        auto th = fam->theta(0);
        for (int k = 2; k <= (int)par.e * par.r; ++k) {
            auto fix = galois_twist_fixers(T, *fam, th, k);
            size_t expect = k > erm1   ? (size_t)T.gamma().order()
                            : k == erm1 ? (size_t)par.e
                                        : 1;
            CHECK(fix.size() == expect);
        }
    }
}

TEST_CASE("vartheta-tilde is trivial on K_+^x and vartheta(beta) = vartheta(-1)") {
    for (const ThetaFamily* fam : {&famA(), &famB(), &famC()}) {
        const auto& T = fam->model();
        auto Kp = T.subfield("K+");
        auto th = fam->theta(fam->count() > 2 ? 2 : 0);
        // full-precision generators of the K_+ unit group image
        auto exps = T.subfield_teich_exps(Kp);
        for (int64_t k : exps)
            CHECK(fam->vartheta_tilde(th, T.teich(k)).is_one());
        auto rb = T.subfield_res_basis(Kp);
        for (int64_t j = 1; j <= T.params().r + 2; ++j)
            for (int64_t b : rb) {
                OKElem g = T.add(T.one(), T.mul(T.teich(b), T.pow(Kp.pi, j)));
                CHECK(fam->vartheta_tilde(th, g).is_one());
            }
        CHECK(fam->vartheta_tilde(th, Kp.pi).is_one());
        // Fröhlich-Queyrut input identity: vartheta-tilde(beta) = vartheta(-1)
        OKElem m1 = T.neg(T.one());
        RootU lhs = fam->vartheta_tilde(th, T.beta());
        RootU rhs = fam->c().eval(m1) * fam->eval(th, m1);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("norm residue symbols") {
    // unramified quadratic K/F of instance B: symbol = (-1)^{ord}
    const auto& TB = modelB();
    QuadSymbol sB(TB, TB.subfield("F"), TB.subfield("K"));
    CHECK(sB.eval(TB.one()) == 1);
    CHECK(sB.eval(TB.teich(4)) == 1);
    CHECK(sB.eval(TB.from_int(3)) == -1);
    CHECK(sB.eval(TB.from_int(9)) == 1);

    // ramified quadratic over Q_3: (-1, K/K_+) = -1 (q = 3)
    const auto& TA = modelA();
    QuadSymbol sA(TA, TA.subfield("F"), TA.subfield("K"));
    CHECK(sA.eval(TA.neg(TA.one())) == -1);
    // squares are norms
    CHECK(sA.eval(TA.from_int(4)) == 1);
    CHECK(sA.eval(TA.mul(TA.from_int(3), TA.from_int(3))) == 1);
}

TEST_CASE("theta(-1) squares to one") {
    for (const ThetaFamily* fam : {&famA(), &famB(), &famC()}) {
        for (int64_t k = 0; k < fam->count(); k += 5) {
            RootU v = fam->theta_minus_one(fam->theta(k));
            CHECK((v * v).is_one());
        }
    }
}
