#include "doctest.h"

#include "tloc/metacyclic.hpp"

using namespace tloc;

TEST_CASE("group law and defining relations") {
    for (auto [e, f, q, m] : std::vector<std::array<int64_t, 4>>{
             {2, 1, 3, 0}, {4, 2, 5, 0}, {4, 2, 3, 2}, {1, 2, 3, 0},
             {2, 2, 3, 0}, {4, 1, 5, 0}, {6, 2, 7, 3}}) {
        MetacyclicGroup G(e, f, q, m);
        CHECK((int64_t)G.elements().size() == e * f);
        // delta^e = 1, rho^f = delta^m, rho^-1 delta rho = delta^q
        CHECK(G.pow(G.delta(1), e) == G.id());
        CHECK(G.pow(GammaElem{0, f > 1 ? 1 : 0}, f) ==
              (f > 1 ? G.delta(m) : G.id()));
        if (f > 1) {
            GammaElem r{0, 1};
            CHECK(G.mul(G.mul(G.inv(r), G.delta(1)), r) == G.delta(q % e));
        }
        // associativity spot check over all triples for small groups
        if (e * f <= 12) {
            auto E = G.elements();
            for (auto& a : E)
                for (auto& b : E)
                    for (auto& c : E)
                        CHECK(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
        }
        // inverses
        for (auto& a : G.elements())
            CHECK(G.mul(a, G.inv(a)) == G.id());
    }
}

TEST_CASE("examples from small groups") {
    MetacyclicGroup z2(2, 1, 3, 0);
    CHECK(z2.order() == 2);
    CHECK(z2.involutions().size() == 2);

    // (4,2,5,0): delta^rho = delta^5 = delta, abelian Z/4 x Z/2
    MetacyclicGroup g(4, 2, 5, 0);
    for (auto& a : g.elements())
        CHECK(g.is_central(a));
    CHECK(g.order_of(g.delta(1)) == 4);
    auto H = g.involutions();
    CHECK(H.size() == 4);

    // (4,2,3,2): quaternion-like, only one involution besides 1
    MetacyclicGroup q8(4, 2, 3, 2);
    CHECK(q8.involutions().size() == 2);

    // (1,2,3,0) -> Z/2 generated by rho
    MetacyclicGroup u(1, 2, 3, 0);
    auto Hu = u.involutions();
    CHECK(Hu.size() == 2);
    CHECK(u.involution_table().label == "e odd, m even");
}

TEST_CASE("involution table matches brute force, ef <= 48") {
    // the case table presumes a genuine K_+-structure: when f is even the
    // mixed involutions force e | q^{f/2} - 1 (cf. the quaternion-like
    // (4,2,3,2) where only {1, delta^2} survives)
    for (int64_t q : {3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 49}) {
        for (int64_t e = 1; e <= 48; ++e)
            for (int64_t f = 1; e * f <= 48; ++f) {
                if (mod_pow(q, f, e) != 1 % e) continue;
                for (int64_t m = 0; m < e; ++m) {
                    if ((m * (q - 1)) % e != 0) continue;
                    MetacyclicGroup G(e, f, q, m);
                    auto H = G.involutions();
                    if ((e * f) % 2 == 1) {
                        CHECK(H.size() == 1);
                        continue;
                    }
                    if (!G.involution_table_applies()) continue;
                    for (auto& h : H) CHECK(G.is_central(h));
                    auto tab = G.involution_table();
                    std::sort(tab.H.begin(), tab.H.end());
                    std::sort(H.begin(), H.end());
                    REQUIRE(tab.H == H);
                    if (f > 1)
                        CHECK(G.order_of(GammaElem{0, 1}) == G.ord_rho_formula());
                }
            }
    }
}

TEST_CASE("K/Kgamma ramified iff gamma in inertia") {
    for (auto [e, f, q, m] : std::vector<std::array<int64_t, 4>>{
             {2, 2, 3, 0}, {4, 2, 5, 0}, {2, 1, 3, 0}, {6, 2, 13, 0}}) {
        MetacyclicGroup G(e, f, q, m);
        for (auto& g : G.involutions()) {
            if (g.is_identity()) continue;
            auto s = make_subfield(G, "Kg", {g});
            CHECK(s.ramified_KL == G.in_inertia(g));
        }
    }
}

TEST_CASE("subfield lattice") {
    // |H| = 4 case: (2,2,3,0), tau = rho
    MetacyclicGroup G(2, 2, 3, 0);
    GammaElem tau{0, 1};
    auto lat = subfield_lattice(G, tau);
    REQUIRE(lat.size() == 8);
    auto find = [&](const std::string& n) {
        for (auto& s : lat)
            if (s.name == n) return s;
        throw std::runtime_error("missing " + n);
    };
    auto Kd = find("Kdelta'");
    CHECK(Kd.e_LF == 1);
    CHECK(Kd.f_LF == 2); // unramified quadratic over F = E here
    auto Kt = find("Ktau'");
    CHECK(Kt.e_LF == 2);
    CHECK(Kt.f_LF == 1); // ramified quadratic over E
    auto E = find("E");
    CHECK(E.e_LF == 1);
    CHECK(E.f_LF == 1); // degenerate: E = F for n = 2, e = f = 2
    auto Kp = find("K+");
    CHECK(Kp.e_LF == 2);
    CHECK(Kp.ramified_KL == false); // K/K+ unramified
    CHECK(find("E0").e_LF * find("E0").f_LF == 1);

    // totally ramified chain
    MetacyclicGroup C(4, 1, 5, 0);
    auto lat2 = subfield_lattice(C, C.delta(2));
    bool sawKp = false;
    for (auto& s : lat2)
        if (s.name == "K+") {
            sawKp = true;
            CHECK(s.ramified_KL == true);
            CHECK(s.e_LF == 2);
        }
    CHECK(sawKp);

    CHECK_THROWS_AS(subfield_lattice(C, C.delta(1)), TauNotInvolution);

    // E0 = E cap K0 has f(E0/F) = f_+, e = 1 in a genuine |H|=4 case
    MetacyclicGroup G2(2, 4, 3, 0);
    auto H2 = G2.involutions();
    CHECK(H2.size() == 4);
    auto lat3 = subfield_lattice(G2, GammaElem{0, 2});
    for (auto& s : lat3)
        if (s.name == "E0") {
            CHECK(s.e_LF == 1);
            CHECK(s.f_LF == 2); // f_+ = f/2 = 2
        }
}
