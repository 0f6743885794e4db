#include "doctest.h"

#include <random>

#include "tloc/galoisring.hpp"

using namespace tloc;

TEST_CASE("GR(3^4, 2) structure") {
    GaloisRing R(3, 4, 2);
    CHECK(R.pM() == 81);
    CHECK(R.res_units() == 8);
    GRElem xi = R.xi();
    // xi is a Teichmüller element of full order 8
    CHECK(R.pow(xi, 8) == R.one());
    CHECK(R.pow(xi, 4) != R.one());
    CHECK(R.pow(xi, 4) == R.from_int(-1)); // unique order-2 element of mu_8
    // Frobenius: xi -> xi^3, order 2
    CHECK(R.frob(xi) == R.pow(xi, 3));
    CHECK(R.frob(R.frob(xi)) == xi);
    // ring hom on random elements
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
        GRElem a = R.from_coeffs({(int64_t)(rng() % 81), (int64_t)(rng() % 81)});
        GRElem b = R.from_coeffs({(int64_t)(rng() % 81), (int64_t)(rng() % 81)});
        CHECK(R.frob(R.mul(a, b)) == R.mul(R.frob(a), R.frob(b)));
        CHECK(R.frob(R.add(a, b)) == R.add(R.frob(a), R.frob(b)));
    }
}

TEST_CASE("Teichmüller digits and valuation") {
    GaloisRing R(5, 3, 2);
    GRElem x = R.add(R.mul_int(R.teich_pow(3), 5), R.teich_pow(7));
    auto dig = R.teich_digits(x);
    CHECK(dig[0] == 7);
    CHECK(dig[1] == 3);
    CHECK(R.vval(x) == 0);
    CHECK(R.vval(R.mul_int(R.one(), 25)) == 2);
    CHECK(R.vval(R.zero()) == 3);
}

TEST_CASE("units invert") {
    GaloisRing R(3, 5, 4);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        GRElem a = R.from_coeffs({(int64_t)rng(), (int64_t)rng(), (int64_t)rng(), (int64_t)rng()});
        if (!R.is_unit(a)) continue;
        CHECK(R.mul(a, R.inv(a)) == R.one());
    }
}

TEST_CASE("trace lands in the prime ring") {
    GaloisRing R(3, 4, 2);
    // trace of 1 is d
    CHECK(R.trace_to_prime_ring(R.one()) == 2);
    // trace is Frobenius-invariant
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        GRElem a = R.from_coeffs({(int64_t)(rng() % 81), (int64_t)(rng() % 81)});
        CHECK(R.trace_to_prime_ring(a) == R.trace_to_prime_ring(R.frob(a)));
    }
}

TEST_CASE("degree one ring is Z/p^M") {
    GaloisRing R(3, 3, 1);
    CHECK(R.pM() == 27);
    CHECK(R.teich_pow(1) != R.one());
    CHECK(R.pow(R.teich_pow(1), 2) == R.one());
    CHECK(R.trace_to_prime_ring(R.from_int(5)) == 5);
}
