#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "rhs/special.hpp"

TEST_CASE("modified Bessel values at reference points", "[special]") {
    // Abramowitz & Stegun 9.8 reference values.
    CHECK(rhs::bessel_i0(0.0) == 1.0);
    CHECK(rhs::bessel_i1(0.0) == 0.0);
    CHECK(std::abs(rhs::bessel_i0(1.0) - 1.2660658777520084) < 1e-15);
    CHECK(std::abs(rhs::bessel_i1(1.0) - 0.5651591039924851) < 1e-15);
}

TEST_CASE("agrees with the standard library implementation", "[special]") {
    // std::cyl_bessel_i is an independent implementation; treat it as the
    // oracle across both the series and asymptotic branches.
    for (double x : {0.05, 0.3, 1.7, 4.0, 9.5, 14.9}) {
        CHECK(std::abs(rhs::bessel_i0(x) - std::cyl_bessel_i(0.0, x)) /
                  std::cyl_bessel_i(0.0, x) <
              1e-13);
        CHECK(std::abs(rhs::bessel_i1(x) - std::cyl_bessel_i(1.0, x)) /
                  std::cyl_bessel_i(1.0, x) <
              1e-13);
    }
    for (double x : {15.1, 22.0, 40.0, 80.0, 200.0}) {
        CHECK(std::abs(rhs::bessel_i0(x) - std::cyl_bessel_i(0.0, x)) /
                  std::cyl_bessel_i(0.0, x) <
              1e-11);
        CHECK(std::abs(rhs::bessel_i1(x) - std::cyl_bessel_i(1.0, x)) /
                  std::cyl_bessel_i(1.0, x) <
              1e-11);
    }
}

TEST_CASE("ratio I1/I0 behaves like a concentration map", "[special]") {
    // Strictly increasing, pinned at 0 for 0, approaching 1 from below.
    CHECK(rhs::bessel_i1_i0_ratio(0.0) == 0.0);
    double prev = 0.0;
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 400.0}) {
        const double r = rhs::bessel_i1_i0_ratio(x);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
    // Large-argument expansion: 1 - 1/(2x) - 1/(8x^2) + O(x^-3).
    const double x = 400.0;
    const double expansion = 1.0 - 1.0 / (2.0 * x) - 1.0 / (8.0 * x * x);
    CHECK(std::abs(rhs::bessel_i1_i0_ratio(x) - expansion) < 1e-8);
}

TEST_CASE("ratio matches the standard library across branches", "[special]") {
    for (double x : {0.25, 1.0, 7.0, 14.5, 16.0, 60.0}) {
        const double oracle = std::cyl_bessel_i(1.0, x) / std::cyl_bessel_i(0.0, x);
        CHECK(std::abs(rhs::bessel_i1_i0_ratio(x) - oracle) < 1e-11);
    }
}

TEST_CASE("negative arguments are rejected", "[special]") {
    CHECK_THROWS_AS(rhs::bessel_i0(-0.5), std::domain_error);
    CHECK_THROWS_AS(rhs::bessel_i1(-2.0), std::domain_error);
    CHECK_THROWS_AS(rhs::bessel_i1_i0_ratio(-1.0), std::domain_error);
}

TEST_CASE("series and asymptotic branches join smoothly", "[special]") {
    // The switchover sits at x = 15. Both sides must match the oracle at
    // their own argument; the straddling values themselves legitimately
    // differ by the step times the log-derivative I1/I0.
    for (double x : {15.0 - 1e-9, 15.0 + 1e-9}) {
        const double oracle = std::cyl_bessel_i(0.0, x);
        CHECK(std::abs(rhs::bessel_i0(x) - oracle) / oracle < 1e-12);
    }
    const double below = rhs::bessel_i0(15.0 - 1e-9);
    const double above = rhs::bessel_i0(15.0 + 1e-9);
    const double growth = 2e-9 * rhs::bessel_i1_i0_ratio(15.0);
    CHECK(std::abs(above - below) / above < growth + 1e-12);
}
