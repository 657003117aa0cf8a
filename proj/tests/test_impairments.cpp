#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rhs/impairments.hpp"
#include "rhs/rng.hpp"

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double empirical_mean_cos(const rhs::PhaseErrorModel& m, std::size_t n, std::uint64_t stream) {
    std::mt19937_64 rng = rhs::substream(7, stream);
    const std::vector<double> draws = rhs::sample_errors(m, n, rng);
    double sum = 0.0;
    for (double t : draws) sum += std::cos(t);
    return sum / static_cast<double>(n);
}

} // namespace

TEST_CASE("mean resultant closed forms", "[impairments]") {
    CHECK(rhs::xi(rhs::PhaseErrorModel::none()) == 1.0);

    // Uniform on [-i, i]: xi = sin(i)/i.
    const auto u = rhs::PhaseErrorModel::uniform(std::sqrt(3.0));
    CHECK(std::abs(rhs::xi(u) - std::sin(std::sqrt(3.0)) / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(rhs::xi(u) - 0.5698600991825139) < 1e-14);

    // Full-circle spread has zero resultant (up to the sine's rounding).
    CHECK(std::abs(rhs::xi(rhs::PhaseErrorModel::uniform(kPi))) < 1e-15);

    // von Mises: I1/I0 against the standard library.
    for (double w : {0.5, 1.0, 10.0}) {
        const auto m = rhs::PhaseErrorModel::von_mises(w);
        const double oracle = std::cyl_bessel_i(1.0, w) / std::cyl_bessel_i(0.0, w);
        CHECK(std::abs(rhs::xi(m) - oracle) < 1e-11);
    }
}

TEST_CASE("nominal power conventions", "[impairments]") {
    CHECK(rhs::phase_error_power(rhs::PhaseErrorModel::none()) == 0.0);
    CHECK(std::abs(rhs::phase_error_power(rhs::PhaseErrorModel::uniform(std::sqrt(3.0))) - 1.0) <
          1e-15);
    CHECK(std::abs(rhs::phase_error_power(rhs::PhaseErrorModel::von_mises(10.0)) - 0.1) < 1e-15);
}

TEST_CASE("construction from a power target round-trips", "[impairments]") {
    using Kind = rhs::PhaseErrorModel::Kind;
    for (double p : {0.05, 0.3, 1.0, 2.5}) {
        const auto u = rhs::PhaseErrorModel::from_power(Kind::uniform, p);
        CHECK(std::abs(rhs::phase_error_power(u) - p) < 1e-14 * p);
        const auto v = rhs::PhaseErrorModel::from_power(Kind::von_mises, p);
        CHECK(std::abs(rhs::phase_error_power(v) - p) < 1e-14 * p);
    }
    CHECK(rhs::PhaseErrorModel::from_power(Kind::uniform, 0.0) == rhs::PhaseErrorModel::none());
    CHECK_THROWS_AS(rhs::PhaseErrorModel::from_power(Kind::uniform, -0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::PhaseErrorModel::from_power(Kind::none, 0.5), std::invalid_argument);
    // sqrt(3 * 4) > pi: no uniform distribution has that much power.
    CHECK_THROWS_AS(rhs::PhaseErrorModel::from_power(Kind::uniform, 4.0), std::invalid_argument);
}

TEST_CASE("model parameter validation", "[impairments]") {
    CHECK_THROWS_AS(rhs::PhaseErrorModel::uniform(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rhs::PhaseErrorModel::uniform(kPi + 0.01), std::invalid_argument);
    CHECK_THROWS_AS(rhs::PhaseErrorModel::von_mises(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rhs::PhaseErrorModel::von_mises(-3.0), std::invalid_argument);
}

TEST_CASE("exact second moment vs the nominal surrogate", "[impairments]") {
    // Uniform: the two coincide by construction.
    const auto u = rhs::PhaseErrorModel::uniform(1.0);
    CHECK(rhs::phase_error_power_exact(u) == rhs::phase_error_power(u));

    // von Mises: the wrapped second moment sits slightly above 1/w (the
    // circular tails are heavier than the Gaussian surrogate's) and the
    // ratio tends to 1 as the concentration grows.
    const auto v10 = rhs::PhaseErrorModel::von_mises(10.0);
    const double exact10 = rhs::phase_error_power_exact(v10);
    CHECK(exact10 > 0.1);
    CHECK(std::abs(exact10 - 0.10565505487415304) < 1e-6);

    const auto v100 = rhs::PhaseErrorModel::von_mises(100.0);
    CHECK(rhs::phase_error_power_exact(v100) > 0.01);
    CHECK(std::abs(rhs::phase_error_power_exact(v100) / 0.01 - 1.0) < 0.01);

    // Independent oracle: trapezoid rule on the defining integral.
    const double w = 10.0;
    const int n = 40000;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = kPi * i / n;
        const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
        const double kern = std::exp(w * (std::cos(t) - 1.0));
        num += weight * t * t * kern;
        den += weight * kern;
    }
    CHECK(std::abs(exact10 - num / den) < 1e-9);
}

TEST_CASE("uniform sampler stays in range and matches its CDF", "[impairments]") {
    const double spread = 2.1;
    const auto m = rhs::PhaseErrorModel::uniform(spread);
    std::mt19937_64 rng = rhs::substream(7, 100);
    std::vector<double> draws = rhs::sample_errors(m, 20000, rng);
    for (double t : draws) REQUIRE(std::abs(t) <= spread);

    // One-sample KS against U(-spread, spread) at significance 1e-3.
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double cdf = (draws[i] + spread) / (2.0 * spread);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(d * std::sqrt(n) < 1.9495);
}

TEST_CASE("samplers reproduce the analytic resultant", "[impairments]") {
    const std::size_t n = 200000;
    for (const auto& m : {rhs::PhaseErrorModel::uniform(std::sqrt(3.0)),
                          rhs::PhaseErrorModel::von_mises(1.0),
                          rhs::PhaseErrorModel::von_mises(10.0)}) {
        CHECK(std::abs(empirical_mean_cos(m, n, 200) - rhs::xi(m)) < 5e-3);
    }
    // none yields literal zeros.
    std::mt19937_64 rng = rhs::substream(7, 201);
    for (double t : rhs::sample_errors(rhs::PhaseErrorModel::none(), 32, rng)) CHECK(t == 0.0);
}

TEST_CASE("von Mises draws are symmetric and wrapped", "[impairments]") {
    const auto m = rhs::PhaseErrorModel::von_mises(2.0);
    std::mt19937_64 rng = rhs::substream(7, 202);
    const std::vector<double> draws = rhs::sample_errors(m, 100000, rng);
    double s = 0.0;
    for (double t : draws) {
        REQUIRE(t > -kPi);
        REQUIRE(t <= kPi);
        s += std::sin(t);
    }
    CHECK(std::abs(s / static_cast<double>(draws.size())) < 5e-3);
}

TEST_CASE("sampling is reproducible per stream", "[impairments]") {
    const auto m = rhs::PhaseErrorModel::von_mises(4.0);
    std::mt19937_64 a = rhs::substream(42, 5), b = rhs::substream(42, 5);
    CHECK(rhs::sample_errors(m, 1000, a) == rhs::sample_errors(m, 1000, b));
    std::mt19937_64 c = rhs::substream(42, 6);
    CHECK(rhs::sample_errors(m, 1000, c) != rhs::sample_errors(m, 1000, b));
}

TEST_CASE("quality factors default to ideal", "[impairments]") {
    const rhs::HardwareQuality q;
    CHECK(q.eps_u == 1.0);
    CHECK(q.eps_v == 1.0);
    CHECK(q == rhs::HardwareQuality{1.0, 1.0});
}
