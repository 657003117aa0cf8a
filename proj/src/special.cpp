#include "rhs/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rhs {
namespace {

constexpr double kSeriesLimit = 15.0;

// Ascending series: I0 = sum (x^2/4)^m / (m!)^2, I1 = (x/2) sum (x^2/4)^m / (m!(m+1)!).
// All terms positive; terminate when a term stops contributing.
double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 0.5 * x * sum;
}

// Asymptotic factor: I_nu(x) ~ e^x/sqrt(2 pi x) * S_nu(x) with
// S_nu summed until its terms turn around (classic divergent-series cutoff).
double asymptotic_factor(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    double prev = std::abs(term);
    for (int k = 1; k <= 30; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (odd * odd - mu) / (8.0 * k * x);
        if (std::abs(term) >= prev) break;  // series started diverging
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double i_asymptotic(int nu, double x) {
    return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * asymptotic_factor(nu, x);
}

} // namespace

double bessel_i0(double x) {
    if (x < 0.0) throw std::domain_error("bessel_i0: negative argument");
    return x <= kSeriesLimit ? i0_series(x) : i_asymptotic(0, x);
}

double bessel_i1(double x) {
    if (x < 0.0) throw std::domain_error("bessel_i1: negative argument");
    return x <= kSeriesLimit ? i1_series(x) : i_asymptotic(1, x);
}

double bessel_i1_i0_ratio(double x) {
    if (x < 0.0) throw std::domain_error("bessel_i1_i0_ratio: negative argument");
    if (x == 0.0) return 0.0;
    if (x <= kSeriesLimit) return i1_series(x) / i0_series(x);
    // The e^x / sqrt(2 pi x) prefactors cancel.
    return asymptotic_factor(1, x) / asymptotic_factor(0, x);
}

} // namespace rhs
