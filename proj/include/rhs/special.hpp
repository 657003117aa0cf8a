#pragma once

namespace rhs {

// Modified Bessel functions of the first kind, orders 0 and 1.
// Power series below x = 15, asymptotic expansion above; relative error is
// kept at or below 1e-10 across the seam (both branches are all-positive or
// strictly decreasing-term sums, so there is no cancellation to worry about).
// Overflows to +inf near x ~ 709 like exp(x) does.
double bessel_i0(double x);
double bessel_i1(double x);

// I1(x)/I0(x), computed without forming e^x so it stays finite for large
// arguments. Strictly increasing from 0 toward 1.
double bessel_i1_i0_ratio(double x);

} // namespace rhs
