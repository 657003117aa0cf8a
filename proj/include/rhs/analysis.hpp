#pragma once

// Analytic ergodic sum-rate bounds for a PPP-deployed network of surfaces
// serving uniformly placed UEs on a disk, plus the continuum gain quantities
// the bounds are built from. Everything here is deterministic; the Monte
// Carlo side lives in simulation.hpp and is validated against these numbers.

#include <span>
#include <vector>

#include "rhs/channel.hpp"
#include "rhs/impairments.hpp"

namespace rhs {

// Disk average of the element power gain for an element at the panel origin:
//   A/pi * integral_0^R r^2 / (r^2 + H^2)^{3/2} dr.
double zeta_gain_density(double element_area, double height, double radius,
                         double rel_tol = 1e-9);

// Continuum limit of the sum of per-element feed amplitudes sqrt(varsigma_n)
// over an unbounded panel. Finite only for feed_exponent > 1; the radial
// integral is truncated at 50 * feed_offset and closed with the exact tail.
double feed_amplitude_sum(double element_area, double feed_offset, double feed_exponent,
                          double rel_tol = 1e-9);

// Per-element power gain averaged over a UE placed uniformly on the ground
// disk of the given radius, for a panel mounted at the given height:
//   beta_n = A/(2 pi) int_0^R int_0^pi r^2 sin(w) /
//            (r^2 + 2 r x_n cos(w) + x_n^2 + (H + y_n)^2)^{3/2} dw dr.
// Results are cached per (grid, height, radius, tolerance); the cache is
// thread safe.
std::vector<double> disk_average_gains(const SurfaceGeometry& geom, double height,
                                       double radius, double rel_tol = 1e-6);

// (sum_n sqrt(varsigma_n beta_n))^2: power collected when all elements add
// coherently.
double coherent_gain(std::span<const double> feed_gain, std::span<const double> avg_gain);

// sum_n varsigma_n beta_n: power collected with no phase alignment at all.
double incoherent_gain(std::span<const double> feed_gain, std::span<const double> avg_gain);

struct BoundInputs {
    double coherent_gain = 0.0;    // P
    double incoherent_gain = 0.0;  // G
    double density = 0.0;          // BS density, per square meter
    double area = 0.0;             // region area the UEs are drawn from
    std::vector<double> rho;       // per-UE transmit power
    HardwareQuality quality;
    double xi = 1.0;               // mean resultant length of the phase error
    double noise_power = 0.0;
};

// Upper bound on the ergodic sum rate over network and UE placement. Each
// user contributes
//   log2(1 + rho eu ev xi^2 (eta/K) P /
//        (rho [(1-ev)/(eta S) + (1-eu) ev / K] xi^2 eta P
//         + rho (1-xi^2) G / S + noise)).
double sum_rate_upper_bound(const BoundInputs& in);

// Transmit power -> infinity: the noise term drops and rho cancels. Infinite
// when all impairments are off.
double high_power_limit(const BoundInputs& in);

// High-power ceilings with one impairment active at a time. The *_only
// members evaluate the finite-power bound with the other impairments
// disabled; the *_limit members are the matching closed forms,
//   ue:    K log2(1 + eu / (1 - eu))
//   bs:    K log2(1 + ev eta S / (K (1 - ev)))
//   phase: K log2(1 + xi^2 eta S P / (K (1 - xi^2) G)).
// The ue limit is also the ceiling of high_power_limit as density grows
// without bound, whatever the other impairments are.
struct SpecialCaseBounds {
    double ue_only = 0.0, bs_only = 0.0, phase_only = 0.0;
    double ue_limit = 0.0, bs_limit = 0.0, phase_limit = 0.0;
};
SpecialCaseBounds special_case_bounds(const BoundInputs& in);

// Bound for an unbounded panel: the gain pair (P, G) is replaced by its
// continuum limit (zeta * epsilon^2, zeta) computed from the element area,
// feed geometry, and mounting height; everything else comes from `in`.
double sum_rate_infinite_surface(const BoundInputs& in, double element_area,
                                 double feed_offset, double feed_exponent, double height);

} // namespace rhs
