#pragma once

// Per-element channel synthesis for one surface panel: the feed-to-element
// power gains, the UE-to-element power gains, spherical- and planar-wavefront
// propagation phases, and the aggregation into the scalar channel seen by the
// panel's single RF chain.

#include <complex>
#include <span>
#include <vector>

#include "rhs/geometry.hpp"

namespace rhs {

struct SurfaceGeometry {
    int nx = 0, ny = 0;          // element counts along x and y
    double pitch_x = 0.0;        // element pitch, meters
    double pitch_y = 0.0;
    double feed_offset = 0.0;    // feed distance d0 behind the panel, meters
    double feed_exponent = 0.0;  // radiation exponent alpha of the feed pattern
    std::vector<double> xc, yc;  // element center coordinates, row-major ny x nx

    int size() const { return nx * ny; }
    double element_area() const { return pitch_x * pitch_y; }

    // Centered regular grid: x in {-(nx-1)/2 .. (nx-1)/2} * pitch_x, same for y.
    static SurfaceGeometry regular(int nx, int ny, double pitch_x, double pitch_y,
                                   double feed_offset, double feed_exponent);
};

// Power gain of the feed link per element: the feed's (alpha+1)-exponent
// radiation pattern integrated over each element's area. Sums to at most 1
// over an infinite panel; the residual beyond a panel of radius R scales as
// (d0^2/(d0^2+R^2))^{(alpha+1)/2}. Quadrature failures rethrow with the
// element index attached.
std::vector<double> feed_gain_vector(const SurfaceGeometry& geom, double rel_tol = 1e-6);

struct UeGains {
    std::vector<double> beta;  // per-element power gain
    bool grazing = false;      // UE in the panel plane: all gains zero
};

enum class GainModel {
    approximate,  // projected-area formula evaluated at the element center
    integrated,   // exact integral of the projected solid angle over the element
};

UeGains ue_gain_vector(const SurfaceGeometry& geom, const LocalUePosition& q,
                       GainModel model = GainModel::approximate, double rel_tol = 1e-8);

enum class Wavefront {
    spherical,  // exact per-element path lengths
    planar,     // first-order Taylor expansion of the UE path around the panel origin
};

// Total propagation phase per element: -(2 pi / lambda) * (feed path + UE path).
// The feed path is always exact (the feed is centimeters away); only the UE
// path is linearized in planar mode. The two path lengths are summed before
// reduction mod 2 pi, since each is ~1e4 wavelengths on its own.
std::vector<double> propagation_phases(const SurfaceGeometry& geom, const LocalUePosition& q,
                                       double wavelength, Wavefront wavefront);

// h = sum_n amplitude_n * exp(j(configured_n + error_n + propagation_n)).
// With configured = -propagation and zero errors this collapses to the real
// positive sum of amplitudes. Throws on length mismatch.
std::complex<double> aggregate_channel(std::span<const double> amplitude,
                                       std::span<const double> propagation,
                                       std::span<const double> configured,
                                       std::span<const double> errors);

} // namespace rhs
