#include "rhs/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rhs/quadrature.hpp"

namespace rhs {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
}

SurfaceGeometry SurfaceGeometry::regular(int nx, int ny, double pitch_x, double pitch_y,
                                         double feed_offset, double feed_exponent) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("surface grid needs nx, ny >= 1");
    if (!(pitch_x > 0.0) || !(pitch_y > 0.0))
        throw std::invalid_argument("surface element pitch must be positive");
    if (!(feed_offset > 0.0))
        throw std::invalid_argument("feed_offset must be positive");
    SurfaceGeometry g;
    g.nx = nx;
    g.ny = ny;
    g.pitch_x = pitch_x;
    g.pitch_y = pitch_y;
    g.feed_offset = feed_offset;
    g.feed_exponent = feed_exponent;
    g.xc.resize(static_cast<size_t>(nx) * ny);
    g.yc.resize(static_cast<size_t>(nx) * ny);
    const double x0 = -0.5 * (nx - 1) * pitch_x;
    const double y0 = -0.5 * (ny - 1) * pitch_y;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const size_t n = static_cast<size_t>(iy) * nx + ix;
            g.xc[n] = x0 + ix * pitch_x;
            g.yc[n] = y0 + iy * pitch_y;
        }
    }
    return g;
}

std::vector<double> feed_gain_vector(const SurfaceGeometry& geom, double rel_tol) {
    const double a = geom.feed_exponent;
    if (!(a > 1.0)) throw std::invalid_argument("feed_exponent must exceed 1");
    const double d0 = geom.feed_offset;
    const double d2 = d0 * d0;
    // (a+1) d0^(a+1) / (2 pi) out front; the element integral carries the rest.
    const double scale = (a + 1.0) * std::pow(d0, a + 1.0) / kTwoPi;
    const double expo = 0.5 * (a + 3.0);

    std::vector<double> out(static_cast<size_t>(geom.size()));
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    const double hx = 0.5 * geom.pitch_x;
    const double hy = 0.5 * geom.pitch_y;
    for (size_t n = 0; n < out.size(); ++n) {
        auto f = [&](double x, double y) {
            return scale / std::pow(d2 + x * x + y * y, expo);
        };
        try {
            out[n] = integrate2(f, geom.xc[n] - hx, geom.xc[n] + hx,
                                geom.yc[n] - hy, geom.yc[n] + hy, opt)
                         .value;
        } catch (const QuadratureError& e) {
            throw QuadratureError("feed gain integral failed at element " + std::to_string(n) +
                                      ": " + e.what(),
                                  e.best());
        }
    }
    return out;
}

UeGains ue_gain_vector(const SurfaceGeometry& geom, const LocalUePosition& q,
                       GainModel model, double rel_tol) {
    UeGains out;
    out.beta.assign(static_cast<size_t>(geom.size()), 0.0);
    // The normal component q.z equals range * sin(psi); it vanishes exactly when
    // the UE sits in the panel plane and no power is captured.
    if (q.z == 0.0) {
        out.grazing = true;
        return out;
    }

    if (model == GainModel::approximate) {
        const double num = q.z / (4.0 * kPi);
        for (size_t n = 0; n < out.beta.size(); ++n) {
            const double dx = q.x - geom.xc[n];
            const double dy = q.y - geom.yc[n];
            const double r2 = dx * dx + dy * dy + q.z * q.z;
            out.beta[n] = geom.element_area() * num / (r2 * std::sqrt(r2));
        }
        return out;
    }

    QuadOptions opt;
    opt.rel_tol = rel_tol;
    const double num = q.z / (4.0 * kPi);
    const double hx = 0.5 * geom.pitch_x;
    const double hy = 0.5 * geom.pitch_y;
    for (size_t n = 0; n < out.beta.size(); ++n) {
        auto f = [&](double x, double y) {
            const double dx = q.x - x;
            const double dy = q.y - y;
            const double r2 = dx * dx + dy * dy + q.z * q.z;
            return num / (r2 * std::sqrt(r2));
        };
        try {
            out.beta[n] = integrate2(f, geom.xc[n] - hx, geom.xc[n] + hx,
                                     geom.yc[n] - hy, geom.yc[n] + hy, opt)
                              .value;
        } catch (const QuadratureError& e) {
            throw QuadratureError("element gain integral failed at element " + std::to_string(n) +
                                      ": " + e.what(),
                                  e.best());
        }
    }
    return out;
}

std::vector<double> propagation_phases(const SurfaceGeometry& geom, const LocalUePosition& q,
                                       double wavelength, Wavefront wavefront) {
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
    const double k = kTwoPi / wavelength;
    const double d2 = geom.feed_offset * geom.feed_offset;
    std::vector<double> out(static_cast<size_t>(geom.size()));
    for (size_t n = 0; n < out.size(); ++n) {
        const double xn = geom.xc[n];
        const double yn = geom.yc[n];
        const double feed_path = std::sqrt(xn * xn + yn * yn + d2);
        double ue_path;
        if (wavefront == Wavefront::spherical) {
            const double dx = q.x - xn;
            const double dy = q.y - yn;
            ue_path = std::sqrt(dx * dx + dy * dy + q.z * q.z);
        } else {
            ue_path = q.range - (q.x * xn + q.y * yn) / q.range;
        }
        out[n] = std::remainder(-k * (feed_path + ue_path), kTwoPi);
    }
    return out;
}

std::complex<double> aggregate_channel(std::span<const double> amplitude,
                                       std::span<const double> propagation,
                                       std::span<const double> configured,
                                       std::span<const double> errors) {
    const size_t n = amplitude.size();
    if (propagation.size() != n || configured.size() != n)
        throw std::invalid_argument("channel aggregation: vector lengths differ");
    if (!errors.empty() && errors.size() != n)
        throw std::invalid_argument("channel aggregation: phase error length differs");
    std::complex<double> h{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        double phase = configured[i] + propagation[i];
        if (!errors.empty()) phase += errors[i];
        h += std::polar(amplitude[i], phase);
    }
    return h;
}

} // namespace rhs
