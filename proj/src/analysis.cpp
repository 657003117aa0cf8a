#include "rhs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "rhs/quadrature.hpp"

namespace rhs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// log2(1 + a/b), with the b -> 0 ceiling handled explicitly.
double ratio_rate(double a, double b) {
    if (b > 0.0) return std::log2(1.0 + a / b);
    return a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void check_bound_inputs(const BoundInputs& in) {
    if (in.coherent_gain < 0.0 || in.incoherent_gain < 0.0)
        throw std::invalid_argument("gain quantities must be nonnegative");
    if (!(in.density > 0.0)) throw std::invalid_argument("density must be positive");
    if (!(in.area > 0.0)) throw std::invalid_argument("area must be positive");
    if (in.rho.empty()) throw std::invalid_argument("need at least one UE power");
    for (double r : in.rho)
        if (r < 0.0) throw std::invalid_argument("transmit powers must be nonnegative");
    if (in.quality.eps_u < 0.0 || in.quality.eps_u > 1.0 || in.quality.eps_v < 0.0 ||
        in.quality.eps_v > 1.0)
        throw std::invalid_argument("hardware quality factors must lie in [0, 1]");
    if (in.xi < 0.0 || in.xi > 1.0)
        throw std::invalid_argument("mean resultant length must lie in [0, 1]");
    if (in.noise_power < 0.0) throw std::invalid_argument("noise power must be nonnegative");
}

double bound_sum(const BoundInputs& in, double noise_power) {
    const double k = static_cast<double>(in.rho.size());
    const double x2 = in.xi * in.xi;
    const double eu = in.quality.eps_u;
    const double ev = in.quality.eps_v;
    const double p = in.coherent_gain;
    const double g = in.incoherent_gain;
    const double eta = in.density;
    const double s = in.area;
    double total = 0.0;
    for (double rho : in.rho) {
        const double num = rho * eu * ev * x2 * (eta / k) * p;
        const double den = rho * ((1.0 - ev) / (eta * s) + (1.0 - eu) * ev / k) * x2 * eta * p +
                           rho * (1.0 - x2) * g / s + noise_power;
        total += ratio_rate(num, den);
    }
    return total;
}

struct GainKey {
    int nx, ny;
    double px, py, height, radius, tol;
    bool operator<(const GainKey& o) const {
        return std::tie(nx, ny, px, py, height, radius, tol) <
               std::tie(o.nx, o.ny, o.px, o.py, o.height, o.radius, o.tol);
    }
};

std::map<GainKey, std::vector<double>> g_gain_cache;
std::mutex g_gain_mutex;

} // namespace

double zeta_gain_density(double element_area, double height, double radius, double rel_tol) {
    if (!(element_area > 0.0)) throw std::invalid_argument("element_area must be positive");
    if (!(height > 0.0)) throw std::invalid_argument("height must be positive");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    const double h2 = height * height;
    auto f = [&](double r) {
        const double d2 = r * r + h2;
        return r * r / (d2 * std::sqrt(d2));
    };
    return element_area / kPi * integrate(f, 0.0, radius, opt).value;
}

double feed_amplitude_sum(double element_area, double feed_offset, double feed_exponent,
                          double rel_tol) {
    if (!(element_area > 0.0)) throw std::invalid_argument("element_area must be positive");
    if (!(feed_offset > 0.0)) throw std::invalid_argument("feed_offset must be positive");
    if (!(feed_exponent > 1.0))
        throw std::domain_error("feed amplitude sum diverges for feed_exponent <= 1");

    const double a = feed_exponent;
    const double d0 = feed_offset;
    const double scale =
        kTwoPi * std::sqrt((a + 1.0) * std::pow(d0, a + 1.0) / (kTwoPi * element_area));
    const double cut = 50.0 * d0;
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    auto f = [&](double r) { return r * std::pow(d0 * d0 + r * r, -0.25 * (a + 3.0)); };
    const double body = integrate(f, 0.0, cut, opt).value;
    const double tail = 2.0 * std::pow(d0 * d0 + cut * cut, 0.25 * (1.0 - a)) / (a - 1.0);
    return scale * (body + tail);
}

std::vector<double> disk_average_gains(const SurfaceGeometry& geom, double height,
                                       double radius, double rel_tol) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    const double y_min = *std::min_element(geom.yc.begin(), geom.yc.end());
    if (!(height + y_min > 0.0))
        throw std::invalid_argument("height must clear the lower edge of the panel");

    const GainKey key{geom.nx, geom.ny, geom.pitch_x, geom.pitch_y, height, radius, rel_tol};
    std::lock_guard<std::mutex> lock(g_gain_mutex);
    auto it = g_gain_cache.find(key);
    if (it != g_gain_cache.end()) return it->second;

    QuadOptions opt;
    opt.rel_tol = rel_tol;
    const double scale = geom.element_area() / kTwoPi;
    std::vector<double> out(static_cast<size_t>(geom.size()));
    // The disk average is even in the lateral offset (w -> pi - w flips the
    // cross term), so mirrored columns share one integral.
    std::map<std::pair<double, double>, double> mirror;
    for (size_t n = 0; n < out.size(); ++n) {
        const double xn = std::abs(geom.xc[n]);
        const double hn = height + geom.yc[n];
        const auto memo = mirror.find({xn, hn});
        if (memo != mirror.end()) {
            out[n] = memo->second;
            continue;
        }
        const double c2 = xn * xn + hn * hn;
        auto f = [&](double r, double w) {
            const double d2 = r * r + 2.0 * r * xn * std::cos(w) + c2;
            return r * r * std::sin(w) / (d2 * std::sqrt(d2));
        };
        out[n] = scale * integrate2(f, 0.0, radius, 0.0, kPi, opt).value;
        mirror.emplace(std::make_pair(xn, hn), out[n]);
    }
    g_gain_cache.emplace(key, out);
    return out;
}

double coherent_gain(std::span<const double> feed_gain, std::span<const double> avg_gain) {
    if (feed_gain.size() != avg_gain.size())
        throw std::invalid_argument("gain vector lengths differ");
    double sum = 0.0;
    for (size_t n = 0; n < feed_gain.size(); ++n) {
        if (feed_gain[n] < 0.0 || avg_gain[n] < 0.0)
            throw std::invalid_argument("gains must be nonnegative");
        sum += std::sqrt(feed_gain[n] * avg_gain[n]);
    }
    return sum * sum;
}

double incoherent_gain(std::span<const double> feed_gain, std::span<const double> avg_gain) {
    if (feed_gain.size() != avg_gain.size())
        throw std::invalid_argument("gain vector lengths differ");
    double sum = 0.0;
    for (size_t n = 0; n < feed_gain.size(); ++n) sum += feed_gain[n] * avg_gain[n];
    return sum;
}

double sum_rate_upper_bound(const BoundInputs& in) {
    check_bound_inputs(in);
    return bound_sum(in, in.noise_power);
}

double high_power_limit(const BoundInputs& in) {
    check_bound_inputs(in);
    return bound_sum(in, 0.0);
}

SpecialCaseBounds special_case_bounds(const BoundInputs& in) {
    check_bound_inputs(in);
    const double k = static_cast<double>(in.rho.size());
    const double eu = in.quality.eps_u;
    const double ev = in.quality.eps_v;
    const double x2 = in.xi * in.xi;

    SpecialCaseBounds out;
    BoundInputs tmp = in;
    tmp.quality = {in.quality.eps_u, 1.0};
    tmp.xi = 1.0;
    out.ue_only = bound_sum(tmp, in.noise_power);
    tmp.quality = {1.0, in.quality.eps_v};
    out.bs_only = bound_sum(tmp, in.noise_power);
    tmp.quality = {1.0, 1.0};
    tmp.xi = in.xi;
    out.phase_only = bound_sum(tmp, in.noise_power);

    out.ue_limit = k * ratio_rate(eu, 1.0 - eu);
    out.bs_limit = k * ratio_rate(ev * in.density * in.area, k * (1.0 - ev));
    out.phase_limit = k * ratio_rate(x2 * in.density * in.area * in.coherent_gain,
                                     k * (1.0 - x2) * in.incoherent_gain);
    return out;
}

double sum_rate_infinite_surface(const BoundInputs& in, double element_area,
                                 double feed_offset, double feed_exponent, double height) {
    check_bound_inputs(in);
    const double radius = std::sqrt(in.area / kPi);
    const double zeta = zeta_gain_density(element_area, height, radius);
    const double eps = feed_amplitude_sum(element_area, feed_offset, feed_exponent);
    BoundInputs cont = in;
    cont.coherent_gain = zeta * eps * eps;
    cont.incoherent_gain = zeta;
    return bound_sum(cont, in.noise_power);
}

} // namespace rhs
