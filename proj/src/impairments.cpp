#include "rhs/impairments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rhs/quadrature.hpp"
#include "rhs/special.hpp"

namespace rhs {

PhaseErrorModel PhaseErrorModel::uniform(double spread) {
    if (!(spread > 0.0) || spread > std::numbers::pi) {
        throw std::invalid_argument("phase error spread must lie in (0, pi]");
    }
    PhaseErrorModel m;
    m.kind = Kind::uniform;
    m.spread = spread;
    return m;
}

PhaseErrorModel PhaseErrorModel::von_mises(double concentration) {
    if (!(concentration > 0.0)) {
        throw std::invalid_argument("phase error concentration must be positive");
    }
    PhaseErrorModel m;
    m.kind = Kind::von_mises;
    m.concentration = concentration;
    return m;
}

PhaseErrorModel PhaseErrorModel::from_power(Kind kind, double power) {
    if (power == 0.0) return none();
    if (!(power > 0.0)) throw std::invalid_argument("phase error power must be nonnegative");
    switch (kind) {
        case Kind::none:
            throw std::invalid_argument("phase error power > 0 needs a distribution kind");
        case Kind::uniform:
            return uniform(std::sqrt(3.0 * power));
        case Kind::von_mises:
            return von_mises(1.0 / power);
    }
    throw std::logic_error("unreachable");
}

double xi(const PhaseErrorModel& model) {
    switch (model.kind) {
        case PhaseErrorModel::Kind::none:
            return 1.0;
        case PhaseErrorModel::Kind::uniform:
            return std::sin(model.spread) / model.spread;
        case PhaseErrorModel::Kind::von_mises:
            return bessel_i1_i0_ratio(model.concentration);
    }
    throw std::logic_error("unreachable");
}

double phase_error_power(const PhaseErrorModel& model) {
    switch (model.kind) {
        case PhaseErrorModel::Kind::none:
            return 0.0;
        case PhaseErrorModel::Kind::uniform:
            return model.spread * model.spread / 3.0;
        case PhaseErrorModel::Kind::von_mises:
            return 1.0 / model.concentration;
    }
    throw std::logic_error("unreachable");
}

double phase_error_power_exact(const PhaseErrorModel& model) {
    if (model.kind != PhaseErrorModel::Kind::von_mises) return phase_error_power(model);
    // E[theta^2] on (-pi, pi]: 2 int_0^pi t^2 e^{w cos t} dt / (2 pi I0(w)).
    const double w = model.concentration;
    const double norm = 2.0 * std::numbers::pi * bessel_i0(w);
    // exp(w cos t - w) keeps the integrand bounded for large w; scale back after.
    auto f = [w](double t) { return t * t * std::exp(w * (std::cos(t) - 1.0)); };
    const double integral = integrate(f, 0.0, std::numbers::pi, {.rel_tol = 1e-10}).value;
    return 2.0 * integral * std::exp(w) / norm;
}

namespace {

double draw_von_mises(double concentration, std::mt19937_64& rng) {
    // Best & Fisher (1979): rejection from a wrapped Cauchy envelope.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double k = concentration;
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * k);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
        const double z = std::cos(std::numbers::pi * unif(rng));
        const double f = (1.0 + r * z) / (r + z);
        const double c = k * (r - f);
        const double u2 = unif(rng);
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double angle = std::acos(std::clamp(f, -1.0, 1.0));
            return unif(rng) < 0.5 ? -angle : angle;
        }
    }
}

} // namespace

void sample_errors(const PhaseErrorModel& model, std::span<double> out, std::mt19937_64& rng) {
    switch (model.kind) {
        case PhaseErrorModel::Kind::none:
            for (double& v : out) v = 0.0;
            return;
        case PhaseErrorModel::Kind::uniform: {
            std::uniform_real_distribution<double> unif(-model.spread, model.spread);
            for (double& v : out) v = unif(rng);
            return;
        }
        case PhaseErrorModel::Kind::von_mises:
            for (double& v : out) v = draw_von_mises(model.concentration, rng);
            return;
    }
}

std::vector<double> sample_errors(const PhaseErrorModel& model, std::size_t n,
                                  std::mt19937_64& rng) {
    std::vector<double> out(n);
    sample_errors(model, std::span<double>(out), rng);
    return out;
}

} // namespace rhs
