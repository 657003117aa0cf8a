#pragma once

// Hardware imperfection models: the per-element phase error of the surface
// (uniform or von Mises, parameterized so that the mean resultant xi and the
// nominal error power sigma_p^2 follow the usual circular-statistics
// conventions) and the RF-chain quality factors of the transceivers.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace rhs {

struct PhaseErrorModel {
    enum class Kind { none, uniform, von_mises };

    Kind kind = Kind::none;
    double spread = 0.0;         // uniform half-width iota_p, radians in (0, pi]
    double concentration = 0.0;  // von Mises concentration, > 0

    bool operator==(const PhaseErrorModel&) const = default;

    static PhaseErrorModel none() { return {}; }
    static PhaseErrorModel uniform(double spread);
    static PhaseErrorModel von_mises(double concentration);
    // Build the model whose nominal error power (see phase_error_power) equals
    // the given sigma_p^2: uniform needs spread sqrt(3 sigma^2) <= pi.
    static PhaseErrorModel from_power(Kind kind, double power);
};

struct HardwareQuality {
    double eps_u = 1.0;  // UE RF chain, in [0, 1], 1 = ideal
    double eps_v = 1.0;  // BS RF chain, in [0, 1], 1 = ideal

    bool operator==(const HardwareQuality&) const = default;
};

// Mean resultant length E[e^{j theta}]: 1 for none, sin(i)/i for uniform,
// I1(w)/I0(w) for von Mises. Always real and in (0, 1] for valid models
// (uniform with spread pi gives exactly 0).
double xi(const PhaseErrorModel& model);

// Nominal error power sigma_p^2 under the model's reporting convention:
// spread^2/3 (uniform, exact) or 1/concentration (von Mises, the customary
// large-concentration surrogate). See phase_error_power_exact for the true
// second moment.
double phase_error_power(const PhaseErrorModel& model);

// Exact E[theta^2] on the wrapped support (-pi, pi]. Differs from
// phase_error_power for von Mises at small concentrations; exposed for
// diagnostics and used by the sampler tests.
double phase_error_power_exact(const PhaseErrorModel& model);

// i.i.d. phase error draws. Uniform uses the inverse transform; von Mises the
// Best-Fisher (1979) wrapped-Cauchy rejection sampler.
void sample_errors(const PhaseErrorModel& model, std::span<double> out, std::mt19937_64& rng);
std::vector<double> sample_errors(const PhaseErrorModel& model, std::size_t n, std::mt19937_64& rng);

} // namespace rhs
