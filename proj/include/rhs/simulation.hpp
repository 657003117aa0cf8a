#pragma once

// Monte Carlo orchestration. A trial is fully determined by (master seed,
// trial index): the geometry draw order inside a trial is fixed (BS count,
// BS centers, panel azimuths, then UE positions), every trial writes into its
// own result slot, and reductions are pairwise in index order, so results are
// identical whatever the thread count.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rhs/analysis.hpp"
#include "rhs/beamforming.hpp"
#include "rhs/channel.hpp"
#include "rhs/geometry.hpp"
#include "rhs/impairments.hpp"

namespace rhs {

enum class ChannelMode {
    near_field,      // exact spherical wavefronts for design and evaluation
    far_synthetic,   // planar-wavefront channels throughout (design and evaluation)
    far_mismatched,  // planar-designed phases evaluated on the true near-field channel
};

struct ExperimentConfig {
    double wavelength = 0.01;
    double density = 1e-3;         // BS per square meter
    double region_radius = 100.0;  // coverage disk, meters
    int nx = 64, ny = 64;
    double pitch_x = 0.005, pitch_y = 0.005;
    double feed_offset = 0.2;
    double feed_exponent = 4.0;
    double bs_height = 10.0;
    int num_ues = 1;
    double tx_power = 100.0;    // linear, common to every UE (20 dB over unit power)
    double noise_power = 1e-12;
    PhaseErrorModel phase_error;
    HardwareQuality quality;
    ChannelMode channel_mode = ChannelMode::near_field;
    bool naive_combiner = false;  // combine as if hardware were ideal, evaluate with the truth
    int trials = 1000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = one worker per hardware thread

    // Sweep grids used by the matching CLI subcommands.
    std::vector<double> sweep_power_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    std::vector<double> sweep_density = {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2};
    std::vector<double> sweep_elements = {8, 16, 32, 64};

    SurfaceGeometry surface() const {
        return SurfaceGeometry::regular(nx, ny, pitch_x, pitch_y, feed_offset, feed_exponent);
    }

    bool operator==(const ExperimentConfig&) const = default;
};

// Surface-level quantities every trial shares. feed_amp caches sqrt(feed_gain)
// elementwise so the planar-channel fast path is a pure table lookup.
struct Precomputed {
    SurfaceGeometry geom;
    std::vector<double> feed_gain;  // per element
    std::vector<double> feed_amp;   // sqrt of the above
    double feed_gain_sum = 0.0;
    double feed_amp_sum = 0.0;
};

Precomputed precompute(const ExperimentConfig& cfg);

struct TrialRealization {
    NetworkRealization network;
    UeLayout ues;
    std::vector<std::size_t> focus;  // focus[l] = UE the panel of BS l is configured toward
};

// Geometry draw for one trial. One UE sits at the disk center (the typical
// point of the single-UE analysis); several UEs are i.i.d. uniform on the
// disk. Panels focus on their nearest UE.
TrialRealization draw_trial(const ExperimentConfig& cfg, std::uint64_t trial);

// Mean channels h (phase errors stripped) and per-BS element power sums q for
// one realization, under the configured channel mode. Panels focused on a UE
// contribute a plain amplitude sum; cross terms carry the residual phases.
ChannelStats build_channel_stats(const ExperimentConfig& cfg, const Precomputed& pre,
                                 const TrialRealization& trial);

// Flat per-element amplitudes and static phases (configured + propagation) for
// every (BS, UE) pair. Only the validation paths need this level of detail;
// the amplitude layout is row-major in (l, k).
struct ElementChannels {
    int num_bs = 0;
    int num_ues = 0;
    int num_elements = 0;
    std::vector<double> amplitude;
    std::vector<double> phase;

    std::size_t offset(int l, int k) const {
        return (static_cast<std::size_t>(l) * num_ues + k) * num_elements;
    }
    std::span<const double> amp(int l, int k) const {
        return {amplitude.data() + offset(l, k), static_cast<std::size_t>(num_elements)};
    }
    std::span<const double> phi(int l, int k) const {
        return {phase.data() + offset(l, k), static_cast<std::size_t>(num_elements)};
    }
};

ElementChannels build_element_channels(const ExperimentConfig& cfg, const Precomputed& pre,
                                       const TrialRealization& trial);

// Aggregate the element channels with zero phase error; must agree with
// build_channel_stats on the same realization.
ChannelStats stats_from_elements(const ElementChannels& elems);

struct TrialResult {
    std::vector<double> per_user_rate;
    double sum_rate = 0.0;
    std::size_t num_bs = 0;
};

// One full trial: draw geometry, build stats, combine, report rates. Empty
// networks yield zero rate. With naive_combiner set, the combiner is computed
// from ideal-hardware statistics and then judged against the true ones.
TrialResult run_trial(const ExperimentConfig& cfg, const Precomputed& pre, std::uint64_t trial);

struct RatePoint {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

RatePoint ergodic_rate(const ExperimentConfig& cfg, const Precomputed& pre);

// Analytic-bound inputs matching a simulation configuration: feed gains from
// pre, disk-averaged UE gains for the configured height and radius.
BoundInputs bound_inputs(const ExperimentConfig& cfg, const Precomputed& pre);

enum class SweepAxis { power_db, density, elements, wavelength };

// The configuration actually simulated at one sweep point: the axis value
// substituted into the base config (transmit power given in dB, density,
// elements per side, or wavelength).
ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value);

struct SweepPoint {
    double axis_value = 0.0;
    RatePoint rate;
    double bound = 0.0;        // finite-power analytic upper bound at this point
    double bound_limit = 0.0;  // its high-power ceiling (may be infinite)
};

// One ergodic-rate estimate per axis value, same master seed at every point
// (common random numbers), with the matching analytic bound attached.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<double>& values);

struct CovarianceCheck {
    double max_abs_error = 0.0;  // max entrywise |E_hat[h h^H] - C| over users
    double scale = 0.0;          // max element power sum (max diagonal of Q), the normalization
    double rel_error = 0.0;
    int draws = 0;
    int num_bs = 0;
};

// Fix one realization, redraw only the phase errors, and compare the
// empirical second moment of the aggregated channels against the analytic
// covariance. Advances the trial index until the network is nonempty.
CovarianceCheck validate_covariance(const ExperimentConfig& cfg, const Precomputed& pre,
                                    int draws);

struct SymbolLevelCheck {
    // Term order: desired, phase noise, UE distortion, BS distortion,
    // inter-user, thermal noise.
    std::array<double, 6> analytic{};
    std::array<double, 6> empirical{};
    std::array<double, 6> std_error{};
    double max_sigma = 0.0;  // worst |empirical - analytic| in standard errors
    int symbols = 0;
};

// Symbol-by-symbol transmission through the distortion model (fresh symbols,
// distortions, noise, and phase errors each use), binned into the six powers
// of the SINR decomposition and compared against their analytic values.
SymbolLevelCheck validate_symbol_level(const ExperimentConfig& cfg, const Precomputed& pre,
                                       int symbols, int user = 0);

} // namespace rhs
