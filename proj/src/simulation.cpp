#include "rhs/simulation.hpp"

#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "rhs/rng.hpp"

namespace rhs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// Offsets keeping the validation RNG streams clear of the per-trial streams,
// which use small indices.
constexpr std::uint64_t kCovarianceStream = 1ULL << 62;
constexpr std::uint64_t kSymbolStream = (1ULL << 62) + (1ULL << 61);

int worker_count(int configured, int jobs) {
    int t = configured > 0 ? configured : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return std::min(t, std::max(jobs, 1));
}

template <typename F>
void parallel_for(int n, int threads, F&& f) {
    if (n <= 0) return;
    const int t = worker_count(threads, n);
    if (t == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::mutex err_mutex;
    std::exception_ptr first_error;
    for (int w = 0; w < t; ++w) {
        const int lo = static_cast<int>(static_cast<long long>(n) * w / t);
        const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / t);
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Summation order is fixed by index, not by thread schedule.
double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

Wavefront design_wavefront(ChannelMode m) {
    return m == ChannelMode::near_field ? Wavefront::spherical : Wavefront::planar;
}

Wavefront eval_wavefront(ChannelMode m) {
    return m == ChannelMode::far_synthetic ? Wavefront::planar : Wavefront::spherical;
}

// Element gain of the planar-channel fiction: the near-field value at the
// panel origin, shared by every element.
double center_element_gain(const SurfaceGeometry& geom, const LocalUePosition& q) {
    if (q.z == 0.0) return 0.0;
    return geom.element_area() * q.z / (4.0 * kPi * q.range * q.range * q.range);
}

std::vector<LocalUePosition> local_positions(const BsSite& site, const UeLayout& ues) {
    std::vector<LocalUePosition> out;
    out.reserve(ues.count());
    for (const Vec2& ue : ues.positions) out.push_back(local_frame_position(site, ue));
    return out;
}

std::complex<double> unit_normal(std::normal_distribution<double>& gauss,
                                 std::mt19937_64& rng) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {re, im};
}

} // namespace

Precomputed precompute(const ExperimentConfig& cfg) {
    Precomputed p;
    p.geom = cfg.surface();
    p.feed_gain = feed_gain_vector(p.geom);
    p.feed_amp.resize(p.feed_gain.size());
    for (std::size_t n = 0; n < p.feed_gain.size(); ++n) {
        p.feed_amp[n] = std::sqrt(p.feed_gain[n]);
        p.feed_gain_sum += p.feed_gain[n];
        p.feed_amp_sum += p.feed_amp[n];
    }
    return p;
}

TrialRealization draw_trial(const ExperimentConfig& cfg, std::uint64_t trial) {
    if (cfg.num_ues < 1) throw std::invalid_argument("num_ues must be at least 1");
    std::mt19937_64 rng = substream(cfg.seed, trial);

    TrialRealization t;
    const Region region{cfg.region_radius};
    t.network = sample_ppp(region, cfg.density, cfg.bs_height, rng);

    if (cfg.num_ues == 1) {
        t.ues.positions = {Vec2{0.0, 0.0}};
    } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        t.ues.positions.reserve(cfg.num_ues);
        for (int k = 0; k < cfg.num_ues; ++k) {
            const double r = cfg.region_radius * std::sqrt(unit(rng));
            const double ang = kTwoPi * unit(rng);
            t.ues.positions.push_back({r * std::cos(ang), r * std::sin(ang)});
        }
    }

    const auto sets = serving_sets(t.network, t.ues);
    t.focus.assign(t.network.count(), 0);
    for (std::size_t k = 0; k < sets.size(); ++k)
        for (std::size_t l : sets[k]) t.focus[l] = k;
    return t;
}

ChannelStats build_channel_stats(const ExperimentConfig& cfg, const Precomputed& pre,
                                 const TrialRealization& trial) {
    const int num_bs = static_cast<int>(trial.network.count());
    const int num_ues = static_cast<int>(trial.ues.count());
    const std::size_t n_elem = pre.feed_gain.size();
    const bool synthetic = cfg.channel_mode == ChannelMode::far_synthetic;
    const bool mismatched = cfg.channel_mode == ChannelMode::far_mismatched;
    const Wavefront dw = design_wavefront(cfg.channel_mode);
    const Wavefront ew = eval_wavefront(cfg.channel_mode);

    ChannelStats st;
    st.h = Eigen::MatrixXcd::Zero(num_bs, num_ues);
    st.q = Eigen::MatrixXd::Zero(num_bs, num_ues);

    std::vector<double> amp(n_elem);
    for (int l = 0; l < num_bs; ++l) {
        const auto pos = local_positions(trial.network.sites[l], trial.ues);
        const int k0 = static_cast<int>(trial.focus[l]);
        std::vector<double> design;  // built only when a phase sum is unavoidable
        for (int k = 0; k < num_ues; ++k) {
            if (synthetic) {
                const double bc = center_element_gain(pre.geom, pos[k]);
                st.q(l, k) = bc * pre.feed_gain_sum;
                const double root = std::sqrt(bc);
                if (k == k0) {
                    st.h(l, k) = pre.feed_amp_sum * root;
                    continue;
                }
                for (std::size_t n = 0; n < n_elem; ++n) amp[n] = pre.feed_amp[n] * root;
            } else {
                const UeGains g = ue_gain_vector(pre.geom, pos[k]);
                double power = 0.0, straight = 0.0;
                for (std::size_t n = 0; n < n_elem; ++n) {
                    const double p = pre.feed_gain[n] * g.beta[n];
                    power += p;
                    amp[n] = std::sqrt(p);
                    straight += amp[n];
                }
                st.q(l, k) = power;
                if (!mismatched && k == k0) {
                    st.h(l, k) = straight;
                    continue;
                }
            }
            if (design.empty())
                design = holographic_phases(pre.geom, pos[k0], cfg.wavelength, dw);
            const auto prop = propagation_phases(pre.geom, pos[k], cfg.wavelength, ew);
            st.h(l, k) = aggregate_channel(amp, prop, design, {});
        }
    }
    return st;
}

ElementChannels build_element_channels(const ExperimentConfig& cfg, const Precomputed& pre,
                                       const TrialRealization& trial) {
    const int num_bs = static_cast<int>(trial.network.count());
    const int num_ues = static_cast<int>(trial.ues.count());
    const int n_elem = static_cast<int>(pre.feed_gain.size());
    const bool synthetic = cfg.channel_mode == ChannelMode::far_synthetic;

    ElementChannels ec;
    ec.num_bs = num_bs;
    ec.num_ues = num_ues;
    ec.num_elements = n_elem;
    ec.amplitude.resize(static_cast<std::size_t>(num_bs) * num_ues * n_elem);
    ec.phase.resize(ec.amplitude.size());

    for (int l = 0; l < num_bs; ++l) {
        const auto pos = local_positions(trial.network.sites[l], trial.ues);
        const int k0 = static_cast<int>(trial.focus[l]);
        const auto design = holographic_phases(pre.geom, pos[k0], cfg.wavelength,
                                               design_wavefront(cfg.channel_mode));
        for (int k = 0; k < num_ues; ++k) {
            const std::size_t off = ec.offset(l, k);
            if (synthetic) {
                const double root = std::sqrt(center_element_gain(pre.geom, pos[k]));
                for (int n = 0; n < n_elem; ++n)
                    ec.amplitude[off + n] = pre.feed_amp[n] * root;
            } else {
                const UeGains g = ue_gain_vector(pre.geom, pos[k]);
                for (int n = 0; n < n_elem; ++n)
                    ec.amplitude[off + n] = std::sqrt(pre.feed_gain[n] * g.beta[n]);
            }
            const auto prop = propagation_phases(pre.geom, pos[k], cfg.wavelength,
                                                 eval_wavefront(cfg.channel_mode));
            for (int n = 0; n < n_elem; ++n) ec.phase[off + n] = design[n] + prop[n];
        }
    }
    return ec;
}

ChannelStats stats_from_elements(const ElementChannels& elems) {
    ChannelStats st;
    st.h = Eigen::MatrixXcd::Zero(elems.num_bs, elems.num_ues);
    st.q = Eigen::MatrixXd::Zero(elems.num_bs, elems.num_ues);
    for (int l = 0; l < elems.num_bs; ++l) {
        for (int k = 0; k < elems.num_ues; ++k) {
            const auto a = elems.amp(l, k);
            const auto p = elems.phi(l, k);
            std::complex<double> h{0.0, 0.0};
            double q = 0.0;
            for (int n = 0; n < elems.num_elements; ++n) {
                h += std::polar(a[n], p[n]);
                q += a[n] * a[n];
            }
            st.h(l, k) = h;
            st.q(l, k) = q;
        }
    }
    return st;
}

TrialResult run_trial(const ExperimentConfig& cfg, const Precomputed& pre,
                      std::uint64_t trial) {
    const TrialRealization t = draw_trial(cfg, trial);

    TrialResult res;
    res.num_bs = t.network.count();
    res.per_user_rate.assign(cfg.num_ues, 0.0);
    if (res.num_bs == 0) return res;

    const ChannelStats st = build_channel_stats(cfg, pre, t);
    const Eigen::VectorXd rho = Eigen::VectorXd::Constant(cfg.num_ues, cfg.tx_power);
    const double x = xi(cfg.phase_error);

    if (cfg.naive_combiner) {
        // Combiner built as if the hardware were clean, judged on the truth.
        const Eigen::MatrixXcd b =
            mmse_combiner(st, rho, HardwareQuality{}, 1.0, cfg.noise_power);
        for (int k = 0; k < cfg.num_ues; ++k) {
            const SinrReport rep =
                sinr_general(st, b.col(k), k, rho, cfg.quality, x, cfg.noise_power);
            res.per_user_rate[k] = rep.rate;
            res.sum_rate += rep.rate;
        }
    } else {
        const std::vector<double> gamma = sinr_mmse(st, rho, cfg.quality, x, cfg.noise_power);
        for (int k = 0; k < cfg.num_ues; ++k) {
            const double rate = std::log2(1.0 + gamma[static_cast<std::size_t>(k)]);
            res.per_user_rate[k] = rate;
            res.sum_rate += rate;
        }
    }
    return res;
}

RatePoint ergodic_rate(const ExperimentConfig& cfg, const Precomputed& pre) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
    std::vector<double> rates(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
        rates[static_cast<std::size_t>(t)] =
            run_trial(cfg, pre, static_cast<std::uint64_t>(t)).sum_rate;
    });

    RatePoint out;
    out.trials = cfg.trials;
    const std::size_t n = rates.size();
    out.mean = pairwise_sum(rates.data(), n) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> dev2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = rates[i] - out.mean;
            dev2[i] = d * d;
        }
        const double var = pairwise_sum(dev2.data(), n) / static_cast<double>(n - 1);
        out.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return out;
}

BoundInputs bound_inputs(const ExperimentConfig& cfg, const Precomputed& pre) {
    const std::vector<double> avg =
        disk_average_gains(pre.geom, cfg.bs_height, cfg.region_radius);
    BoundInputs bi;
    bi.coherent_gain = coherent_gain(pre.feed_gain, avg);
    bi.incoherent_gain = incoherent_gain(pre.feed_gain, avg);
    bi.density = cfg.density;
    bi.area = Region{cfg.region_radius}.area();
    bi.rho.assign(static_cast<std::size_t>(cfg.num_ues), cfg.tx_power);
    bi.quality = cfg.quality;
    bi.xi = xi(cfg.phase_error);
    bi.noise_power = cfg.noise_power;
    return bi;
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::power_db:
            cfg.tx_power = std::pow(10.0, value / 10.0);
            break;
        case SweepAxis::density:
            if (!(value > 0.0))
                throw std::invalid_argument("density sweep values must be positive");
            cfg.density = value;
            break;
        case SweepAxis::elements: {
            const long side = std::lround(value);
            if (side < 1 || std::abs(value - static_cast<double>(side)) > 1e-9)
                throw std::invalid_argument(
                    "element sweep values must be positive integers (elements per side)");
            cfg.nx = cfg.ny = static_cast<int>(side);
            break;
        }
        case SweepAxis::wavelength:
            if (!(value > 0.0))
                throw std::invalid_argument("wavelength sweep values must be positive");
            cfg.wavelength = value;
            break;
    }
    return cfg;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep values must be nonempty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1])
            throw std::invalid_argument("sweep values must be sorted ascending");

    Precomputed shared;
    bool have_shared = false;
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (double v : values) {
        const ExperimentConfig cfg = apply_axis(base, axis, v);
        const bool geometry_changes = axis == SweepAxis::elements;
        if (geometry_changes) {
            shared = precompute(cfg);
        } else if (!have_shared) {
            shared = precompute(cfg);
            have_shared = true;
        }

        SweepPoint p;
        p.axis_value = v;
        p.rate = ergodic_rate(cfg, shared);
        const BoundInputs bi = bound_inputs(cfg, shared);
        p.bound = sum_rate_upper_bound(bi);
        p.bound_limit = high_power_limit(bi);
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

// First realization with at least one BS, advancing the trial index.
TrialRealization nonempty_realization(const ExperimentConfig& cfg, std::uint64_t* index_out) {
    for (std::uint64_t idx = 0;; ++idx) {
        TrialRealization t = draw_trial(cfg, idx);
        if (t.network.count() > 0) {
            if (index_out) *index_out = idx;
            return t;
        }
        if (idx > 100000)
            throw std::runtime_error("no nonempty network realization found; density too low");
    }
}

} // namespace

CovarianceCheck validate_covariance(const ExperimentConfig& cfg, const Precomputed& pre,
                                    int draws) {
    if (draws < 1) throw std::invalid_argument("draws must be at least 1");
    std::uint64_t idx = 0;
    const TrialRealization t = nonempty_realization(cfg, &idx);
    const ElementChannels ec = build_element_channels(cfg, pre, t);
    const ChannelStats st = stats_from_elements(ec);

    const int num_bs = ec.num_bs;
    const int num_ues = ec.num_ues;
    const int n_elem = ec.num_elements;

    // Static per-element phasors; each draw only multiplies in the error term.
    std::vector<std::complex<double>> base(ec.phase.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        base[i] = std::polar(ec.amplitude[i], ec.phase[i]);

    std::mt19937_64 rng = substream(cfg.seed, kCovarianceStream + idx);
    std::vector<double> errors(static_cast<std::size_t>(num_bs) * n_elem);
    std::vector<std::complex<double>> twist(errors.size());
    Eigen::VectorXcd h(num_bs);
    std::vector<Eigen::MatrixXcd> acc(static_cast<std::size_t>(num_ues),
                                      Eigen::MatrixXcd::Zero(num_bs, num_bs));

    for (int d = 0; d < draws; ++d) {
        sample_errors(cfg.phase_error, errors, rng);
        for (std::size_t i = 0; i < errors.size(); ++i)
            twist[i] = std::polar(1.0, errors[i]);
        for (int k = 0; k < num_ues; ++k) {
            for (int l = 0; l < num_bs; ++l) {
                const std::size_t off = ec.offset(l, k);
                const std::size_t err_off = static_cast<std::size_t>(l) * n_elem;
                std::complex<double> sum{0.0, 0.0};
                for (int n = 0; n < n_elem; ++n) sum += base[off + n] * twist[err_off + n];
                h[l] = sum;
            }
            acc[static_cast<std::size_t>(k)].noalias() += h * h.adjoint();
        }
    }

    CovarianceCheck out;
    out.draws = draws;
    out.num_bs = num_bs;
    out.scale = st.q.maxCoeff();
    const double x = xi(cfg.phase_error);
    for (int k = 0; k < num_ues; ++k) {
        const Eigen::MatrixXcd c = covariance(st.h.col(k), st.q.col(k), x);
        const Eigen::MatrixXcd emp = acc[static_cast<std::size_t>(k)] / static_cast<double>(draws);
        out.max_abs_error = std::max(out.max_abs_error, (emp - c).cwiseAbs().maxCoeff());
    }
    out.rel_error = out.max_abs_error / out.scale;
    return out;
}

SymbolLevelCheck validate_symbol_level(const ExperimentConfig& cfg, const Precomputed& pre,
                                       int symbols, int user) {
    if (symbols < 2) throw std::invalid_argument("need at least 2 symbols");
    if (user < 0 || user >= cfg.num_ues) throw std::invalid_argument("user index out of range");

    std::uint64_t idx = 0;
    const TrialRealization t = nonempty_realization(cfg, &idx);
    const ElementChannels ec = build_element_channels(cfg, pre, t);
    const ChannelStats st = stats_from_elements(ec);
    const int num_bs = ec.num_bs;
    const int num_ues = ec.num_ues;
    const int n_elem = ec.num_elements;

    const Eigen::VectorXd rho_vec = Eigen::VectorXd::Constant(num_ues, cfg.tx_power);
    const double x = xi(cfg.phase_error);
    const Eigen::MatrixXcd combiners =
        cfg.naive_combiner ? mmse_combiner(st, rho_vec, HardwareQuality{}, 1.0, cfg.noise_power)
                           : mmse_combiner(st, rho_vec, cfg.quality, x, cfg.noise_power);
    const Eigen::VectorXcd b = combiners.col(user);

    const SinrReport rep =
        sinr_general(st, b, user, rho_vec, cfg.quality, x, cfg.noise_power);

    SymbolLevelCheck out;
    out.symbols = symbols;
    out.analytic = {rep.desired,      rep.phase_noise, rep.ue_distortion,
                    rep.bs_distortion, rep.inter_user,  rep.noise};

    std::vector<std::complex<double>> base(ec.phase.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        base[i] = std::polar(ec.amplitude[i], ec.phase[i]);

    const double rho = cfg.tx_power;
    const double eu = cfg.quality.eps_u;
    const double ev = cfg.quality.eps_v;
    const double g_sig = std::sqrt(rho * eu * ev);
    const double g_ue = std::sqrt(rho * (1.0 - eu) * ev);
    const double g_bs = std::sqrt(rho * (1.0 - ev));
    const double g_w = std::sqrt(cfg.noise_power / 2.0);

    const Eigen::VectorXcd mean_user = x * st.h.col(user);  // deterministic channel part

    std::mt19937_64 rng = substream(cfg.seed, kSymbolStream + idx);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::normal_distribution<double> raw(0.0, 1.0);

    std::vector<double> errors(static_cast<std::size_t>(num_bs) * n_elem);
    Eigen::MatrixXcd chan(num_bs, num_ues);
    std::array<double, 6> sum{}, sum2{};

    for (int s = 0; s < symbols; ++s) {
        // Draw order: phase errors, per-UE symbol + transmit distortion,
        // per-(UE, BS) receive distortion, per-BS noise.
        sample_errors(cfg.phase_error, errors, rng);
        for (int l = 0; l < num_bs; ++l) {
            const std::size_t err_off = static_cast<std::size_t>(l) * n_elem;
            for (int k = 0; k < num_ues; ++k) {
                const std::size_t off = ec.offset(l, k);
                std::complex<double> acc{0.0, 0.0};
                for (int n = 0; n < n_elem; ++n)
                    acc += base[off + n] * std::polar(1.0, errors[err_off + n]);
                chan(l, k) = acc;
            }
        }

        std::vector<std::complex<double>> sym(num_ues), dist(num_ues);
        for (int k = 0; k < num_ues; ++k) {
            sym[static_cast<std::size_t>(k)] = unit_normal(gauss, rng);
            dist[static_cast<std::size_t>(k)] = unit_normal(gauss, rng);
        }
        Eigen::MatrixXcd recv(num_bs, num_ues);
        for (int k = 0; k < num_ues; ++k)
            for (int l = 0; l < num_bs; ++l) recv(l, k) = unit_normal(gauss, rng);
        Eigen::VectorXcd noise(num_bs);
        for (int l = 0; l < num_bs; ++l)
            noise[l] = std::complex<double>(g_w * raw(rng), g_w * raw(rng));

        const std::complex<double> coh = b.dot(mean_user);
        const std::complex<double> full = b.dot(chan.col(user));

        std::array<std::complex<double>, 6> term{};
        term[0] = g_sig * coh * sym[static_cast<std::size_t>(user)];
        term[1] = g_sig * (full - coh) * sym[static_cast<std::size_t>(user)];
        term[2] = g_ue * full * dist[static_cast<std::size_t>(user)];
        {
            std::complex<double> acc{0.0, 0.0};
            for (int l = 0; l < num_bs; ++l)
                acc += std::conj(b[l]) * chan(l, user) * recv(l, user);
            term[3] = g_bs * acc;
        }
        for (int k = 0; k < num_ues; ++k) {
            if (k == user) continue;
            std::complex<double> mixed =
                g_sig * b.dot(chan.col(k)) * sym[static_cast<std::size_t>(k)] +
                g_ue * b.dot(chan.col(k)) * dist[static_cast<std::size_t>(k)];
            for (int l = 0; l < num_bs; ++l)
                mixed += g_bs * std::conj(b[l]) * chan(l, k) * recv(l, k);
            term[4] += mixed;
        }
        term[5] = b.dot(noise);

        for (std::size_t i = 0; i < 6; ++i) {
            const double p = std::norm(term[i]);
            sum[i] += p;
            sum2[i] += p * p;
        }
    }

    for (std::size_t i = 0; i < 6; ++i) {
        const double n = static_cast<double>(symbols);
        out.empirical[i] = sum[i] / n;
        const double var = std::max(0.0, (sum2[i] - n * out.empirical[i] * out.empirical[i]) /
                                             (n - 1.0));
        out.std_error[i] = std::sqrt(var / n);
        const double diff = std::abs(out.empirical[i] - out.analytic[i]);
        if (out.std_error[i] > 0.0)
            out.max_sigma = std::max(out.max_sigma, diff / out.std_error[i]);
        else if (diff > 0.0)
            out.max_sigma = std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace rhs
