// Command-line front end: sweeps, closed-form bound tables, and the
// self-validation suite. Writes results.csv and manifest.json into --out.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "rhs/config.hpp"
#include "rhs/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int trials = 0;
    bool seed_given = false;
    bool trials_given = false;
};

rhs::ExperimentConfig load_config(const Options& opt) {
    rhs::ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path, std::ios::binary);
        if (!in) throw rhs::ConfigError("cannot open config file: " + opt.config_path);
        std::ostringstream text;
        text << in.rdbuf();
        cfg = rhs::parse_config_json(text.str());
    }
    if (opt.seed_given) cfg.seed = opt.seed;
    if (opt.trials_given) {
        if (opt.trials < 1) throw rhs::ConfigError("--trials must be at least 1");
        cfg.trials = opt.trials;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

fs::path prepare_out_dir(const Options& opt) {
    const fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
    return dir;
}

int run_sweep(const std::string& name, rhs::SweepAxis axis, const rhs::ExperimentConfig& cfg,
              const fs::path& out_dir) {
    const std::vector<double>& values = axis == rhs::SweepAxis::power_db ? cfg.sweep_power_db
                                        : axis == rhs::SweepAxis::density ? cfg.sweep_density
                                                                          : cfg.sweep_elements;
    const std::string start = rhs::utc_timestamp_now();
    const std::vector<rhs::SweepPoint> points = rhs::sweep(cfg, axis, values);
    const std::string end = rhs::utc_timestamp_now();

    std::vector<rhs::ManifestPoint> manifest;
    manifest.reserve(points.size());
    for (const rhs::SweepPoint& p : points) {
        rhs::ManifestPoint m;
        m.axis_value = p.axis_value;
        m.mean_rate = p.rate.mean;
        m.std_error = p.rate.std_error;
        m.trials = p.rate.trials;
        m.config_hash = rhs::config_hash(rhs::apply_axis(cfg, axis, p.axis_value));
        manifest.push_back(std::move(m));
    }

    write_file(out_dir / "results.csv", rhs::sweep_csv(points));
    write_file(out_dir / "manifest.json", rhs::manifest_json(name, cfg, start, end, manifest));
    std::printf("%s: %zu points -> %s\n", name.c_str(), points.size(),
                (out_dir / "results.csv").string().c_str());
    return 0;
}

int run_bounds(const rhs::ExperimentConfig& cfg, const fs::path& out_dir) {
    const std::string start = rhs::utc_timestamp_now();
    const rhs::Precomputed pre = rhs::precompute(cfg);
    const rhs::BoundInputs bi = rhs::bound_inputs(cfg, pre);
    const rhs::SpecialCaseBounds sc = rhs::special_case_bounds(bi);
    const rhs::SurfaceGeometry& g = pre.geom;

    std::vector<rhs::NamedValue> rows = {
        {"finite_aperture_bound", rhs::sum_rate_upper_bound(bi)},
        {"high_power_limit", rhs::high_power_limit(bi)},
        {"ue_quality_bound", sc.ue_only},
        {"ue_quality_limit", sc.ue_limit},
        {"bs_quality_bound", sc.bs_only},
        {"bs_quality_limit", sc.bs_limit},
        {"phase_error_bound", sc.phase_only},
        {"phase_error_limit", sc.phase_limit},
        {"infinite_aperture_bound",
         rhs::sum_rate_infinite_surface(bi, g.element_area(), g.feed_offset, g.feed_exponent,
                                        cfg.bs_height)},
        {"coherent_gain", bi.coherent_gain},
        {"incoherent_gain", bi.incoherent_gain},
        {"ue_gain_density",
         rhs::zeta_gain_density(g.element_area(), cfg.bs_height, cfg.region_radius)},
        {"feed_amplitude_sum",
         rhs::feed_amplitude_sum(g.element_area(), g.feed_offset, g.feed_exponent)},
    };
    const std::string end = rhs::utc_timestamp_now();

    write_file(out_dir / "results.csv", rhs::bounds_csv(rows));
    write_file(out_dir / "manifest.json", rhs::manifest_json("bounds", cfg, start, end, {}));
    for (const rhs::NamedValue& r : rows)
        std::printf("%s = %s\n", r.name.c_str(), rhs::format_double(r.value).c_str());
    return 0;
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// Random combining problems for the closed-form identity checks. Amplitude
// scales are deliberately wild to stress the algebra, not the physics.
struct RandomInstance {
    rhs::ChannelStats stats;
    Eigen::VectorXd rho;
    rhs::HardwareQuality quality;
    double xi = 1.0;
    double noise = 1.0;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_bs, int max_ues) {
    std::uniform_int_distribution<int> bs_count(1, max_bs), ue_count(1, max_ues);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int num_bs = bs_count(rng), num_ues = ue_count(rng);

    RandomInstance inst;
    inst.stats.h = Eigen::MatrixXcd(num_bs, num_ues);
    inst.stats.q = Eigen::MatrixXd(num_bs, num_ues);
    for (int l = 0; l < num_bs; ++l) {
        for (int k = 0; k < num_ues; ++k) {
            const double scale = std::pow(10.0, -3.0 * unit(rng));
            inst.stats.h(l, k) = scale * std::complex<double>(gauss(rng), gauss(rng));
            inst.stats.q(l, k) = scale * scale * (0.1 + 4.0 * unit(rng));
        }
    }
    inst.rho = Eigen::VectorXd(num_ues);
    for (int k = 0; k < num_ues; ++k) inst.rho[k] = std::pow(10.0, 4.0 * unit(rng) - 2.0);
    inst.quality.eps_u = 0.5 + 0.5 * unit(rng);
    inst.quality.eps_v = 0.5 + 0.5 * unit(rng);
    inst.xi = 0.3 + 0.7 * unit(rng);
    inst.noise = std::pow(10.0, -2.0 * unit(rng));
    return inst;
}

int run_validate(const rhs::ExperimentConfig& cfg, const fs::path& out_dir) {
    const std::string start = rhs::utc_timestamp_now();
    std::vector<rhs::CheckResult> checks;
    auto record = [&checks](std::string name, bool ok) {
        std::printf("%s: %s\n", name.c_str(), ok ? "PASS" : "FAIL");
        checks.push_back({std::move(name), ok});
    };

    // Phase error moments: Monte Carlo mean resultant against the analytic
    // value, one deterministic substream per model.
    {
        auto empirical_xi = [&cfg](const rhs::PhaseErrorModel& m, std::uint64_t stream) {
            std::mt19937_64 rng = rhs::substream(cfg.seed, stream);
            const std::vector<double> draws = rhs::sample_errors(m, 400000, rng);
            double c = 0.0;
            for (double t : draws) c += std::cos(t);
            return c / static_cast<double>(draws.size());
        };
        const auto uni =
            rhs::PhaseErrorModel::from_power(rhs::PhaseErrorModel::Kind::uniform, 1.0);
        record("phase_moments_uniform", std::abs(empirical_xi(uni, 9001) - rhs::xi(uni)) < 5e-3);
        const auto vm = rhs::PhaseErrorModel::von_mises(10.0);
        record("phase_moments_von_mises", std::abs(empirical_xi(vm, 9002) - rhs::xi(vm)) < 5e-3);
    }

    // Channel covariance: empirical second moment of the aggregated channel
    // against the analytic form, on a small surface so the run stays quick.
    {
        rhs::ExperimentConfig c = cfg;
        c.nx = c.ny = 4;
        c.density = 1.3e-4;
        c.num_ues = 1;
        c.phase_error = rhs::PhaseErrorModel::from_power(rhs::PhaseErrorModel::Kind::uniform, 1.0);
        const rhs::Precomputed pre = rhs::precompute(c);
        const rhs::CovarianceCheck r = rhs::validate_covariance(c, pre, 50000);
        record("channel_covariance", r.rel_error < 0.05);
    }

    // Closed-form SINR identities on random instances.
    {
        std::mt19937_64 rng = rhs::substream(cfg.seed, 9010);
        bool mmse_ok = true, decomposition_ok = true, single_ok = true, rank_one_ok = true;
        for (int i = 0; i < 25; ++i) {
            const RandomInstance inst = random_instance(rng, 12, 4);
            const Eigen::MatrixXcd b = rhs::mmse_combiner(inst.stats, inst.rho, inst.quality,
                                                          inst.xi, inst.noise);
            const std::vector<double> closed = rhs::sinr_mmse(inst.stats, inst.rho, inst.quality,
                                                              inst.xi, inst.noise);
            for (int k = 0; k < inst.stats.num_ues(); ++k) {
                const rhs::SinrReport rep = rhs::sinr_general(inst.stats, b.col(k), k, inst.rho,
                                                              inst.quality, inst.xi, inst.noise);
                mmse_ok = mmse_ok && relative_gap(rep.sinr, closed[k]) < 1e-10;
                const double denom = rep.phase_noise + rep.ue_distortion + rep.bs_distortion +
                                     rep.inter_user + rep.noise;
                decomposition_ok =
                    decomposition_ok && relative_gap(rep.sinr * denom, rep.desired) < 1e-10;
            }
        }
        for (int i = 0; i < 25; ++i) {
            const RandomInstance inst = random_instance(rng, 12, 1);
            const double direct =
                rhs::sinr_single_user(inst.stats.h.col(0), inst.stats.q.col(0), inst.rho[0],
                                      inst.quality, inst.xi, inst.noise);
            const std::vector<double> closed = rhs::sinr_mmse(inst.stats, inst.rho, inst.quality,
                                                              inst.xi, inst.noise);
            single_ok = single_ok && relative_gap(direct, closed[0]) < 1e-10;
        }
        {
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (int i = 0; i < 25; ++i) {
                const int n = 2 + static_cast<int>(unit(rng) * 10);
                Eigen::MatrixXcd g(n, n);
                Eigen::VectorXcd h(n);
                for (int r = 0; r < n; ++r) {
                    h[r] = std::complex<double>(gauss(rng), gauss(rng));
                    for (int c = 0; c < n; ++c)
                        g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
                }
                const Eigen::MatrixXcd a =
                    g * g.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
                const double scale = unit(rng) * 2.0;
                const Eigen::MatrixXcd updated = a + scale * h * h.adjoint();
                const double lhs = h.dot(updated.llt().solve(h)).real();
                const double s = h.dot(a.llt().solve(h)).real();
                rank_one_ok = rank_one_ok && relative_gap(lhs, s / (1.0 + scale * s)) < 1e-10;
            }
        }
        record("mmse_closed_form", mmse_ok);
        record("sinr_decomposition", decomposition_ok);
        record("single_user_explicit", single_ok);
        record("rank_one_update", rank_one_ok);
    }

    // Symbol-level transmission against the analytic power decomposition.
    {
        rhs::ExperimentConfig c = cfg;
        c.nx = c.ny = 4;
        c.density = 1.3e-4;
        c.num_ues = 2;
        c.phase_error = rhs::PhaseErrorModel::from_power(rhs::PhaseErrorModel::Kind::uniform, 0.5);
        c.quality = {0.95, 0.9};
        const rhs::Precomputed pre = rhs::precompute(c);
        const rhs::SymbolLevelCheck r = rhs::validate_symbol_level(c, pre, 20000, 0);
        record("symbol_level_powers", r.max_sigma < 5.0);
    }

    // Bound reductions: the general machinery under a single impairment, at
    // negligible noise, against the matching closed form.
    {
        rhs::ExperimentConfig c = cfg;
        c.nx = c.ny = 8;
        const rhs::Precomputed pre = rhs::precompute(c);
        rhs::BoundInputs bi = rhs::bound_inputs(c, pre);
        bi.quality = {0.99, 0.95};
        bi.xi = 0.9;
        bi.noise_power = 1e-30;
        const rhs::SpecialCaseBounds sc = rhs::special_case_bounds(bi);
        const bool ok = relative_gap(sc.ue_only, sc.ue_limit) < 1e-9 &&
                        relative_gap(sc.bs_only, sc.bs_limit) < 1e-9 &&
                        relative_gap(sc.phase_only, sc.phase_limit) < 1e-9;
        record("bound_reductions", ok);

        rhs::BoundInputs high = bi;
        high.noise_power = cfg.noise_power;
        for (double& r : high.rho) r *= 1e10;
        record("high_power_convergence",
               relative_gap(rhs::sum_rate_upper_bound(high), rhs::high_power_limit(high)) < 1e-6);
    }

    // Aperture growth: finite-surface bounds increase with the element count
    // and stay below the unbounded-surface value.
    {
        rhs::ExperimentConfig c = cfg;
        c.quality = {0.98, 0.97};
        double prev = 0.0;
        double last = 0.0;
        bool ok = true;
        rhs::BoundInputs bi;
        for (int side : {4, 8, 16}) {
            c.nx = c.ny = side;
            const rhs::Precomputed pre = rhs::precompute(c);
            bi = rhs::bound_inputs(c, pre);
            last = rhs::sum_rate_upper_bound(bi);
            ok = ok && last >= prev - 1e-12;
            prev = last;
        }
        const rhs::SurfaceGeometry g = c.surface();
        const double infinite = rhs::sum_rate_infinite_surface(
            bi, g.element_area(), g.feed_offset, g.feed_exponent, c.bs_height);
        record("aperture_monotone", ok && last <= infinite * (1.0 + 1e-12));
    }

    record("config_round_trip", rhs::parse_config_json(rhs::emit_config_json(cfg)) == cfg);

    const std::string end = rhs::utc_timestamp_now();
    write_file(out_dir / "results.csv", rhs::checks_csv(checks));
    write_file(out_dir / "manifest.json", rhs::manifest_json("validate", cfg, start, end, {}));

    bool all = true;
    for (const rhs::CheckResult& c : checks) all = all && c.passed;
    std::printf("%s\n", all ? "all checks passed" : "validation FAILED");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-field holographic-surface network simulator and bound calculator"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "JSON experiment configuration");
    app.add_option("--seed", opt.seed, "master seed override")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    app.add_option("--trials", opt.trials, "trial count override")
        ->each([&opt](const std::string&) { opt.trials_given = true; });
    app.add_option("--out", opt.out_dir, "output directory for results.csv and manifest.json");

    CLI::App* sweep_power = app.add_subcommand("sweep-power", "ergodic rate vs transmit power");
    CLI::App* sweep_density = app.add_subcommand("sweep-density", "ergodic rate vs BS density");
    CLI::App* sweep_elements =
        app.add_subcommand("sweep-elements", "ergodic rate vs elements per panel side");
    CLI::App* bounds = app.add_subcommand("bounds", "closed-form bounds, no simulation");
    CLI::App* validate = app.add_subcommand("validate", "run the self-check suite");
    for (CLI::App* sub : {sweep_power, sweep_density, sweep_elements, bounds, validate})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const rhs::ExperimentConfig cfg = load_config(opt);
        const fs::path out_dir = prepare_out_dir(opt);
        if (sweep_power->parsed())
            return run_sweep("sweep-power", rhs::SweepAxis::power_db, cfg, out_dir);
        if (sweep_density->parsed())
            return run_sweep("sweep-density", rhs::SweepAxis::density, cfg, out_dir);
        if (sweep_elements->parsed())
            return run_sweep("sweep-elements", rhs::SweepAxis::elements, cfg, out_dir);
        if (bounds->parsed()) return run_bounds(cfg, out_dir);
        return run_validate(cfg, out_dir);
    } catch (const rhs::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
