#include "rhs/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <limits>
#include <set>

#include <json.hpp>

namespace rhs {

namespace {

using nlohmann::json;

constexpr double kPi = 3.141592653589793238462643383279502884;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double number_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_number()) fail("config key " + key + " must be a number");
    return v.get<double>();
}

int int_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail("config key " + key + " must be an integer");
    const auto raw = v.get<std::int64_t>();
    if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max())
        fail("config key " + key + " is out of range");
    return static_cast<int>(raw);
}

std::uint64_t seed_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail("config key " + key + " must be a nonnegative integer");
}

bool bool_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_boolean()) fail("config key " + key + " must be a boolean");
    return v.get<bool>();
}

std::string string_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_string()) fail("config key " + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> array_at(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) fail("config key " + key + " must be a nonempty array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number()) fail("config key " + key + " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void require_positive(double v, const std::string& key) {
    if (!(v > 0.0) || std::isinf(v)) fail("config key " + key + " must be positive and finite");
}

void require_unit_interval(double v, const std::string& key) {
    if (!(v >= 0.0 && v <= 1.0)) fail("config key " + key + " must lie in [0, 1]");
}

void require_at_least(int v, int lo, const std::string& key) {
    if (v < lo) fail("config key " + key + " must be at least " + std::to_string(lo));
}

void require_increasing(const std::vector<double>& v, const std::string& key) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) fail("config key " + key + " must be strictly increasing");
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "bs_height",      "channel_mode",   "density",
        "epsilon_u",      "epsilon_v",      "feed_exponent",
        "feed_offset",    "naive_combiner", "noise_power",
        "noise_power_db", "num_ues",        "nx",
        "ny",             "phase_error_concentration",
        "phase_error_model",                "phase_error_power",
        "phase_error_spread",               "pitch_x",
        "pitch_y",        "region_radius",  "rf_gain_db",
        "seed",           "sweep_density",  "sweep_elements",
        "sweep_power_db", "threads",        "trials",
        "tx_power",       "tx_power_db",    "wavelength",
    };
    return keys;
}

void parse_phase_error(const json& j, ExperimentConfig& cfg) {
    const bool has_spread = j.contains("phase_error_spread");
    const bool has_conc = j.contains("phase_error_concentration");
    const bool has_power = j.contains("phase_error_power");
    const std::string model =
        j.contains("phase_error_model") ? string_at(j, "phase_error_model") : "none";

    if (model == "none") {
        if (has_spread) fail("config key phase_error_spread requires phase_error_model uniform");
        if (has_conc)
            fail("config key phase_error_concentration requires phase_error_model von_mises");
        if (has_power)
            fail("config key phase_error_power requires a phase_error_model other than none");
        cfg.phase_error = PhaseErrorModel::none();
        return;
    }

    if (model == "uniform") {
        if (has_conc)
            fail("config key phase_error_concentration requires phase_error_model von_mises");
        if (has_spread && has_power)
            fail("config keys phase_error_spread and phase_error_power are mutually exclusive");
        if (has_spread) {
            const double s = number_at(j, "phase_error_spread");
            if (!(s > 0.0 && s <= kPi)) fail("config key phase_error_spread must lie in (0, pi]");
            cfg.phase_error = PhaseErrorModel::uniform(s);
        } else if (has_power) {
            const double p = number_at(j, "phase_error_power");
            if (!(p > 0.0)) fail("config key phase_error_power must be positive");
            double s = std::sqrt(3.0 * p);
            if (s > kPi && s < kPi * (1.0 + 1e-12)) s = kPi;  // forgive rounding at the edge
            if (s > kPi)
                fail("config key phase_error_power exceeds pi^2/3, the uniform model maximum");
            cfg.phase_error = PhaseErrorModel::uniform(s);
        } else {
            fail("phase_error_model uniform needs phase_error_spread or phase_error_power");
        }
        return;
    }

    if (model == "von_mises") {
        if (has_spread) fail("config key phase_error_spread requires phase_error_model uniform");
        if (has_conc && has_power)
            fail("config keys phase_error_concentration and phase_error_power are mutually "
                 "exclusive");
        if (has_conc) {
            const double c = number_at(j, "phase_error_concentration");
            if (!(c > 0.0)) fail("config key phase_error_concentration must be positive");
            cfg.phase_error = PhaseErrorModel::von_mises(c);
        } else if (has_power) {
            const double p = number_at(j, "phase_error_power");
            if (!(p > 0.0)) fail("config key phase_error_power must be positive");
            cfg.phase_error = PhaseErrorModel::von_mises(1.0 / p);
        } else {
            fail("phase_error_model von_mises needs phase_error_concentration or "
                 "phase_error_power");
        }
        return;
    }

    fail("config key phase_error_model must be one of none, uniform, von_mises");
}

} // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("config root must be a JSON object");

    for (const auto& item : j.items())
        if (!known_keys().count(item.key())) fail("unknown config key: " + item.key());

    auto has = [&j](const char* k) { return j.contains(k); };
    auto exclusive = [&](const char* a, const char* b) {
        if (has(a) && has(b))
            fail(std::string("config keys ") + a + " and " + b + " are mutually exclusive");
    };

    ExperimentConfig cfg;

    if (has("wavelength")) cfg.wavelength = number_at(j, "wavelength");
    require_positive(cfg.wavelength, "wavelength");
    if (has("density")) cfg.density = number_at(j, "density");
    require_positive(cfg.density, "density");
    if (has("region_radius")) cfg.region_radius = number_at(j, "region_radius");
    require_positive(cfg.region_radius, "region_radius");

    if (has("nx")) cfg.nx = int_at(j, "nx");
    require_at_least(cfg.nx, 1, "nx");
    if (has("ny")) cfg.ny = int_at(j, "ny");
    require_at_least(cfg.ny, 1, "ny");
    if (has("pitch_x")) cfg.pitch_x = number_at(j, "pitch_x");
    require_positive(cfg.pitch_x, "pitch_x");
    if (has("pitch_y")) cfg.pitch_y = number_at(j, "pitch_y");
    require_positive(cfg.pitch_y, "pitch_y");
    if (has("feed_offset")) cfg.feed_offset = number_at(j, "feed_offset");
    require_positive(cfg.feed_offset, "feed_offset");

    exclusive("feed_exponent", "rf_gain_db");
    if (has("feed_exponent")) {
        cfg.feed_exponent = number_at(j, "feed_exponent");
        if (!(cfg.feed_exponent > 1.0)) fail("config key feed_exponent must exceed 1");
    } else if (has("rf_gain_db")) {
        // Feed gain 2(alpha + 1) expressed in dB.
        cfg.feed_exponent = 0.5 * std::pow(10.0, number_at(j, "rf_gain_db") / 10.0) - 1.0;
        if (!(cfg.feed_exponent > 1.0))
            fail("config key rf_gain_db must exceed 10*log10(4) dB so the feed exponent "
                 "exceeds 1");
    }

    if (has("bs_height")) cfg.bs_height = number_at(j, "bs_height");
    require_positive(cfg.bs_height, "bs_height");
    if (has("num_ues")) cfg.num_ues = int_at(j, "num_ues");
    require_at_least(cfg.num_ues, 1, "num_ues");

    exclusive("tx_power", "tx_power_db");
    if (has("tx_power")) {
        cfg.tx_power = number_at(j, "tx_power");
        require_positive(cfg.tx_power, "tx_power");
    } else if (has("tx_power_db")) {
        cfg.tx_power = std::pow(10.0, number_at(j, "tx_power_db") / 10.0);
        require_positive(cfg.tx_power, "tx_power_db");
    }

    exclusive("noise_power", "noise_power_db");
    if (has("noise_power")) {
        cfg.noise_power = number_at(j, "noise_power");
        require_positive(cfg.noise_power, "noise_power");
    } else if (has("noise_power_db")) {
        cfg.noise_power = std::pow(10.0, number_at(j, "noise_power_db") / 10.0);
        require_positive(cfg.noise_power, "noise_power_db");
    }

    parse_phase_error(j, cfg);

    if (has("epsilon_u")) cfg.quality.eps_u = number_at(j, "epsilon_u");
    require_unit_interval(cfg.quality.eps_u, "epsilon_u");
    if (has("epsilon_v")) cfg.quality.eps_v = number_at(j, "epsilon_v");
    require_unit_interval(cfg.quality.eps_v, "epsilon_v");

    if (has("channel_mode")) {
        const std::string mode = string_at(j, "channel_mode");
        if (mode == "near_field") cfg.channel_mode = ChannelMode::near_field;
        else if (mode == "far_synthetic") cfg.channel_mode = ChannelMode::far_synthetic;
        else if (mode == "far_mismatched") cfg.channel_mode = ChannelMode::far_mismatched;
        else
            fail("config key channel_mode must be one of near_field, far_synthetic, "
                 "far_mismatched");
    }
    if (has("naive_combiner")) cfg.naive_combiner = bool_at(j, "naive_combiner");

    if (has("trials")) cfg.trials = int_at(j, "trials");
    require_at_least(cfg.trials, 1, "trials");
    if (has("seed")) cfg.seed = seed_at(j, "seed");
    if (has("threads")) cfg.threads = int_at(j, "threads");
    require_at_least(cfg.threads, 0, "threads");

    if (has("sweep_power_db")) cfg.sweep_power_db = array_at(j, "sweep_power_db");
    require_increasing(cfg.sweep_power_db, "sweep_power_db");
    if (has("sweep_density")) cfg.sweep_density = array_at(j, "sweep_density");
    require_increasing(cfg.sweep_density, "sweep_density");
    for (double v : cfg.sweep_density)
        if (!(v > 0.0)) fail("config key sweep_density must contain positive values");
    if (has("sweep_elements")) cfg.sweep_elements = array_at(j, "sweep_elements");
    require_increasing(cfg.sweep_elements, "sweep_elements");
    for (double v : cfg.sweep_elements)
        if (!(v >= 1.0) || v != std::floor(v))
            fail("config key sweep_elements must contain positive integers");

    return cfg;
}

std::string emit_config_json(const ExperimentConfig& cfg) {
    json j;
    j["bs_height"] = cfg.bs_height;
    switch (cfg.channel_mode) {
        case ChannelMode::near_field: j["channel_mode"] = "near_field"; break;
        case ChannelMode::far_synthetic: j["channel_mode"] = "far_synthetic"; break;
        case ChannelMode::far_mismatched: j["channel_mode"] = "far_mismatched"; break;
    }
    j["density"] = cfg.density;
    j["epsilon_u"] = cfg.quality.eps_u;
    j["epsilon_v"] = cfg.quality.eps_v;
    j["feed_exponent"] = cfg.feed_exponent;
    j["feed_offset"] = cfg.feed_offset;
    j["naive_combiner"] = cfg.naive_combiner;
    j["noise_power"] = cfg.noise_power;
    j["num_ues"] = cfg.num_ues;
    j["nx"] = cfg.nx;
    j["ny"] = cfg.ny;
    switch (cfg.phase_error.kind) {
        case PhaseErrorModel::Kind::none:
            j["phase_error_model"] = "none";
            break;
        case PhaseErrorModel::Kind::uniform:
            j["phase_error_model"] = "uniform";
            j["phase_error_spread"] = cfg.phase_error.spread;
            break;
        case PhaseErrorModel::Kind::von_mises:
            j["phase_error_model"] = "von_mises";
            j["phase_error_concentration"] = cfg.phase_error.concentration;
            break;
    }
    j["pitch_x"] = cfg.pitch_x;
    j["pitch_y"] = cfg.pitch_y;
    j["region_radius"] = cfg.region_radius;
    j["seed"] = cfg.seed;
    j["sweep_density"] = cfg.sweep_density;
    j["sweep_elements"] = cfg.sweep_elements;
    j["sweep_power_db"] = cfg.sweep_power_db;
    j["threads"] = cfg.threads;
    j["trials"] = cfg.trials;
    j["tx_power"] = cfg.tx_power;
    j["wavelength"] = cfg.wavelength;
    return j.dump(2) + "\n";
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = emit_config_json(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "axis_value,mean_rate,stderr,trials,bound,bound_limit\n";
    for (const SweepPoint& p : points) {
        out += format_double(p.axis_value);
        out += ',';
        out += format_double(p.rate.mean);
        out += ',';
        out += format_double(p.rate.std_error);
        out += ',';
        out += std::to_string(p.rate.trials);
        out += ',';
        out += format_double(p.bound);
        out += ',';
        out += format_double(p.bound_limit);
        out += '\n';
    }
    return out;
}

std::string bounds_csv(const std::vector<NamedValue>& rows) {
    std::string out = "quantity,value\n";
    for (const NamedValue& r : rows) {
        out += r.name;
        out += ',';
        out += format_double(r.value);
        out += '\n';
    }
    return out;
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
    std::string out = "check,passed\n";
    for (const CheckResult& c : checks) {
        out += c.name;
        out += ',';
        out += c.passed ? "true" : "false";
        out += '\n';
    }
    return out;
}

std::string manifest_json(const std::string& command, const ExperimentConfig& cfg,
                          const std::string& start_utc, const std::string& end_utc,
                          const std::vector<ManifestPoint>& points) {
    json m;
    m["command"] = command;
    m["config"] = json::parse(emit_config_json(cfg));
    m["config_hash"] = config_hash(cfg);
    m["end"] = end_utc;
    m["points"] = json::array();
    for (const ManifestPoint& p : points) {
        json e;
        e["axis_value"] = p.axis_value;
        e["config_hash"] = p.config_hash;
        e["mean_rate"] = p.mean_rate;
        e["std_error"] = p.std_error;
        e["trial_first"] = 0;
        e["trial_last"] = p.trials - 1;
        e["trials"] = p.trials;
        m["points"].push_back(e);
    }
    m["seed"] = cfg.seed;
    m["start"] = start_utc;
    m["version"] = kToolVersion;
    return m.dump(2) + "\n";
}

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace rhs
