#pragma once

// JSON configuration and the text artifacts the command-line tool emits.
// Config files are flat objects with snake_case keys; quantities natively in
// dB can be given through *_db keys instead of their linear counterparts.
// Every error message names the offending key.

#include <stdexcept>
#include <string>
#include <vector>

#include "rhs/simulation.hpp"

namespace rhs {

inline constexpr const char* kToolVersion = "1.0.0";

// Malformed or out-of-range configuration input. The CLI maps this to the
// usage exit code, as opposed to runtime failures.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config_json(const std::string& text);

// Canonical emission: every field explicit, keys alphabetical, doubles
// round-tripping exactly. parse_config_json(emit_config_json(c)) == c.
std::string emit_config_json(const ExperimentConfig& cfg);

// 17 significant digits; infinities spelled inf/-inf.
std::string format_double(double value);

// FNV-1a over the canonical emission, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Sweep results. Header: axis_value,mean_rate,stderr,trials,bound,bound_limit.
std::string sweep_csv(const std::vector<SweepPoint>& points);

struct NamedValue {
    std::string name;
    double value = 0.0;
};

// Closed-form quantities. Header: quantity,value.
std::string bounds_csv(const std::vector<NamedValue>& rows);

struct CheckResult {
    std::string name;
    bool passed = false;
};

// Validation outcomes. Header: check,passed.
std::string checks_csv(const std::vector<CheckResult>& checks);

struct ManifestPoint {
    double axis_value = 0.0;
    double mean_rate = 0.0;
    double std_error = 0.0;
    int trials = 0;
    std::string config_hash;  // hash of the point's effective config
};

// Run provenance: command, tool version, seed, config echo and hash, wall
// clock bounds, and one entry per sweep point tying its CSV row back to
// (config hash, seed, trial range).
std::string manifest_json(const std::string& command, const ExperimentConfig& cfg,
                          const std::string& start_utc, const std::string& end_utc,
                          const std::vector<ManifestPoint>& points);

std::string utc_timestamp_now();

} // namespace rhs
