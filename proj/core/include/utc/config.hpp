#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "utc/linalg.hpp"
#include "utc/sim.hpp"

namespace utc {

/// Command-line overrides applied on top of the file values. The effective
/// (post-override) config is what gets echoed and hashed.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    std::optional<int> prediction_steps;
    std::optional<std::string> output_dir;
};

/// A validated scenario plus the metadata the CLI needs. canonical_json is
/// the effective config with every default materialized; parsing it again
/// reproduces this object (the round-trip invariant the tests pin).
struct LoadedConfig {
    Scenario scenario;
    std::string model;  // admire | quadcopter | custom-lti
    double f_bar = 0.0;
    bool lti_certifiable = false;
    std::optional<Mat> certify_gain;  // explicit K; empty means simulation-derived
    std::string output_dir = ".";
    std::string canonical_json;
    std::string identity_json;  // canonical minus the seed; hashed for run logs
};

/// Parses and validates a config document. Unknown keys anywhere are
/// rejected with the offending section and key named. Throws ConfigError
/// (or the specific invariant error) on any violation.
LoadedConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});

/// parse_config over a file's contents. Throws IoError when unreadable.
LoadedConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// FNV-1a hash of the canonical form, as fixed-width hex. Stable across
/// runs and platforms; identifies the effective config in run logs.
std::string config_hash(const std::string& canonical_json);

}  // namespace utc
