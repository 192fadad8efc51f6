#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

/// Parsed configuration: a [params] section mapped onto SystemParams and a
/// free-form [run] section of validated option keys.
struct RunConfig {
    SystemParams params;
    std::map<std::string, std::string> run;
    bool rates_derived = false;  // g1..g4 came from (g0, x_zp, l)

    std::optional<std::string> get(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    /// Canonical text of the resolved configuration (rates in rad/s, 17 digits).
    /// Parsing this text yields the same RunConfig.
    std::string resolved_text() const;
};

/// Keys accepted in the [params] and [run] sections.
const std::vector<std::string>& param_keys();
const std::vector<std::string>& run_keys();

/// Parses config text. Unknown keys, duplicate keys, malformed values and
/// unknown sections raise ConfigError with the 1-based line number.
/// `units = hz` in [params] multiplies rates by 2π and α by √(2π).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Sets one [params] key on an already-parsed config (rad/s units), as used by sweeps.
void set_param(SystemParams& p, const std::string& key, double value);
double get_param(const SystemParams& p, const std::string& key);

/// Parses a double with the same rules as the config reader. Throws ValidationError.
double parse_number(const std::string& text, const std::string& what);

/// Enum spellings.
std::string to_string(DetuningReference r);

}  // namespace optomech
