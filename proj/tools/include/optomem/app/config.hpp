#pragma once

#include "optomem/params.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optomem::app {

/// Malformed or inconsistent configuration. Maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// key -> value exactly as written (trimmed). Later assignments win.
using RawConfig = std::map<std::string, std::string, std::less<>>;

/// Parses `key = value` lines. '#' starts a comment; blank lines are ignored.
RawConfig parse_config_text(std::string_view text);
RawConfig load_config_file(const std::string& path);
/// Applies one `key=value` override on top of `cfg`. Any other spelling of
/// the same quantity (e.g. power_W vs power_mW) is dropped first.
void apply_override(RawConfig& cfg, std::string_view assignment);

/// How the drive frequency is pinned.
enum class DetuningMode {
    laser,      ///< fixed laser frequency omega_l
    effective,  ///< fixed Delta = omega_c(q_s) - omega_l at the solution
};

enum class SweepScale { linear, log };

struct SweepSpec {
    std::string key;  ///< config key being swept, e.g. temperature_K
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    SweepScale scale = SweepScale::linear;
    std::vector<double> values() const;
};

struct ScanSpec {
    double offset_lo = 0.0;  ///< omega_l - omega_b at the red end [rad/s]
    double offset_hi = 0.0;  ///< [rad/s]
    int points = 401;
};

enum class BranchChoice { lower, upper };

/// Fully resolved run configuration, SI units, angular frequencies in rad/s.
struct RunConfig {
    SystemParams params;
    DetuningMode detuning_mode = DetuningMode::laser;
    double effective_detuning = 0.0;  ///< used when detuning_mode == effective [rad/s]

    bool has_scan = false;
    ScanSpec scan;
    bool has_sweep = false;
    SweepSpec sweep;

    BranchChoice branch = BranchChoice::lower;
    int mode_points = 256;
    int mc_trajectories = 10000;
    std::uint64_t seed = 1;

    /// Canonical names of parameters that were defaulted or declared assumed.
    std::vector<std::string> assumed;
    /// Canonical `name=value` lines, fixed order, round-trip precision. Every
    /// line is a valid config entry, so the list reproduces this run when fed
    /// back through parse_config_text and resolve.
    std::vector<std::string> resolved_lines() const;
    /// SHA-256 (hex) of resolved_lines() joined by newlines.
    std::string hash() const;
};

RunConfig resolve(const RawConfig& raw);

/// Unit-suffixed config keys that can be swept.
bool is_sweepable(std::string_view key);

/// Shortest round-trip decimal representation.
std::string format_number(double x);

std::string sha256_hex(std::string_view data);

}  // namespace optomem::app
