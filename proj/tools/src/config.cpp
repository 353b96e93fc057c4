#include "optomem/app/config.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace optomem::app {

namespace {

enum class Conv {
    scale,       // value * factor
    finesse,     // kappa0 = pi c / (2 L F)
    per_lambda,  // value * wavelength
    per_omega_m  // value * omega_m
};

struct Alias {
    std::string_view key;
    std::string_view quantity;
    Conv conv;
    double factor;
};

constexpr double mhz = constants::two_pi * 1e6;

// Every accepted physical key. Keys sharing a quantity are mutually exclusive.
constexpr Alias aliases[] = {
    {"cavity_length_m", "cavity_length", Conv::scale, 1.0},
    {"cavity_length_mm", "cavity_length", Conv::scale, 1e-3},
    {"wavelength_m", "wavelength", Conv::scale, 1.0},
    {"wavelength_nm", "wavelength", Conv::scale, 1e-9},
    {"waist_m", "waist", Conv::scale, 1.0},
    {"waist_um", "waist", Conv::scale, 1e-6},
    {"kappa0_rad_s", "linewidth", Conv::scale, 1.0},
    {"finesse", "linewidth", Conv::finesse, 1.0},
    {"mode_index", "mode_index", Conv::scale, 1.0},
    {"omega_b_rad_s", "omega_b", Conv::scale, 1.0},
    {"thickness_m", "thickness", Conv::scale, 1.0},
    {"thickness_nm", "thickness", Conv::scale, 1e-9},
    {"n_real", "n_real", Conv::scale, 1.0},
    {"n_imag", "n_imag", Conv::scale, 1.0},
    {"z0_m", "z0", Conv::scale, 1.0},
    {"z0_nm", "z0", Conv::scale, 1e-9},
    {"z0_lambda", "z0", Conv::per_lambda, 1.0},
    {"mass_kg", "mass", Conv::scale, 1.0},
    {"mass_ng", "mass", Conv::scale, 1e-12},
    {"omega_m_rad_s", "omega_m", Conv::scale, 1.0},
    {"omega_m_Hz", "omega_m", Conv::scale, constants::two_pi},
    {"omega_m_MHz", "omega_m", Conv::scale, mhz},
    {"quality_factor", "quality", Conv::scale, 1.0},
    {"power_W", "power", Conv::scale, 1.0},
    {"power_mW", "power", Conv::scale, 1e-3},
    {"detuning_rad_s", "detuning", Conv::scale, 1.0},
    {"detuning_MHz", "detuning", Conv::scale, mhz},
    {"detuning_eff_rad_s", "detuning", Conv::scale, 1.0},
    {"detuning_eff_MHz", "detuning", Conv::scale, mhz},
    {"detuning_eff_omega_m", "detuning", Conv::per_omega_m, 1.0},
    {"laser_omega_rad_s", "detuning", Conv::scale, 1.0},
    {"temperature_K", "temperature", Conv::scale, 1.0},
    {"temperature_mK", "temperature", Conv::scale, 1e-3},
};

constexpr std::string_view option_keys[] = {
    "scan_min_MHz", "scan_max_MHz", "scan_min_rad_s", "scan_max_rad_s", "scan_points", "sweep_var",       "sweep_min",
    "sweep_max",    "sweep_points", "sweep_scale", "branch",          "mode_points",
    "mc_trajectories", "seed",      "assumed",
};

const Alias* find_alias(std::string_view key) {
    for (const auto& a : aliases) {
        if (a.key == key) return &a;
    }
    return nullptr;
}

bool is_option(std::string_view key) {
    return std::find(std::begin(option_keys), std::end(option_keys), key) != std::end(option_keys);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("'" + std::string(key) + "': not a finite number: '" + std::string(text) + "'");
    }
    return v;
}

long long parse_int(std::string_view key, std::string_view text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("'" + std::string(key) + "': not an integer: '" + std::string(text) + "'");
    }
    return v;
}

void check_key(std::string_view key) {
    if (!find_alias(key) && !is_option(key)) {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

/// The single key of `quantity` present in `raw`, if any.
std::optional<std::pair<const Alias*, std::string_view>> lookup(const RawConfig& raw,
                                                                std::string_view quantity) {
    std::optional<std::pair<const Alias*, std::string_view>> found;
    for (const auto& a : aliases) {
        if (a.quantity != quantity) continue;
        auto it = raw.find(a.key);
        if (it == raw.end()) continue;
        if (found) {
            throw ConfigError("conflicting keys '" + std::string(found->first->key) + "' and '" +
                              std::string(a.key) + "' both set " + std::string(quantity));
        }
        found.emplace(&a, it->second);
    }
    return found;
}

std::optional<std::string_view> option(const RawConfig& raw, std::string_view key) {
    auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    return std::string_view(it->second);
}

}  // namespace

std::string format_number(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

RawConfig parse_config_text(std::string_view text) {
    RawConfig cfg;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        }
        check_key(key);
        cfg[std::string(key)] = std::string(value);
    }
    return cfg;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void apply_override(RawConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    }
    const auto key = trim(assignment.substr(0, eq));
    const auto value = trim(assignment.substr(eq + 1));
    if (key.empty() || value.empty()) {
        throw ConfigError("override '" + std::string(assignment) + "' has an empty key or value");
    }
    check_key(key);
    if (const Alias* a = find_alias(key)) {
        for (const auto& other : aliases) {
            if (other.quantity == a->quantity) cfg.erase(std::string(other.key));
        }
    }
    cfg[std::string(key)] = std::string(value);
}

bool is_sweepable(std::string_view key) {
    const Alias* a = find_alias(key);
    if (!a) return false;
    return a->quantity == "temperature" || a->quantity == "power" || a->quantity == "detuning" ||
           a->quantity == "z0";
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = points > 1 ? static_cast<double>(i) / (points - 1) : 0.0;
        if (scale == SweepScale::log) {
            v[i] = min * std::pow(max / min, t);
        } else {
            v[i] = min + (max - min) * t;
        }
    }
    if (points > 1) v.back() = max;
    return v;
}

RunConfig resolve(const RawConfig& raw) {
    for (const auto& entry : raw) check_key(entry.first);
    RunConfig rc;
    SystemParams& p = rc.params;

    auto required = [&](std::string_view quantity) {
        auto hit = lookup(raw, quantity);
        if (!hit) throw ConfigError("missing required parameter: " + std::string(quantity));
        return *hit;
    };
    auto plain = [&](std::pair<const Alias*, std::string_view> hit) {
        return parse_double(hit.first->key, hit.second) * hit.first->factor;
    };

    p.cavity.length = plain(required("cavity_length"));
    p.cavity.wavelength = plain(required("wavelength"));
    if (auto w = lookup(raw, "waist")) p.cavity.waist = plain(*w);
    if (!(p.cavity.length > 0.0)) throw ConfigError("cavity length must be > 0");
    if (!(p.cavity.wavelength > 0.0)) throw ConfigError("wavelength must be > 0");

    {
        auto hit = required("linewidth");
        const double v = parse_double(hit.first->key, hit.second);
        if (hit.first->conv == Conv::finesse) {
            if (!(v > 1.0)) throw ConfigError("finesse must be > 1");
            p.cavity.kappa0 = kappa0_from_finesse(p.cavity.length, v);
        } else {
            p.cavity.kappa0 = v;
        }
    }
    if (auto m = lookup(raw, "mode_index")) {
        p.cavity.mode_index = static_cast<int>(parse_int(m->first->key, m->second));
    } else {
        rc.assumed.emplace_back("mode_index");
    }
    if (auto b = lookup(raw, "omega_b")) p.cavity.omega_b = plain(*b);

    p.membrane.thickness = plain(required("thickness"));
    double n_real = 2.0;
    double n_imag = 1e-6;
    if (auto h = lookup(raw, "n_real")) n_real = plain(*h); else rc.assumed.emplace_back("n_real");
    if (auto h = lookup(raw, "n_imag")) n_imag = plain(*h); else rc.assumed.emplace_back("n_imag");
    p.membrane.index = {n_real, n_imag};
    if (auto h = lookup(raw, "z0")) {
        const double v = parse_double(h->first->key, h->second);
        p.membrane.z0 = h->first->conv == Conv::per_lambda ? v * p.cavity.wavelength : v * h->first->factor;
    } else {
        // maximum-slope point of cos(2 k0 z)
        p.membrane.z0 = p.cavity.wavelength / 8.0;
        rc.assumed.emplace_back("z0_m");
    }
    p.membrane.mass = plain(required("mass"));
    p.membrane.omega_m = plain(required("omega_m"));
    p.membrane.quality = plain(required("quality"));
    p.drive.power = plain(required("power"));
    if (auto t = lookup(raw, "temperature")) {
        p.temperature = plain(*t);
    } else {
        rc.assumed.emplace_back("temperature_K");
    }

    const double omega_b = p.cavity.reference_frequency();
    if (auto d = lookup(raw, "detuning")) {
        const std::string_view key = d->first->key;
        const double v = parse_double(key, d->second);
        if (key == "laser_omega_rad_s") {
            p.drive.laser_omega = v;
        } else if (key.rfind("detuning_eff_", 0) == 0) {
            rc.detuning_mode = DetuningMode::effective;
            rc.effective_detuning = d->first->conv == Conv::per_omega_m ? v * p.membrane.omega_m
                                                                         : v * d->first->factor;
            p.drive.laser_omega = omega_b;
        } else {
            // bare detuning omega_b - omega_l
            p.drive.laser_omega = omega_b - v * d->first->factor;
        }
    } else {
        p.drive.laser_omega = omega_b;
        rc.assumed.emplace_back("detuning_rad_s");
    }
    const double fsr = p.cavity.free_spectral_range();
    if (rc.detuning_mode == DetuningMode::laser && std::abs(p.drive.laser_omega - omega_b) > fsr) {
        throw ConfigError("laser frequency is more than one free spectral range from omega_b");
    }
    if (rc.detuning_mode == DetuningMode::effective && std::abs(rc.effective_detuning) > fsr) {
        throw ConfigError("effective detuning exceeds one free spectral range");
    }

    try {
        p.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    // run options
    {
        const auto lo_mhz = option(raw, "scan_min_MHz"), hi_mhz = option(raw, "scan_max_MHz");
        const auto lo_rad = option(raw, "scan_min_rad_s"), hi_rad = option(raw, "scan_max_rad_s");
        if ((lo_mhz || hi_mhz) && (lo_rad || hi_rad)) {
            throw ConfigError("give the scan range in MHz or in rad/s, not both");
        }
        if (lo_mhz || hi_mhz) {
            if (!lo_mhz || !hi_mhz) throw ConfigError("scan_min_MHz and scan_max_MHz must be given together");
            rc.has_scan = true;
            rc.scan.offset_lo = parse_double("scan_min_MHz", *lo_mhz) * mhz;
            rc.scan.offset_hi = parse_double("scan_max_MHz", *hi_mhz) * mhz;
        } else if (lo_rad || hi_rad) {
            if (!lo_rad || !hi_rad) throw ConfigError("scan_min_rad_s and scan_max_rad_s must be given together");
            rc.has_scan = true;
            rc.scan.offset_lo = parse_double("scan_min_rad_s", *lo_rad);
            rc.scan.offset_hi = parse_double("scan_max_rad_s", *hi_rad);
        }
        if (rc.has_scan && !(rc.scan.offset_lo < rc.scan.offset_hi)) {
            throw ConfigError("scan minimum must be below the scan maximum");
        }
    }
    if (auto n = option(raw, "scan_points")) {
        rc.scan.points = static_cast<int>(parse_int("scan_points", *n));
        if (rc.scan.points < 2) throw ConfigError("scan_points must be >= 2");
    }
    if (auto var = option(raw, "sweep_var")) {
        rc.has_sweep = true;
        rc.sweep.key = std::string(*var);
        if (!is_sweepable(rc.sweep.key)) {
            throw ConfigError("sweep_var '" + rc.sweep.key +
                              "' is not a temperature, power, detuning or z0 key");
        }
        auto need = [&](std::string_view k) {
            auto v = option(raw, k);
            if (!v) throw ConfigError("sweep requires '" + std::string(k) + "'");
            return *v;
        };
        rc.sweep.min = parse_double("sweep_min", need("sweep_min"));
        rc.sweep.max = parse_double("sweep_max", need("sweep_max"));
        rc.sweep.points = static_cast<int>(parse_int("sweep_points", need("sweep_points")));
        if (auto s = option(raw, "sweep_scale")) {
            if (*s == "log") rc.sweep.scale = SweepScale::log;
            else if (*s != "linear") throw ConfigError("sweep_scale must be linear or log");
        }
        if (rc.sweep.points < 2) throw ConfigError("sweep_points must be >= 2");
        if (rc.sweep.min > rc.sweep.max) throw ConfigError("sweep_min must be <= sweep_max");
        if (rc.sweep.scale == SweepScale::log && !(rc.sweep.min > 0.0)) {
            throw ConfigError("log sweep needs sweep_min > 0");
        }
    }
    if (auto b = option(raw, "branch")) {
        if (*b == "upper") rc.branch = BranchChoice::upper;
        else if (*b != "lower") throw ConfigError("branch must be lower or upper");
    }
    if (auto n = option(raw, "mode_points")) {
        rc.mode_points = static_cast<int>(parse_int("mode_points", *n));
        if (rc.mode_points < 2) throw ConfigError("mode_points must be >= 2");
    }
    if (auto n = option(raw, "mc_trajectories")) {
        rc.mc_trajectories = static_cast<int>(parse_int("mc_trajectories", *n));
        if (rc.mc_trajectories < 2) throw ConfigError("mc_trajectories must be >= 2");
    }
    if (auto s = option(raw, "seed")) {
        const long long v = parse_int("seed", *s);
        if (v < 0) throw ConfigError("seed must be >= 0");
        rc.seed = static_cast<std::uint64_t>(v);
    }
    if (auto a = option(raw, "assumed")) {
        std::string_view rest = *a;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (!item.empty()) {
                if (!find_alias(item)) {
                    throw ConfigError("assumed: unknown key '" + std::string(item) + "'");
                }
                rc.assumed.emplace_back(item);
            }
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    std::sort(rc.assumed.begin(), rc.assumed.end());
    rc.assumed.erase(std::unique(rc.assumed.begin(), rc.assumed.end()), rc.assumed.end());
    return rc;
}

std::vector<std::string> RunConfig::resolved_lines() const {
    const auto& c = params.cavity;
    const auto& m = params.membrane;
    std::vector<std::string> out;
    auto add = [&](std::string_view k, double v) { out.push_back(std::string(k) + "=" + format_number(v)); };
    auto add_s = [&](std::string_view k, std::string_view v) { out.push_back(std::string(k) + "=" + std::string(v)); };

    add("cavity_length_m", c.length);
    add("wavelength_m", c.wavelength);
    add("waist_m", c.waist);
    add("kappa0_rad_s", c.kappa0);
    out.push_back("mode_index=" + std::to_string(c.resolved_mode_index()));
    add("omega_b_rad_s", c.reference_frequency());
    add("thickness_m", m.thickness);
    add("n_real", m.index.real());
    add("n_imag", m.index.imag());
    add("z0_m", m.z0);
    add("mass_kg", m.mass);
    add("omega_m_rad_s", m.omega_m);
    add("quality_factor", m.quality);
    add("power_W", params.drive.power);
    add("temperature_K", params.temperature);
    if (detuning_mode == DetuningMode::effective) {
        add("detuning_eff_rad_s", effective_detuning);
    } else {
        add("laser_omega_rad_s", params.drive.laser_omega);
    }
    if (has_scan) {
        add("scan_min_rad_s", scan.offset_lo);
        add("scan_max_rad_s", scan.offset_hi);
    }
    out.push_back("scan_points=" + std::to_string(scan.points));
    if (has_sweep) {
        add_s("sweep_var", sweep.key);
        add("sweep_min", sweep.min);
        add("sweep_max", sweep.max);
        out.push_back("sweep_points=" + std::to_string(sweep.points));
        add_s("sweep_scale", sweep.scale == SweepScale::log ? "log" : "linear");
    }
    add_s("branch", branch == BranchChoice::upper ? "upper" : "lower");
    out.push_back("mode_points=" + std::to_string(mode_points));
    out.push_back("mc_trajectories=" + std::to_string(mc_trajectories));
    out.push_back("seed=" + std::to_string(seed));
    return out;
}

std::string RunConfig::hash() const {
    std::string joined;
    for (const auto& l : resolved_lines()) {
        joined += l;
        joined += '\n';
    }
    return sha256_hex(joined);
}

}  // namespace optomem::app
