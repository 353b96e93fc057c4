#include "optomem/app/commands.hpp"

#include "optomem/cavity_mode.hpp"
#include "optomem/constants.hpp"

#include <ostream>

#ifndef OPTOMEM_VERSION
#define OPTOMEM_VERSION "unknown"
#endif

namespace optomem::app {

void write_csv(std::ostream& out, const RunConfig& rc, std::string_view command,
               const std::vector<std::string>& notes, const Table& table) {
    out << "# optomem " << OPTOMEM_VERSION << ' ' << command << '\n';
    out << "# config_sha256=" << rc.hash() << '\n';
    for (const auto& line : rc.resolved_lines()) out << "# " << line << '\n';
    out << "# assumed=";
    for (std::size_t i = 0; i < rc.assumed.size(); ++i) out << (i ? "," : "") << rc.assumed[i];
    out << '\n';
    for (const auto& n : notes) out << "# " << n << '\n';
    out << "# units=";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i] << ':' << table.units[i];
    }
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

std::vector<SteadyState> solve_operating_points(const RunConfig& rc) {
    if (rc.detuning_mode == DetuningMode::effective) {
        return find_steady_states_at_detuning(rc.params, rc.effective_detuning);
    }
    return find_steady_states(rc.params);
}

const SteadyState* select_branch(const std::vector<SteadyState>& solutions, BranchChoice choice) {
    const SteadyState* best = nullptr;
    for (const auto& s : solutions) {
        if (!s.stable) continue;
        if (!best) {
            best = &s;
        } else if (choice == BranchChoice::upper ? s.photons > best->photons
                                                 : s.photons < best->photons) {
            best = &s;
        }
    }
    return best;
}

Table mode_table(const RunConfig& rc) {
    const auto& cav = rc.params.cavity;
    const auto& mem = rc.params.membrane;
    Table t;
    t.columns = {"z_m",           "q",                 "omega_shift_rad_s", "kappa1_rad_s",
                 "d_omega_dq_rad_s", "d_kappa1_dq_rad_s", "d2_omega_dq2_rad_s", "coupling_Hz"};
    t.units = {"m", "1", "rad/s", "rad/s", "rad/s", "rad/s", "rad/s", "Hz"};
    const int n = rc.mode_points;
    const double x0 = mem.x0();
    for (int i = 0; i < n; ++i) {
        const double z = mem.z0 + 0.5 * cav.wavelength * i / (n - 1);
        const ModeFunction m = mode_at_position(cav, mem, z);
        t.rows.push_back({format_number(z), format_number((z - mem.z0) / x0), format_number(m.shift),
                          format_number(m.kappa1), format_number(m.d_omega), format_number(m.d_kappa1),
                          format_number(m.d2_omega), format_number(m.d_omega / constants::two_pi)});
    }
    return t;
}

Table steady_table(const RunConfig& rc, const std::vector<SteadyState>& solutions) {
    Table t;
    t.columns = {"index",          "laser_offset_rad_s", "q_s",           "photons",
                 "detuning_rad_s", "kappa_total_rad_s",  "kappa1_rad_s",  "transmitted_W",
                 "branch",         "stable",             "margin_rad_s",  "near_degenerate",
                 "residual_position", "residual_photons"};
    t.units = {"1", "rad/s", "1", "1", "rad/s", "rad/s", "rad/s", "W", "", "", "rad/s", "", "1", "1"};
    const double omega_b = rc.params.cavity.reference_frequency();
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        const auto& s = solutions[i];
        t.rows.push_back({std::to_string(i), format_number(s.laser_omega - omega_b), format_number(s.q),
                          format_number(s.photons), format_number(s.detuning),
                          format_number(s.kappa_total), format_number(s.mode.kappa1),
                          format_number(transmitted_power(rc.params, s)), std::string(to_string(s.branch)),
                          s.stable ? "1" : "0", format_number(s.stability_margin),
                          s.near_degenerate ? "1" : "0", format_number(s.residual_position),
                          format_number(s.residual_photons)});
    }
    return t;
}

std::vector<ScanTrace> run_scan(const RunConfig& rc, ScanRequest request) {
    if (!rc.has_scan) throw ConfigError("scan needs scan_min_MHz and scan_max_MHz");
    if (rc.detuning_mode == DetuningMode::effective) {
        throw ConfigError("scan sweeps the laser frequency; remove the detuning_eff_* key");
    }
    const double omega_b = rc.params.cavity.reference_frequency();
    const double lo = omega_b + rc.scan.offset_lo;
    const double hi = omega_b + rc.scan.offset_hi;
    std::vector<ScanTrace> out;
    if (request != ScanRequest::down) {
        out.push_back(scan_hysteresis(rc.params, lo, hi, ScanDirection::up, rc.scan.points));
    }
    if (request != ScanRequest::up) {
        out.push_back(scan_hysteresis(rc.params, lo, hi, ScanDirection::down, rc.scan.points));
    }
    return out;
}

Table scan_table(const RunConfig& rc, const std::vector<ScanTrace>& traces) {
    Table t;
    t.columns = {"direction", "step",           "laser_offset_rad_s", "laser_offset_MHz", "photons",
                 "q_s",       "detuning_rad_s", "transmitted_W",      "branch",           "solutions"};
    t.units = {"", "1", "rad/s", "MHz", "1", "1", "rad/s", "W", "", "1"};
    const double omega_b = rc.params.cavity.reference_frequency();
    for (const auto& tr : traces) {
        for (const auto& p : tr.points) {
            const double off = p.laser_omega - omega_b;
            t.rows.push_back({std::string(to_string(tr.direction)), std::to_string(p.step),
                              format_number(off), format_number(off / (constants::two_pi * 1e6)),
                              format_number(p.photons), format_number(p.q), format_number(p.detuning),
                              format_number(p.transmitted), std::string(to_string(p.branch)),
                              std::to_string(p.solution_count)});
        }
    }
    return t;
}

}  // namespace optomem::app
