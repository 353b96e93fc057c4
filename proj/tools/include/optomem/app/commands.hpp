#pragma once

#include "optomem/app/config.hpp"
#include "optomem/fluctuations.hpp"
#include "optomem/observables.hpp"
#include "optomem/steady_state.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace optomem::app {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_unstable = 3,
    exit_numerical = 4,
};

struct Table {
    std::vector<std::string> columns;  ///< names carry their unit suffix
    std::vector<std::string> units;
    std::vector<std::vector<std::string>> rows;
};

/// '#' header block (command, config hash, resolved parameters, assumptions,
/// column units) followed by the CSV table.
void write_csv(std::ostream& out, const RunConfig& rc, std::string_view command,
               const std::vector<std::string>& notes, const Table& table);

/// All steady states at the configured drive (laser frequency or effective detuning).
std::vector<SteadyState> solve_operating_points(const RunConfig& rc);

/// Stable solution chosen by the branch rule: lowest photon number for
/// `lower`, highest for `upper`. nullptr when none is stable.
const SteadyState* select_branch(const std::vector<SteadyState>& solutions, BranchChoice choice);

Table mode_table(const RunConfig& rc);
Table steady_table(const RunConfig& rc, const std::vector<SteadyState>& solutions);

enum class ScanRequest { up, down, both };
std::vector<ScanTrace> run_scan(const RunConfig& rc, ScanRequest request);
Table scan_table(const RunConfig& rc, const std::vector<ScanTrace>& traces);

struct SweepRecord {
    int index = 0;
    double value = 0.0;  ///< swept value in the units of the sweep key
    std::string status;  ///< ok | unstable | no_solution | error
    SystemParams params;
    double effective_detuning = 0.0;
    int solutions = 0;
    std::optional<SteadyState> state;
    double coupling = 0.0;
    double omega_m_eff = 0.0;
    double n0 = 0.0;
    std::optional<GaussianStateMetrics> metrics;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

/// One record per sweep value, in sweep order. Points are solved in parallel;
/// branch continuation runs sequentially in sweep order.
std::vector<SweepRecord> run_sweep(const RawConfig& raw, const RunConfig& rc);
Table sweep_table(const RunConfig& rc, const std::vector<SweepRecord>& records);

struct Check {
    std::string name;
    std::string status;  ///< pass | fail | info
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    bool unstable = false;
    std::vector<Check> checks;
    bool passed() const;
};

/// Lyapunov residual, physicality, ODE oracle and Monte Carlo cross-check at
/// the configured operating point.
VerifyReport run_verify(const RunConfig& rc);
Table verify_table(const VerifyReport& report);

/// Command-line entry point shared by the executable and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optomem::app
