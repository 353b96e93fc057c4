#include "optomem/app/commands.hpp"

#include "optomem/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <string_view>
#include <utility>

namespace optomem::app {

namespace {

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    return s;
}

struct PointInput {
    std::optional<RunConfig> config;
    std::vector<SteadyState> solutions;
    std::string error;
};

}  // namespace

std::vector<SweepRecord> run_sweep(const RawConfig& raw, const RunConfig& rc) {
    if (!rc.has_sweep) throw ConfigError("sweep needs sweep_var, sweep_min, sweep_max, sweep_points");
    const std::vector<double> values = rc.sweep.values();
    const std::size_t n = values.size();

    // resolve every point up front so config errors surface before any work
    std::vector<PointInput> inputs(n);
    for (std::size_t i = 0; i < n; ++i) {
        RawConfig point = raw;
        apply_override(point, rc.sweep.key + "=" + format_number(values[i]));
        inputs[i].config = resolve(point);
    }

    detail::parallel_for(n, [&](std::size_t i) {
        try {
            inputs[i].solutions = solve_operating_points(*inputs[i].config);
        } catch (const Error& e) {
            inputs[i].error = e.what();
        }
    });

    std::vector<SweepRecord> records(n);
    std::optional<double> previous;
    for (std::size_t i = 0; i < n; ++i) {
        SweepRecord& r = records[i];
        const RunConfig& pc = *inputs[i].config;
        r.index = static_cast<int>(i);
        r.value = values[i];
        r.params = pc.params;
        r.effective_detuning = pc.effective_detuning;
        r.n0 = pc.params.thermal_occupancy();
        r.solutions = static_cast<int>(inputs[i].solutions.size());
        if (!inputs[i].error.empty()) {
            r.status = "error";
            r.warnings.push_back(sanitize(inputs[i].error));
            continue;
        }
        const auto& sols = inputs[i].solutions;
        const SteadyState* pick =
            previous ? follow_branch(sols, previous) : select_branch(sols, rc.branch);
        if (!pick) {
            r.status = sols.empty() ? "no_solution" : "unstable";
            if (!sols.empty()) {
                double margin = sols.front().stability_margin;
                for (const auto& s : sols) margin = std::min(margin, s.stability_margin);
                r.warnings.push_back("no stable steady state; smallest margin " + format_number(margin) +
                                     " rad/s");
            }
            continue;
        }
        r.state = *pick;
        r.status = "ok";
        previous = pick->photons;
    }

    detail::parallel_for(n, [&](std::size_t i) {
        SweepRecord& r = records[i];
        if (r.status != "ok") return;
        try {
            const LinearizedModel model = linearize(r.params, *r.state);
            r.coupling = model.coupling();
            r.omega_m_eff = model.effective_omega_m();
            for (const auto& w : model.warnings) r.warnings.push_back(sanitize(w));
            const CovarianceResult cov = solve_lyapunov(model);
            r.residual = cov.residual;
            for (const auto& w : cov.warnings) r.warnings.push_back(sanitize(w));
            GaussianStateMetrics m = evaluate_metrics(cov.covariance, r.params.membrane.omega_m);
            for (const auto& w : m.warnings) r.warnings.push_back(sanitize(w));
            r.metrics = std::move(m);
        } catch (const InstabilityError& e) {
            r.status = "unstable";
            r.warnings.push_back(sanitize(e.what()));
        } catch (const Error& e) {
            r.status = "error";
            r.warnings.push_back(sanitize(e.what()));
        }
    });
    return records;
}

namespace {

// Unit of a sweepable key, read off its suffix.
std::string key_unit(std::string_view key) {
    constexpr std::pair<std::string_view, std::string_view> suffixes[] = {
        {"_rad_s", "rad/s"}, {"_omega_m", "omega_m"}, {"_lambda", "lambda"}, {"_MHz", "MHz"},
        {"_mK", "mK"},       {"_mW", "mW"},           {"_nm", "nm"},         {"_K", "K"},
        {"_W", "W"},         {"_m", "m"},
    };
    for (const auto& [suffix, unit] : suffixes) {
        if (key.ends_with(suffix)) return std::string(unit);
    }
    return "";
}

}  // namespace

Table sweep_table(const RunConfig& rc, const std::vector<SweepRecord>& records) {
    Table t;
    t.columns = {"index",          "sweep_" + rc.sweep.key, "status",
                 "temperature_K",  "power_W",               "laser_offset_rad_s",
                 "z0_m",           "q_s",                   "photons",
                 "detuning_rad_s", "kappa_total_rad_s",     "kappa1_rad_s",
                 "coupling_G_rad_s", "omega_m_eff_rad_s",   "margin_rad_s",
                 "n0",             "phonons",               "log_negativity",
                 "log_negativity_raw", "eta_minus",         "nu_min",
                 "lyapunov_residual", "branch",             "solutions",
                 "warnings"};
    t.units = {"1",     key_unit(rc.sweep.key), "",  "K", "W", "rad/s", "m", "1", "1", "rad/s", "rad/s", "rad/s", "rad/s",
               "rad/s", "rad/s", "1", "1", "1", "1",     "1", "1", "1", "",      "1",     ""};
    for (const auto& r : records) {
        const double omega_b = r.params.cavity.reference_frequency();
        std::vector<std::string> row{std::to_string(r.index), format_number(r.value), r.status,
                                     format_number(r.params.temperature),
                                     format_number(r.params.drive.power)};
        const bool solved = r.state.has_value();
        const bool done = r.metrics.has_value();
        auto opt = [](bool have, double v) { return have ? format_number(v) : std::string(); };
        row.push_back(opt(solved, solved ? r.state->laser_omega - omega_b : 0.0));
        row.push_back(format_number(r.params.membrane.z0));
        row.push_back(opt(solved, solved ? r.state->q : 0.0));
        row.push_back(opt(solved, solved ? r.state->photons : 0.0));
        row.push_back(opt(solved, solved ? r.state->detuning : 0.0));
        row.push_back(opt(solved, solved ? r.state->kappa_total : 0.0));
        row.push_back(opt(solved, solved ? r.state->mode.kappa1 : 0.0));
        row.push_back(opt(done, r.coupling));
        row.push_back(opt(done, r.omega_m_eff));
        row.push_back(opt(solved, solved ? r.state->stability_margin : 0.0));
        row.push_back(format_number(r.n0));
        row.push_back(opt(done, done ? r.metrics->phonons : 0.0));
        row.push_back(opt(done, done ? r.metrics->negativity.log_negativity : 0.0));
        row.push_back(opt(done, done ? r.metrics->negativity.raw : 0.0));
        row.push_back(opt(done, done ? r.metrics->negativity.eta_minus : 0.0));
        row.push_back(opt(done, done ? r.metrics->symplectic[1] : 0.0));
        row.push_back(opt(done, r.residual));
        row.push_back(solved ? std::string(to_string(r.state->branch)) : std::string());
        row.push_back(std::to_string(r.solutions));
        std::string w;
        for (std::size_t k = 0; k < r.warnings.size(); ++k) w += (k ? "; " : "") + r.warnings[k];
        row.push_back(w);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace optomem::app
