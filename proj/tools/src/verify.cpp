#include "optomem/app/commands.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"
#include "optomem/sde_oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace optomem::app {

namespace {

// Euler-Maruyama is used while trajectories * steps stays below this budget;
// beyond it the exact Gaussian propagator takes over.
constexpr double em_step_budget = 3e8;
constexpr double em_dt_fraction = 0.002;

Check make(std::string name, bool pass, double value, double tol, std::string detail = {}) {
    return {std::move(name), pass ? "pass" : "fail", value, tol, std::move(detail)};
}

Check info(std::string name, double value, std::string detail = {}) {
    return {std::move(name), "info", value, 0.0, std::move(detail)};
}

}  // namespace

bool VerifyReport::passed() const {
    if (unstable) return false;
    for (const auto& c : checks) {
        if (c.status == "fail") return false;
    }
    return true;
}

VerifyReport run_verify(const RunConfig& rc) {
    VerifyReport rep;
    const std::vector<SteadyState> sols = solve_operating_points(rc);
    const SteadyState* pick = select_branch(sols, rc.branch);
    rep.checks.push_back(info("solutions", static_cast<double>(sols.size())));
    if (!pick) {
        double margin = sols.empty() ? 0.0 : sols.front().stability_margin;
        for (const auto& s : sols) margin = std::min(margin, s.stability_margin);
        rep.unstable = true;
        rep.checks.push_back(make("stability", false, margin, 0.0, "no stable steady state"));
        return rep;
    }
    const SteadyState& ss = *pick;
    const SystemParams& p = rc.params;
    rep.checks.push_back(info("photons", ss.photons));
    rep.checks.push_back(info("detuning_rad_s", ss.detuning));

    const LinearizedModel model = linearize(p, ss);
    const StabilityReport st = is_stable(model);
    rep.checks.push_back(make("stability", st.stable, st.margin, 0.0));
    if (!st.stable) {
        rep.unstable = true;
        return rep;
    }

    {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(model.diffusion);
        const double lo = es.eigenvalues().minCoeff();
        const double tol = 1e-12 * model.diffusion.norm();
        rep.checks.push_back(make("diffusion_psd", lo >= -tol, lo, -tol));
    }
    {
        // G from the photon number versus G from the input power
        const double e2 = ss.kappa_total * ss.kappa_total + ss.detuning * ss.detuning;
        const double g2 = -2.0 * ss.mode.d_omega *
                          std::sqrt(p.drive.power * p.cavity.kappa0 /
                                    (constants::hbar * ss.laser_omega * e2));
        const double g = model.coupling();
        const double rel = g == 0.0 && g2 == 0.0 ? 0.0 : std::abs(g - g2) / std::max(std::abs(g), std::abs(g2));
        rep.checks.push_back(make("coupling_forms", rel <= 1e-9, rel, 1e-9));
    }

    const CovarianceResult cov = solve_lyapunov(model);
    const Eigen::Matrix4d& v = cov.covariance;
    rep.checks.push_back(make("lyapunov_residual", cov.residual <= 1e-10, cov.residual, 1e-10));
    {
        const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
        rep.checks.push_back(make("symmetry", asym == 0.0, asym, 0.0));
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(v);
        const double lo = es.eigenvalues().minCoeff();
        rep.checks.push_back(make("positive_definite", lo > 0.0, lo, 0.0));
    }
    const GaussianStateMetrics m = evaluate_metrics(v, p.membrane.omega_m);
    rep.checks.push_back(make("physicality", m.symplectic[1] >= 0.5 - 1e-9, m.symplectic[1], 0.5 - 1e-9));

    {
        const OdeCovariance ode = integrate_covariance(model);
        const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
        const double err = (ode.covariance - v).cwiseAbs().maxCoeff();
        rep.checks.push_back(make("ode_oracle", err <= 1e-8 * scale, err, 1e-8 * scale,
                                  "horizon_s=" + format_number(ode.horizon)));
    }
    {
        TrajectoryConfig cfg =
            default_trajectory_config(model, rc.mc_trajectories, rc.seed, Integrator::euler_maruyama);
        cfg.dt = em_dt_fraction / model.drift.cwiseAbs().maxCoeff();
        const double steps = std::ceil(cfg.burn_in / cfg.dt) * rc.mc_trajectories;
        if (steps > em_step_budget) {
            cfg = default_trajectory_config(model, rc.mc_trajectories, rc.seed, Integrator::exact_gaussian);
        }
        const CovarianceEstimate est = simulate_cm(model, cfg);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                const double se = est.standard_error(i, j);
                const double dev = std::abs(est.covariance(i, j) - v(i, j));
                const double z = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : INFINITY);
                worst = std::max(worst, z);
            }
        }
        const std::string scheme =
            cfg.scheme == Integrator::euler_maruyama ? "euler_maruyama" : "exact_gaussian";
        rep.checks.push_back(make("monte_carlo", worst <= 3.0, worst, 3.0,
                                  "max standard errors; trajectories=" + std::to_string(rc.mc_trajectories) +
                                      " scheme=" + scheme + " dt_s=" + format_number(cfg.dt)));
    }

    rep.checks.push_back(info("n0", p.thermal_occupancy()));
    rep.checks.push_back(info("phonons", m.phonons));
    rep.checks.push_back(info("log_negativity", m.negativity.log_negativity));
    rep.checks.push_back(info("eta_minus", m.negativity.eta_minus));
    rep.checks.push_back(info("coupling_G_rad_s", model.coupling()));
    return rep;
}

Table verify_table(const VerifyReport& report) {
    Table t;
    t.columns = {"check", "status", "value", "tolerance", "detail"};
    t.units = {"", "", "", "", ""};
    for (const auto& c : report.checks) {
        t.rows.push_back({c.name, c.status, format_number(c.value),
                          c.status == "info" ? std::string() : format_number(c.tolerance), c.detail});
    }
    return t;
}

}  // namespace optomem::app
