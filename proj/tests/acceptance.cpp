// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "optomem/app/commands.hpp"
#include "optomem/app/config.hpp"
#include "optomem/cavity_mode.hpp"
#include "optomem/constants.hpp"
#include "optomem/errors.hpp"
#include "optomem/fluctuations.hpp"
#include "optomem/observables.hpp"
#include "optomem/sde_oracle.hpp"
#include "optomem/steady_state.hpp"

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/numdiff.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace optomem;
using optomem::testing::Gen;

namespace {

const std::string source_dir = OPTOMEM_SOURCE_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

app::RunConfig load(const std::string& name) {
    return app::resolve(app::load_config_file(source_dir + "/configs/" + name));
}

// [1] membrane-free limits
Outcome analytic_limits() {
    Gen gen(101);
    double worst_flat = 0.0;
    for (int t = 0; t < 50; ++t) {
        const CavityParams c = gen.cavity();
        MembraneParams m = gen.membrane(c);
        if (t % 2 == 0) {
            m.thickness = 0.0;
        } else {
            m.index = {1.0, 0.0};
        }
        double lo = INFINITY, hi = -INFINITY;
        for (int i = 0; i < 64; ++i) {
            const double w = mode_at_position(c, m, c.wavelength * i / 128.0).omega_c;
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        worst_flat = std::max(worst_flat, (hi - lo) / c.reference_frequency());
    }

    SystemParams p = testing::long_cavity();
    p.membrane.thickness = 0.0;
    double worst_lorentz = 0.0;
    for (double d = -6.0; d <= 6.0; d += 0.25) {
        p.drive.laser_omega = testing::offset(p, d);
        const auto s = find_steady_states(p);
        if (s.size() != 1) return {false, "membrane-absent point with " + std::to_string(s.size()) + " solutions"};
        const double k = p.cavity.kappa0;
        const double d0 = p.cavity.reference_frequency() - p.drive.laser_omega;
        const double expected = p.drive.amplitude_squared(k) / (k * k + d0 * d0);
        worst_lorentz = std::max(worst_lorentz, std::abs(s[0].photons / expected - 1.0));
    }
    return {worst_flat <= 1e-12 && worst_lorentz <= 1e-10,
            "omega_c variation " + fmt(worst_flat) + ", Lorentzian error " + fmt(worst_lorentz)};
}

// [2] analytic derivatives against Richardson extrapolation
Outcome derivatives() {
    Gen gen(102);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const CavityParams c = gen.cavity();
        const MembraneParams m = gen.membrane(c);
        const double qscale = 1.0 / (2.0 * c.k0() * m.x0());
        const double q = gen.uniform(-0.5, 0.5) * qscale;
        const double h = 0.05 * qscale;
        const ModeFunction mf = mode_frequency(c, m, q);
        const double peak = max_coupling(c, m);

        auto rel = [](double analytic, double numeric, double floor) {
            return std::abs(analytic - numeric) / std::max(std::abs(analytic), floor);
        };
        const auto dw = testing::richardson([&](double x) { return mode_frequency(c, m, x).shift; }, q, h);
        worst = std::max(worst, rel(mf.d_omega, dw.value, 1e-3 * peak));
        const auto d2 = testing::richardson([&](double x) { return mode_frequency(c, m, x).d_omega; }, q, h);
        worst = std::max(worst, rel(mf.d2_omega, d2.value, 1e-3 * peak / qscale));
        if (m.index.imag() > 0.0) {
            const double kmax = std::max(mode_at_position(c, m, 0.0).kappa1,
                                         mode_at_position(c, m, c.wavelength / 4).kappa1);
            const auto dk = testing::richardson([&](double x) { return mode_frequency(c, m, x).kappa1; }, q, h);
            worst = std::max(worst, rel(mf.d_kappa1, dk.value, 1e-3 * kmax / qscale));
        }
    }
    return {worst <= 1e-8, "worst relative difference " + fmt(worst) + " over 100 points"};
}

// [3] hysteresis in the 9 cm cavity
Outcome fig1_regime() {
    const app::RunConfig rc = load("fig1-assumed.cfg");
    SystemParams p = rc.params;
    const double wb = p.cavity.reference_frequency();
    const double lo = wb + rc.scan.offset_lo;
    const double hi = wb + rc.scan.offset_hi;
    const int steps = rc.scan.points;

    auto compare = [&](const SystemParams& sp, double& max_rel) {
        const ScanTrace up = scan_hysteresis(sp, lo, hi, ScanDirection::up, steps);
        const ScanTrace down = scan_hysteresis(sp, lo, hi, ScanDirection::down, steps);
        const std::size_t n = up.points.size();
        int differ = 0;
        max_rel = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = up.points[i];
            const auto& d = down.points[n - 1 - i];
            const double r = std::abs(u.photons - d.photons) / std::max(u.photons, d.photons);
            max_rel = std::max(max_rel, r);
            differ += r > 1e-9;
        }
        return differ;
    };

    const ThresholdResult th = bistability_threshold(p, lo, hi);
    if (!th.found) return {false, "no threshold: " + th.message};
    double rel_above = 0.0, rel_below = 0.0;
    const int differ = compare(p, rel_above);
    SystemParams weak = p;
    weak.drive.power = 0.5 * th.power;
    (void)compare(weak, rel_below);
    const bool pass = differ > 0 && th.power < 30e-3 && rel_below <= 1e-9;
    return {pass, "threshold " + fmt(th.power * 1e3) + " mW, " + std::to_string(differ) +
                      " differing steps at " + fmt(p.drive.power * 1e3) + " mW, below-threshold mismatch " +
                      fmt(rel_below)};
}

// [4] covariance invariants on random physical sets
Outcome random_covariances() {
    Gen gen(104);
    int checked = 0, bad_residual = 0, bad_symmetry = 0, bad_pd = 0, bad_nu = 0;
    double worst_residual = 0.0, worst_nu = INFINITY;
    while (checked < 200) {
        const SystemParams p = gen.moderate_system();
        for (const auto& ss : find_steady_states(p)) {
            if (!ss.stable || checked == 200) continue;
            const LinearizedModel m = linearize(p, ss);
            const CovarianceResult c = solve_lyapunov(m);
            const Eigen::Matrix4d& v = c.covariance;
            const double nu = symplectic_spectrum(v)[1];
            worst_residual = std::max(worst_residual, c.residual);
            worst_nu = std::min(worst_nu, nu);
            bad_residual += !(c.residual <= 1e-10);
            bad_symmetry += !(v == v.transpose());
            bad_pd += Eigen::LLT<Eigen::Matrix4d>(v).info() != Eigen::Success;
            bad_nu += !(nu >= 0.5 - 1e-9);
            ++checked;
        }
    }
    const bool pass = bad_residual + bad_symmetry + bad_pd + bad_nu == 0;
    return {pass, "200 sets; residual > 1e-10 in " + std::to_string(bad_residual) + " (worst " +
                      fmt(worst_residual) + "), asymmetric " + std::to_string(bad_symmetry) + ", not PD " +
                      std::to_string(bad_pd) + ", nu_min < 1/2 in " + std::to_string(bad_nu) +
                      " (smallest " + fmt(worst_nu) + ")"};
}

// [5] uncoupled limit
Outcome uncoupled() {
    double worst_v = 0.0, worst_n = 0.0;
    double worst_e = 0.0;
    auto check = [&](const LinearizedModel& m, double n0) {
        const Eigen::Matrix4d v = solve_lyapunov(m).covariance;
        const Eigen::Vector4d d(n0 + 0.5, n0 + 0.5, 0.5, 0.5);
        const Eigen::Matrix4d expected = d.asDiagonal();
        worst_v = std::max(worst_v, ((v - expected).cwiseAbs().array() / (n0 + 0.5)).maxCoeff());
        const GaussianStateMetrics g = evaluate_metrics(v, m.scalars.omega_m);
        worst_n = std::max(worst_n, std::abs(g.phonons - n0) / std::max(n0, 1.0));
        worst_e = std::max(worst_e, g.negativity.log_negativity);
    };
    // the physical pipeline with the membrane removed
    SystemParams p = testing::short_cavity();
    p.membrane.thickness = 0.0;
    for (double t : {0.01, 1.0, 300.0}) {
        p.temperature = t;
        for (const auto& ss : find_steady_states_at_detuning(p, p.membrane.omega_m)) {
            check(linearize(p, ss), p.thermal_occupancy());
        }
    }
    // and random dimensionless models
    Gen gen(105);
    for (int t = 0; t < 100; ++t) {
        ModelScalars s = gen.scalars();
        s.coupling = 0.0;
        s.spring = 0.0;
        s.kappa1 = 0.0;
        s.absorption_coupling = 0.0;
        check(build_model(s), s.n0);
    }
    return {worst_v <= 1e-10 && worst_n <= 1e-10 && worst_e <= 1e-10,
            "V error " + fmt(worst_v) + " (relative to n0+1/2), n error " + fmt(worst_n) + ", E_N at most " +
                fmt(worst_e)};
}

struct Representative {
    std::string name;
    LinearizedModel model;
};

std::vector<Representative> representative_models() {
    std::vector<Representative> out;
    auto physical = [&](std::string name, SystemParams p, double detuning) {
        const auto sols = find_steady_states_at_detuning(p, detuning);
        for (const auto& ss : sols) {
            if (ss.stable) {
                out.push_back({std::move(name), linearize(p, ss)});
                return;
            }
        }
        throw InvalidState("no stable solution for " + name);
    };
    SystemParams p = testing::short_cavity();
    p.temperature = 0.01;
    physical("0.74 mm cavity, absorbing, 10 mK", p, p.membrane.omega_m);
    p.membrane.index = {2.0, 0.0};
    p.temperature = 0.1;
    p.drive.power = 10e-3;
    physical("0.74 mm cavity, lossless, 10 mW, 100 mK", p, p.membrane.omega_m);

    ModelScalars s;
    s.omega_m = 1.0;
    s.gamma_m = 0.2;
    s.n0 = 2.0;
    s.kappa0 = 0.5;
    s.detuning = 1.0;
    s.coupling = 0.1;
    out.push_back({"dimensionless, weak coupling", build_model(s)});
    s.coupling = -0.3;
    s.n0 = 0.5;
    out.push_back({"dimensionless, strong coupling", build_model(s)});
    s.coupling = 0.2;
    s.spring = 0.05;
    s.kappa1 = 0.05;
    s.absorption_coupling = 0.03;
    s.detuning = 0.6;
    out.push_back({"dimensionless, spring and absorption", build_model(s)});
    return out;
}

// [6] ODE oracle and Monte Carlo against the Lyapunov solve
Outcome oracles() {
    std::string detail;
    bool pass = true;
    double worst_ode = 0.0, worst_z = 0.0;
    for (const auto& r : representative_models()) {
        const Eigen::Matrix4d v = solve_lyapunov(r.model).covariance;
        const double ode = (integrate_covariance(r.model).covariance - v).cwiseAbs().maxCoeff();

        TrajectoryConfig cfg = default_trajectory_config(r.model, 10000, 6);
        cfg.dt = 0.002 / r.model.drift.cwiseAbs().maxCoeff();
        const CovarianceEstimate est = simulate_cm(r.model, cfg);
        double z = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                z = std::max(z, std::abs(est.covariance(i, j) - v(i, j)) / est.standard_error(i, j));
            }
        }
        const bool ok = ode <= 1e-8 && z <= 3.0;
        pass = pass && ok;
        worst_ode = std::max(worst_ode, ode);
        worst_z = std::max(worst_z, z);
        if (!ok) detail += "; " + r.name + ": ode " + fmt(ode) + ", " + fmt(z) + " SE";
    }
    return {pass, "5 models, 1e4 trajectories; worst ODE error " + fmt(worst_ode) + ", worst MC deviation " +
                      fmt(worst_z) + " SE" + detail};
}

// [7] log-negativity of known states
Outcome known_states() {
    double worst = 0.0;
    for (double r : {0.0, 0.5, 1.0}) {
        const double c = std::cosh(2 * r), s = std::sinh(2 * r);
        Eigen::Matrix4d v;
        v << c, 0, s, 0,
             0, c, 0, -s,
             s, 0, c, 0,
             0, -s, 0, c;
        v *= 0.5;
        worst = std::max(worst, std::abs(log_negativity(v).log_negativity - 2 * r));
    }
    Gen gen(107);
    int nonzero = 0;
    for (int t = 0; t < 1000; ++t) {
        const double n1 = gen.log_uniform(1e-6, 1e6);
        const double n2 = gen.log_uniform(1e-6, 1e3);
        const Eigen::Matrix4d v = Eigen::Vector4d(n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5).asDiagonal();
        nonzero += log_negativity(v).log_negativity != 0.0;
    }
    return {worst <= 1e-10 && nonzero == 0,
            "two-mode squeezed error " + fmt(worst) + ", nonzero on " + std::to_string(nonzero) +
                " of 1000 thermal products"};
}

// [8] temperature sweep of the 0.74 mm cavity
Outcome fig2_sweep() {
    const app::RawConfig raw = app::load_config_file(source_dir + "/configs/fig2-assumed.cfg");
    const app::RunConfig rc = app::resolve(raw);
    const auto records = app::run_sweep(raw, rc);
    int failed = 0, n_breaks = 0, e_breaks = 0;
    bool regime = false;
    double low_n = INFINITY, high_e = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.status != "ok" || !r.metrics) {
            ++failed;
            continue;
        }
        const double n = r.metrics->phonons;
        const double e = r.metrics->negativity.log_negativity;
        low_n = std::min(low_n, n);
        high_e = std::max(high_e, e);
        regime = regime || (n < 1.0 && e > 0.0);
        if (i > 0 && records[i - 1].metrics) {
            n_breaks += !(n > records[i - 1].metrics->phonons);
            e_breaks += !(e <= records[i - 1].metrics->negativity.log_negativity);
        }
    }
    return {failed == 0 && n_breaks == 0 && e_breaks == 0 && regime,
            std::to_string(records.size()) + " temperatures, " + std::to_string(failed) + " not ok; n at 10 mK " +
                fmt(low_n) + ", E_N max " + fmt(high_e) + "; monotonicity breaks n " + std::to_string(n_breaks) +
                ", E_N " + std::to_string(e_breaks)};
}

// [9] byte-identical reruns
Outcome determinism() {
    auto run = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int status = app::run_cli(args, out, err);
        return std::to_string(status) + "\n" + out.str();
    };
    const std::string fig2 = source_dir + "/configs/fig2-assumed.cfg";
    const std::vector<std::string> sweep{"sweep", "--config", fig2, "--seed", "7"};
    const std::vector<std::string> verify{"verify", "--config", fig2, "--set", "mc_trajectories=2000", "--seed", "7"};
    const std::string s1 = run(sweep), s2 = run(sweep);
    const std::string v1 = run(verify), v2 = run(verify);
    return {s1 == s2 && v1 == v2, std::string("sweep ") + (s1 == s2 ? "identical" : "differs") + ", verify " +
                                      (v1 == v2 ? "identical" : "differs") + " (" + std::to_string(s1.size()) +
                                      " and " + std::to_string(v1.size()) + " bytes)"};
}

struct Criterion {
    int id;
    const char* title;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "analytic limits", 1.0, analytic_limits},
        {2, "derivatives vs Richardson", 5.0, derivatives},
        {3, "bistability and hysteresis (9 cm cavity)", 30.0, fig1_regime},
        {4, "covariance invariants on 200 random sets", 10.0, random_covariances},
        {5, "uncoupled thermal and vacuum state", 1.0, uncoupled},
        {6, "ODE and Monte Carlo oracles", 600.0, oracles},
        {7, "log-negativity of known states", 1.0, known_states},
        {8, "temperature sweep (0.74 mm cavity)", 120.0, fig2_sweep},
        {9, "determinism of sweep and verify", 60.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.limit_s) + " s budget";
        }
        failures += !o.pass;
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
