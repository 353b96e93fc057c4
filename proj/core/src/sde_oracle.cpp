#include "optomem/sde_oracle.hpp"

#include "optomem/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

namespace optomem {

namespace {

double drift_scale(const LinearizedModel& model) { return model.drift.cwiseAbs().maxCoeff(); }

}  // namespace

TrajectoryConfig default_trajectory_config(const LinearizedModel& model, int trajectories,
                                           std::uint64_t seed, Integrator scheme) {
    const StabilityReport rep = is_stable(model);
    if (!rep.stable) throw InstabilityError(rep.margin, "cannot simulate an unstable model");
    TrajectoryConfig cfg;
    cfg.trajectories = trajectories;
    cfg.seed = seed;
    cfg.scheme = scheme;
    cfg.burn_in = 10.0 / std::abs(rep.margin);
    cfg.dt = scheme == Integrator::euler_maruyama ? 0.01 / drift_scale(model)
                                                  : 0.1 / std::abs(rep.margin);
    return cfg;
}

void validate(const TrajectoryConfig& cfg, const LinearizedModel& model) {
    auto fail = [](const std::string& what) { throw InvalidParameter(what); };
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("trajectory dt must be > 0");
    if (cfg.trajectories < 1) fail("trajectory count must be >= 1");
    if (cfg.batches_per_trajectory < 1) fail("batches per trajectory must be >= 1");
    if (cfg.burn_in < 0.0 || cfg.sampling_time < 0.0 || cfg.sample_interval < 0.0) {
        fail("burn-in, sampling time and sample interval must be >= 0");
    }
    if (cfg.trajectories * cfg.batches_per_trajectory < 2) {
        fail("need at least 2 batches for standard errors");
    }
    if (cfg.sampling_time == 0.0 && cfg.batches_per_trajectory != 1) {
        fail("a single-sample window cannot be split into batches");
    }
    if (cfg.scheme == Integrator::euler_maruyama) {
        const double limit = 0.05 / drift_scale(model);
        if (!(cfg.dt < limit)) {
            std::ostringstream os;
            os << "Euler-Maruyama step dt = " << cfg.dt << " s must be below 0.05/max|A| = " << limit
               << " s";
            fail(os.str());
        }
    }
}

Eigen::Matrix4d noise_factor(const Eigen::Matrix4d& diffusion) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(diffusion);
    if (es.info() != Eigen::Success) throw InvalidState("eigendecomposition of D failed");
    const double scale = std::max(diffusion.norm(), 1e-300);
    Eigen::Vector4d ev = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        if (ev[i] < 0.0) {
            if (ev[i] < -1e-12 * scale) {
                std::ostringstream os;
                os << "diffusion matrix is not positive semidefinite (eigenvalue " << ev[i] << ")";
                throw InvalidState(os.str());
            }
            ev[i] = 0.0;
        }
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

namespace {

struct Stepper {
    Eigen::Matrix4d transition;  // u <- transition * u + noise * xi
    Eigen::Matrix4d noise;  // nonzero columns first
    int rank = 0;
};

/// Moves the non-null columns of `b` to the front so only `rank` normals are drawn per step.
void compact_noise(const Eigen::Matrix4d& b, Stepper& s) {
    const double scale = b.cwiseAbs().maxCoeff();
    s.noise.setZero();
    s.rank = 0;
    for (int j = 0; j < 4; ++j) {
        if (b.col(j).cwiseAbs().maxCoeff() > 1e-14 * scale) s.noise.col(s.rank++) = b.col(j);
    }
}

Stepper make_stepper(const LinearizedModel& model, const TrajectoryConfig& cfg) {
    Stepper s;
    const double dt = cfg.dt;
    if (cfg.scheme == Integrator::euler_maruyama) {
        s.transition = Eigen::Matrix4d::Identity() + model.drift * dt;
        compact_noise(noise_factor(model.diffusion) * std::sqrt(dt), s);
        return s;
    }
    // Van Loan: exp([[-A, D], [0, A^T]] dt) = [[*, F12], [0, F22]],
    // Phi = F22^T and Q = F22^T F12.
    Eigen::Matrix<double, 8, 8> block = Eigen::Matrix<double, 8, 8>::Zero();
    block.topLeftCorner<4, 4>() = -model.drift * dt;
    block.topRightCorner<4, 4>() = model.diffusion * dt;
    block.bottomRightCorner<4, 4>() = model.drift.transpose() * dt;
    const Eigen::Matrix<double, 8, 8> f = block.exp();
    s.transition = f.bottomRightCorner<4, 4>().transpose();
    Eigen::Matrix4d q = s.transition * f.topRightCorner<4, 4>();
    q = 0.5 * (q + q.transpose());
    compact_noise(noise_factor(q), s);
    return s;
}

struct TrajectoryMoments {
    std::vector<Eigen::Matrix4d> batch_means;
};

TrajectoryMoments run_trajectory(const Stepper& stepper, const TrajectoryConfig& cfg,
                                 std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int rank = stepper.rank;
    Eigen::Vector4d xi = Eigen::Vector4d::Zero();
    Eigen::Vector4d u = Eigen::Vector4d::Zero();

    auto advance = [&] {
        for (int k = 0; k < rank; ++k) xi[k] = normal(gen);
        u = stepper.transition * u + stepper.noise * xi;
    };

    const long burn = static_cast<long>(std::ceil(cfg.burn_in / cfg.dt));
    for (long i = 0; i < burn; ++i) advance();

    TrajectoryMoments out;
    if (cfg.sampling_time == 0.0) {
        out.batch_means.push_back(u * u.transpose());
        return out;
    }
    const long window = std::max(1L, static_cast<long>(std::ceil(cfg.sampling_time / cfg.dt)));
    const long stride = cfg.sample_interval > 0.0
                            ? std::max(1L, std::lround(cfg.sample_interval / cfg.dt))
                            : 1L;
    const long samples = std::max(1L, window / stride);
    const int batches = cfg.batches_per_trajectory;
    if (samples < batches) throw InvalidParameter("fewer samples than batches in the sampling window");
    const long per_batch = samples / batches;
    out.batch_means.assign(batches, Eigen::Matrix4d::Zero());
    for (int b = 0; b < batches; ++b) {
        Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
        for (long s = 0; s < per_batch; ++s) {
            for (long k = 0; k < stride; ++k) advance();
            acc.noalias() += u * u.transpose();
        }
        out.batch_means[b] = acc / static_cast<double>(per_batch);
    }
    return out;
}

}  // namespace

CovarianceEstimate simulate_cm(const LinearizedModel& model, const TrajectoryConfig& cfg) {
    const StabilityReport rep = is_stable(model);
    if (!rep.stable) throw InstabilityError(rep.margin, "cannot simulate an unstable model");
    validate(cfg, model);
    const Stepper stepper = make_stepper(model, cfg);

    std::vector<TrajectoryMoments> results(cfg.trajectories);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(cfg.trajectories));
    if (workers <= 1) {
        for (int k = 0; k < cfg.trajectories; ++k) results[k] = run_trajectory(stepper, cfg, k);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int k = static_cast<int>(w); k < cfg.trajectories; k += static_cast<int>(workers)) {
                    results[k] = run_trajectory(stepper, cfg, static_cast<std::uint64_t>(k));
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // reduce in trajectory order for bit-identical results
    Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d sum_sq = Eigen::Matrix4d::Zero();
    long count = 0;
    for (const auto& r : results) {
        for (const auto& m : r.batch_means) {
            sum += m;
            sum_sq += m.cwiseProduct(m);
            ++count;
        }
    }
    CovarianceEstimate est;
    const double n = static_cast<double>(count);
    const Eigen::Matrix4d mean = sum / n;
    est.covariance = 0.5 * (mean + mean.transpose());
    const Eigen::Matrix4d var = ((sum_sq - n * mean.cwiseProduct(mean)) / (n - 1.0)).cwiseMax(0.0);
    est.standard_error = (var / n).cwiseSqrt();
    est.standard_error = 0.5 * (est.standard_error + est.standard_error.transpose());
    est.effective_samples = n;
    return est;
}

OdeCovariance integrate_covariance(const LinearizedModel& model,
                                   std::optional<Eigen::Matrix4d> initial,
                                   double horizon_margins) {
    const StabilityReport rep = is_stable(model);
    if (!rep.stable) throw InstabilityError(rep.margin, "ODE oracle needs a stable model");

    double unit = model.scalars.omega_m;
    if (!(unit > 0.0)) unit = drift_scale(model);
    const Eigen::Matrix4d a = model.drift / unit;
    const Eigen::Matrix4d d = model.diffusion / unit;
    const double horizon = horizon_margins / (std::abs(rep.margin) / unit);

    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    const int doublings = std::max(0, static_cast<int>(std::ceil(std::log2(horizon * norm / 1e-3))));
    const double h = std::ldexp(horizon, -doublings);

    // one RK4 step of dPhi/dt = A Phi and dW/dt = A W + W A^T + D over h
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    auto phi_rhs = [&](const Eigen::Matrix4d& p) -> Eigen::Matrix4d { return a * p; };
    auto w_rhs = [&](const Eigen::Matrix4d& w) -> Eigen::Matrix4d {
        return a * w + w * a.transpose() + d;
    };
    Eigen::Matrix4d phi, w;
    {
        const Eigen::Matrix4d k1 = phi_rhs(id);
        const Eigen::Matrix4d k2 = phi_rhs(id + 0.5 * h * k1);
        const Eigen::Matrix4d k3 = phi_rhs(id + 0.5 * h * k2);
        const Eigen::Matrix4d k4 = phi_rhs(id + h * k3);
        phi = id + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    {
        const Eigen::Matrix4d w0 = Eigen::Matrix4d::Zero();
        const Eigen::Matrix4d k1 = w_rhs(w0);
        const Eigen::Matrix4d k2 = w_rhs(w0 + 0.5 * h * k1);
        const Eigen::Matrix4d k3 = w_rhs(w0 + 0.5 * h * k2);
        const Eigen::Matrix4d k4 = w_rhs(w0 + h * k3);
        w = w0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    for (int i = 0; i < doublings; ++i) {
        w = w + phi * w * phi.transpose();
        w = 0.5 * (w + w.transpose());
        phi = phi * phi;
    }

    Eigen::Matrix4d v0;
    if (initial) {
        v0 = *initial;
    } else {
        const double n0 = model.scalars.n0;
        v0 = Eigen::Vector4d(n0 + 0.5, n0 + 0.5, 0.5, 0.5).asDiagonal();
    }
    OdeCovariance out;
    out.covariance = phi * v0 * phi.transpose() + w;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    out.horizon = horizon / unit;
    out.doublings = doublings;
    return out;
}

}  // namespace optomem
