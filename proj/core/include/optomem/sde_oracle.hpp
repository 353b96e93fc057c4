#pragma once

#include "optomem/fluctuations.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace optomem {

/// How one time step of du = A u dt + B dW is advanced.
enum class Integrator {
    /// u += A u dt + B sqrt(dt) xi. Weak order 1; stationary bias O(dt).
    euler_maruyama,
    /// u <- exp(A dt) u + chol(Q(dt)) xi with Q(dt) = int_0^dt e^{As} D e^{A^T s} ds,
    /// exact in distribution for any dt. For models whose time scales are too
    /// far apart for Euler-Maruyama within a sane step budget.
    exact_gaussian,
};

struct TrajectoryConfig {
    double dt = 0.0;               ///< time step [s]
    double burn_in = 0.0;          ///< discarded transient [s]
    double sampling_time = 0.0;    ///< averaging window after burn-in [s]; 0 = one sample
    double sample_interval = 0.0;  ///< spacing of samples in the window [s]; 0 = every step
    int trajectories = 1;
    std::uint64_t seed = 0;
    int batches_per_trajectory = 1;  ///< batch-means blocks per trajectory
    Integrator scheme = Integrator::euler_maruyama;
};

/// dt = 0.01 / max|A_ij| and burn-in 10 / |stability margin|.
TrajectoryConfig default_trajectory_config(const LinearizedModel& model, int trajectories,
                                           std::uint64_t seed,
                                           Integrator scheme = Integrator::euler_maruyama);

/// Throws InvalidParameter when `cfg` is unusable for `model`. Euler-Maruyama
/// additionally requires dt < 0.05 / max|A_ij|.
void validate(const TrajectoryConfig& cfg, const LinearizedModel& model);

struct CovarianceEstimate {
    Eigen::Matrix4d covariance;      ///< symmetrized second moments
    Eigen::Matrix4d standard_error;  ///< batch-means standard errors
    double effective_samples = 0.0;  ///< number of independent batches
};

/// Real B with B B^T = D from the eigendecomposition of D. Eigenvalues in
/// [-1e-12 ||D||, 0) are clamped to 0; more negative ones throw InvalidState.
Eigen::Matrix4d noise_factor(const Eigen::Matrix4d& diffusion);

/// Monte Carlo estimate of the stationary covariance of the linearized
/// Langevin equations. For a linear SDE with symmetric diffusion D, the
/// classical second moments equal the symmetrized quantum covariance
/// <u_l u_m + u_m u_l>/2. Trajectory k draws its noise from its own seed
/// derived from (cfg.seed, k), so results do not depend on the thread count.
CovarianceEstimate simulate_cm(const LinearizedModel& model, const TrajectoryConfig& cfg);

struct OdeCovariance {
    Eigen::Matrix4d covariance;
    double horizon = 0.0;  ///< integrated time [s]
    int doublings = 0;
};

/// Integrates dV/dt = A V + V A^T + D from `initial` (default
/// diag(n0+1/2, n0+1/2, 1/2, 1/2)) up to `horizon_margins` / |margin|.
/// One fourth-order Runge-Kutta step of length h yields the propagator and the
/// accumulated diffusion over h; these are then composed by repeated doubling
/// V(2t) = Phi(t) V(t) Phi(t)^T + W(t). Independent of the Kronecker solve.
OdeCovariance integrate_covariance(const LinearizedModel& model,
                                   std::optional<Eigen::Matrix4d> initial = std::nullopt,
                                   double horizon_margins = 60.0);

}  // namespace optomem
