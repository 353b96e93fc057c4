#pragma once

#include "optomem/params.hpp"
#include "optomem/steady_state.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace optomem {

/// Scalars that fully determine the drift and diffusion matrices.
/// State ordering everywhere is (dq, dp, dX, dY).
struct ModelScalars {
    double omega_m = 0.0;       ///< [rad/s]
    double gamma_m = 0.0;       ///< [rad/s]
    double n0 = 0.0;            ///< bath occupancy
    double spring = 0.0;        ///< d2 omega_c/dq2 * |alpha_s|^2 [rad/s]
    double coupling = 0.0;      ///< G [rad/s]
    double absorption_coupling = 0.0;  ///< d kappa1/dq * alpha_s [rad/s]
    double kappa0 = 0.0;        ///< [rad/s]
    double kappa1 = 0.0;        ///< [rad/s]
    double detuning = 0.0;      ///< Delta = omega_c(q_s) - omega_l [rad/s]

    double kappa_total() const { return kappa0 + kappa1; }
};

struct LinearizedModel {
    Eigen::Matrix4d drift;
    Eigen::Matrix4d diffusion;
    ModelScalars scalars;
    std::vector<std::string> warnings;

    double coupling() const { return scalars.coupling; }
    double effective_omega_m() const { return scalars.omega_m + scalars.spring; }
    double kappa_total() const { return scalars.kappa_total(); }
};

/// Below this absorption rate the heating term (dk1/dq)^2 |a|^2 / (2 k1) is taken as 0.
inline constexpr double kappa1_floor = 1e-30;

LinearizedModel build_model(const ModelScalars& scalars);

/// Linearize the Langevin equations around `ss`, with alpha_s real and positive.
LinearizedModel linearize(const SystemParams& params, const SteadyState& ss);

/// G = -sqrt(2) * d omega_c/dq * alpha_s.
double optomechanical_coupling(double d_omega, double alpha);

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;  ///< largest real part of the drift eigenvalues [rad/s]
};

/// Stable iff every eigenvalue of the drift matrix has a strictly negative real
/// part. Margins within 1e-12 * ||A|| of zero count as marginal, i.e. unstable.
StabilityReport is_stable(const Eigen::Matrix4d& drift);
StabilityReport is_stable(const LinearizedModel& model);

struct CovarianceResult {
    Eigen::Matrix4d covariance;
    double residual = 0.0;        ///< ||AV + VA^T + D||_F / ||D||_F
    double margin = 0.0;          ///< stability margin of A [rad/s]
    double condition = 0.0;       ///< estimated condition number of the vectorized system
    std::vector<std::string> warnings;
};

/// Solve A V + V A^T = -D for the stationary covariance.
/// Throws InstabilityError when the model is not stable.
CovarianceResult solve_lyapunov(const LinearizedModel& model);

/// Frobenius residual ||A V + V A^T + D||_F / ||D||_F, accumulated in extended precision.
double lyapunov_residual(const Eigen::Matrix4d& drift, const Eigen::Matrix4d& diffusion,
                         const Eigen::Matrix4d& covariance);

}  // namespace optomem
