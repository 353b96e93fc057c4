#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace optomem {

// Covariance matrices use the vacuum-variance-1/2 convention and the state
// ordering (dq, dp, dX, dY): V1 is the mechanical block, V2 the optical block
// and Vc the mechanical-optical correlation block.

/// Effective mean phonon number n = (V11 + V22 - 1) / 2. Values in
/// [-1e-9, 0) are clamped to 0 with a warning appended to `warnings`.
double phonon_number(const Eigen::Matrix4d& v, std::vector<std::string>* warnings = nullptr);

struct Negativity {
    double log_negativity = 0.0;  ///< E_N = max(0, -ln 2 eta^-)
    double raw = 0.0;             ///< -ln 2 eta^- before clamping at 0
    double eta_minus = 0.0;       ///< smallest partial-transpose symplectic eigenvalue
    double sigma = 0.0;           ///< det V1 + det V2 - 2 det Vc
    double det_v = 0.0;
    double det_v1 = 0.0;
    double det_v2 = 0.0;
    double det_vc = 0.0;
    std::vector<std::string> warnings;
};

/// Logarithmic negativity of a two-mode Gaussian state.
/// Throws InvalidState if det V is negative beyond roundoff.
Negativity log_negativity(const Eigen::Matrix4d& v);

/// Symplectic eigenvalues {nu_max, nu_min}: moduli of the eigenvalues of i Omega V.
/// Throws InvalidState for a non-symmetric input.
std::array<double, 2> symplectic_spectrum(const Eigen::Matrix4d& v);

struct GaussianStateMetrics {
    double phonons = 0.0;
    Negativity negativity;
    std::array<double, 2> symplectic{};
    double energy = 0.0;  ///< hbar omega_m (n + 1/2) [J]
    std::vector<std::string> warnings;
};

GaussianStateMetrics evaluate_metrics(const Eigen::Matrix4d& v, double omega_m);

}  // namespace optomem
