#include "optomem/observables.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optomem {

double phonon_number(const Eigen::Matrix4d& v, std::vector<std::string>* warnings) {
    const double n = 0.5 * (v(0, 0) + v(1, 1) - 1.0);
    if (n < 0.0) {
        if (warnings && n < -1e-9) {
            std::ostringstream os;
            os << "phonon number " << n << " below 0 beyond roundoff; clamped to 0";
            warnings->push_back(os.str());
        }
        return 0.0;
    }
    return n;
}

Negativity log_negativity(const Eigen::Matrix4d& v) {
    Negativity out;
    const Eigen::Matrix2d v1 = v.block<2, 2>(0, 0);
    const Eigen::Matrix2d v2 = v.block<2, 2>(2, 2);
    const Eigen::Matrix2d vc = v.block<2, 2>(0, 2);
    out.det_v1 = v1.determinant();
    out.det_v2 = v2.determinant();
    out.det_vc = vc.determinant();
    out.det_v = v.determinant();
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if (out.det_v < -1e-12 * std::pow(scale, 4)) {
        std::ostringstream os;
        os << "covariance matrix has negative determinant " << out.det_v;
        throw InvalidState(os.str());
    }
    out.det_v = std::max(out.det_v, 0.0);
    out.sigma = out.det_v1 + out.det_v2 - 2.0 * out.det_vc;
    double disc = out.sigma * out.sigma - 4.0 * out.det_v;
    if (disc < 0.0) {
        if (disc < -1e-12 * std::max(1.0, out.sigma * out.sigma)) {
            std::ostringstream os;
            os << "Sigma^2 - 4 det V = " << disc << " < 0; clamped to 0";
            out.warnings.push_back(os.str());
        }
        disc = 0.0;
    }
    // (Sigma - sqrt(disc)) / 2 rewritten as 2 det V / (Sigma + sqrt(disc)); the
    // direct difference cancels badly for strongly entangled states
    const double denom = out.sigma + std::sqrt(disc);
    out.eta_minus = denom > 0.0 ? std::sqrt(2.0 * out.det_v / denom) : 0.0;
    out.raw = -std::log(2.0 * out.eta_minus);
    out.log_negativity = std::max(0.0, out.raw);
    return out;
}

std::array<double, 2> symplectic_spectrum(const Eigen::Matrix4d& v) {
    const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "symplectic_spectrum requires a symmetric matrix (asymmetry " << asym << ")";
        throw InvalidState(os.str());
    }
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> solver(omega * v, false);
    std::array<double, 4> mod{};
    for (int i = 0; i < 4; ++i) mod[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(mod.begin(), mod.end());
    // eigenvalues come in pairs +-i nu
    return {0.5 * (mod[2] + mod[3]), 0.5 * (mod[0] + mod[1])};
}

GaussianStateMetrics evaluate_metrics(const Eigen::Matrix4d& v, double omega_m) {
    GaussianStateMetrics m;
    m.phonons = phonon_number(v, &m.warnings);
    m.negativity = log_negativity(v);
    m.warnings.insert(m.warnings.end(), m.negativity.warnings.begin(), m.negativity.warnings.end());
    m.symplectic = symplectic_spectrum(v);
    m.energy = constants::hbar * omega_m * (m.phonons + 0.5);
    return m;
}

}  // namespace optomem
