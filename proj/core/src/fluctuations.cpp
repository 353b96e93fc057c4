#include "optomem/fluctuations.hpp"

#include "optomem/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace optomem {

double optomechanical_coupling(double d_omega, double alpha) {
    return -std::sqrt(2.0) * d_omega * alpha;
}

LinearizedModel build_model(const ModelScalars& s) {
    const double kt = s.kappa_total();
    const double root2 = std::sqrt(2.0);

    LinearizedModel m;
    m.scalars = s;
    m.drift << 0.0, s.omega_m, 0.0, 0.0,
               -s.omega_m - s.spring, -s.gamma_m, s.coupling, 0.0,
               -root2 * s.absorption_coupling, 0.0, -kt, s.detuning,
               s.coupling, 0.0, -s.detuning, -kt;

    // absorption heating; d kappa1/dq vanishes with kappa1, so the ratio has a finite limit
    const double heating = s.kappa1 < kappa1_floor
                               ? 0.0
                               : s.absorption_coupling * s.absorption_coupling / (2.0 * s.kappa1);
    const double cross = s.absorption_coupling / root2;
    m.diffusion.setZero();
    m.diffusion(1, 1) = s.gamma_m * (2.0 * s.n0 + 1.0) + heating;
    m.diffusion(2, 2) = kt;
    m.diffusion(3, 3) = kt;
    m.diffusion(1, 3) = cross;
    m.diffusion(3, 1) = cross;
    return m;
}

LinearizedModel linearize(const SystemParams& params, const SteadyState& ss) {
    if (ss.photons < 0.0 || !std::isfinite(ss.photons)) {
        throw InvalidParameter("steady state photon number must be finite and >= 0");
    }
    ModelScalars s;
    s.omega_m = params.membrane.omega_m;
    s.gamma_m = params.membrane.gamma_m();
    s.n0 = params.thermal_occupancy();
    const double alpha = ss.alpha();
    s.spring = ss.mode.d2_omega * ss.photons;
    s.coupling = optomechanical_coupling(ss.mode.d_omega, alpha);
    s.absorption_coupling = ss.mode.d_kappa1 * alpha;
    s.kappa0 = params.cavity.kappa0;
    s.kappa1 = ss.mode.kappa1;
    s.detuning = ss.detuning;

    LinearizedModel m = build_model(s);
    m.warnings = params.membrane.warnings();
    if (alpha < 10.0) {
        std::ostringstream os;
        os << "|alpha_s| = " << alpha << " < 10: linearization is not well justified";
        m.warnings.push_back(os.str());
    }
    return m;
}

StabilityReport is_stable(const Eigen::Matrix4d& drift) {
    if (!drift.allFinite()) throw Error("drift matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::Matrix4d> solver(drift, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("eigenvalue computation for the drift matrix failed");
    StabilityReport rep;
    rep.margin = solver.eigenvalues().real().maxCoeff();
    const double scale = drift.cwiseAbs().maxCoeff();
    rep.stable = rep.margin < -1e-12 * scale;
    return rep;
}

StabilityReport is_stable(const LinearizedModel& model) { return is_stable(model.drift); }

double lyapunov_residual(const Eigen::Matrix4d& drift, const Eigen::Matrix4d& diffusion,
                         const Eigen::Matrix4d& covariance) {
    using Mat = Eigen::Matrix<long double, 4, 4>;
    const Mat a = drift.cast<long double>();
    const Mat v = covariance.cast<long double>();
    const Mat d = diffusion.cast<long double>();
    const Mat r = a * v + v * a.transpose() + d;
    const long double dn = d.norm();
    return static_cast<double>(dn > 0 ? r.norm() / dn : r.norm());
}

namespace {

using Vec16 = Eigen::Matrix<double, 16, 1>;
using Mat16 = Eigen::Matrix<double, 16, 16>;

/// Column-major vectorization: vec(A V + V A^T) = (I (x) A + A (x) I) vec(V).
Mat16 lyapunov_operator(const Eigen::Matrix4d& a) {
    Mat16 m = Mat16::Zero();
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 4; ++k) {
                m(i + 4 * j, k + 4 * j) += a(i, k);
                m(i + 4 * j, i + 4 * k) += a(j, k);
            }
        }
    }
    return m;
}

Vec16 vec(const Eigen::Matrix4d& m) { return Eigen::Map<const Vec16>(m.data()); }

Eigen::Matrix4d unvec(const Vec16& v) { return Eigen::Map<const Eigen::Matrix4d>(v.data()); }

}  // namespace

CovarianceResult solve_lyapunov(const LinearizedModel& model) {
    const StabilityReport rep = is_stable(model);
    if (!rep.stable) {
        std::ostringstream os;
        os << "drift matrix is not stable (max Re eigenvalue = " << rep.margin << " rad/s)";
        throw InstabilityError(rep.margin, os.str());
    }

    // Rates span ~1 to ~1e8 rad/s; work in units of omega_m.
    double unit = model.scalars.omega_m;
    if (!(unit > 0.0)) unit = model.drift.cwiseAbs().maxCoeff();
    const Eigen::Matrix4d a = model.drift / unit;
    const Eigen::Matrix4d d = model.diffusion / unit;

    const Mat16 op = lyapunov_operator(a);
    const Eigen::PartialPivLU<Mat16> lu(op);
    Vec16 x = lu.solve(-vec(d));

    // iterative refinement with the residual accumulated in extended precision
    using MatL = Eigen::Matrix<long double, 4, 4>;
    const MatL al = a.cast<long double>();
    const MatL dl = d.cast<long double>();
    for (int pass = 0; pass < 3; ++pass) {
        const MatL v = unvec(x).cast<long double>();
        const Eigen::Matrix4d r = (al * v + v * al.transpose() + dl).cast<double>();
        x += lu.solve(-vec(r));
    }

    CovarianceResult out;
    Eigen::Matrix4d v = unvec(x);
    out.covariance = 0.5 * (v + v.transpose());
    out.margin = rep.margin;
    const double rcond = lu.rcond();
    out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (out.condition > 1e12) {
        std::ostringstream os;
        os << "Lyapunov system is ill-conditioned (condition estimate " << out.condition << ")";
        out.warnings.push_back(os.str());
    }
    out.residual = lyapunov_residual(model.drift, model.diffusion, out.covariance);
    return out;
}

}  // namespace optomem
