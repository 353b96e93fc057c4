#pragma once

#include "optomem/params.hpp"

namespace optomem {

/// Membrane-dependent cavity mode evaluated at one membrane coordinate q.
///
/// The complex frequency is
///
///   omega_b + (c/L) asin[ (-1)^p cos(2 k0 z) (n^2 - 1)
///                         / sqrt(4 n^2 cot^2(n k0 L_d) + (n^2 + 1)^2) ]
///
/// with z = z0 + x0 q and complex n. The real part is the mode frequency.
/// The absorption rate is the imaginary part measured from its value at a
/// field node, so kappa1 >= 0 and vanishes where the membrane sits at a node.
/// Every derivative is taken with respect to q (chain rule d/dq = x0 d/dz).
struct ModeFunction {
    double omega_c = 0.0;   ///< absolute mode frequency [rad/s]
    double shift = 0.0;     ///< omega_c - omega_b [rad/s]
    double kappa1 = 0.0;    ///< membrane absorption rate [rad/s], >= 0
    double d_omega = 0.0;   ///< d omega_c / dq [rad/s]
    double d_kappa1 = 0.0;  ///< d kappa1 / dq [rad/s]
    double d2_omega = 0.0;  ///< d^2 omega_c / dq^2 [rad/s]
};

ModeFunction mode_frequency(const CavityParams& cavity, const MembraneParams& membrane, double q);

/// Same as mode_frequency, addressed by physical position z [m] instead of q.
ModeFunction mode_at_position(const CavityParams& cavity, const MembraneParams& membrane, double z);

/// Complex slab factor (n^2 - 1) / sqrt(4 n^2 cot^2(n k0 L_d) + (n^2 + 1)^2).
/// Its modulus is the amplitude reflectivity of the membrane for real n.
std::complex<double> membrane_reflection_factor(const CavityParams& cavity,
                                                const MembraneParams& membrane);

/// d omega_c / dq / 2 pi [Hz]; the linear optomechanical coupling scale.
double coupling_scale_hz(const CavityParams& cavity, const MembraneParams& membrane, double q);

/// Largest |d omega_c / dq| over one lambda/2 period [rad/s].
double max_coupling(const CavityParams& cavity, const MembraneParams& membrane);

}  // namespace optomem
