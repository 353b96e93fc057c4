#include "optomem/cavity_mode.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace optomem {

namespace {

using cplx = std::complex<double>;

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

void check_finite(cplx v, const char* term) {
    if (!finite(v)) {
        throw SingularConfiguration(
            term, std::string("non-finite value in mode frequency term '") + term + "'");
    }
}

bool membrane_absent(const MembraneParams& m) {
    return m.thickness == 0.0 || m.index == cplx(1.0, 0.0);
}

}  // namespace

cplx membrane_reflection_factor(const CavityParams& cavity, const MembraneParams& membrane) {
    if (membrane_absent(membrane)) return {0.0, 0.0};
    const cplx n = membrane.index;
    const cplx n2 = n * n;
    const cplx phase = n * cavity.k0() * membrane.thickness;
    const cplx sin_phase = std::sin(phase);
    if (sin_phase == cplx(0.0, 0.0)) {
        throw SingularConfiguration("cot(n_M k0 L_d)",
                                    "cot(n_M k0 L_d) is singular: sin(n_M k0 L_d) = 0");
    }
    const cplx cot = std::cos(phase) / sin_phase;
    check_finite(cot, "cot(n_M k0 L_d)");
    const cplx numerator = n2 - 1.0;
    check_finite(numerator, "n_M^2 - 1");
    const cplx denominator = std::sqrt(4.0 * n2 * cot * cot + (n2 + 1.0) * (n2 + 1.0));
    check_finite(denominator, "sqrt(4 n_M^2 cot^2 + (n_M^2 + 1)^2)");
    const cplx f = numerator / denominator;
    check_finite(f, "reflection factor");
    return f;
}

ModeFunction mode_at_position(const CavityParams& cavity, const MembraneParams& membrane,
                              double z) {
    ModeFunction out;
    const double omega_b = cavity.reference_frequency();
    out.omega_c = omega_b;
    if (membrane_absent(membrane)) return out;

    const cplx f = membrane_reflection_factor(cavity, membrane);
    const double k0 = cavity.k0();
    const double sign = (cavity.resolved_mode_index() % 2 == 0) ? 1.0 : -1.0;
    const double scale = constants::speed_of_light / cavity.length;
    const double x0 = membrane.x0();

    const double arg = 2.0 * k0 * z;
    const cplx s = sign * std::cos(arg) * f;
    const cplx ds = -2.0 * k0 * sign * std::sin(arg) * f;  // ds/dz
    const cplx d2s = -4.0 * k0 * k0 * s;                     // d2s/dz2

    const cplx asin_s = std::asin(s);
    const cplx root = std::sqrt(1.0 - s * s);
    const cplx d_asin = ds / root;
    const cplx d2_asin = d2s / root + s * ds * ds / (root * root * root);
    check_finite(asin_s, "asin");
    check_finite(d_asin, "d asin / dz");
    check_finite(d2_asin, "d2 asin / dz2");

    // Im asin(t f) is odd and monotone in t on [-1, 1], so this offset is the
    // largest value reachable over z and kappa1 is zero at its minimum.
    const double offset = std::abs(std::asin(f).imag());

    out.shift = scale * asin_s.real();
    out.omega_c = omega_b + out.shift;
    out.kappa1 = std::max(0.0, scale * (offset - asin_s.imag()));
    out.d_omega = x0 * scale * d_asin.real();
    out.d_kappa1 = -x0 * scale * d_asin.imag();
    out.d2_omega = x0 * x0 * scale * d2_asin.real();
    return out;
}

ModeFunction mode_frequency(const CavityParams& cavity, const MembraneParams& membrane, double q) {
    return mode_at_position(cavity, membrane, membrane.z0 + membrane.x0() * q);
}

double coupling_scale_hz(const CavityParams& cavity, const MembraneParams& membrane, double q) {
    return mode_frequency(cavity, membrane, q).d_omega / constants::two_pi;
}

double max_coupling(const CavityParams& cavity, const MembraneParams& membrane) {
    if (membrane_absent(membrane)) return 0.0;
    constexpr int samples = 512;
    const double period = 0.5 * cavity.wavelength;
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double z = period * i / samples;
        best = std::max(best, std::abs(mode_at_position(cavity, membrane, z).d_omega));
    }
    // Sampling can undershoot the true maximum slightly.
    return best * (1.0 + 1e-3);
}

}  // namespace optomem
