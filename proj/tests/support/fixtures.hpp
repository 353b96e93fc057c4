#pragma once

#include "optomem/constants.hpp"
#include "optomem/params.hpp"

namespace optomem::testing {

/// 9 cm cavity, F = 8000, 30 mW, coupling ~6 Hz at the maximum-slope point.
inline SystemParams long_cavity() {
    SystemParams p;
    p.cavity.length = 0.09;
    p.cavity.wavelength = 1064e-9;
    p.cavity.kappa0 = kappa0_from_finesse(0.09, 8000);
    p.membrane.thickness = 500e-9;
    p.membrane.index = {2.0, 1e-6};
    p.membrane.z0 = 1064e-9 / 8;
    p.membrane.mass = 6.50171e-14;
    p.membrane.omega_m = constants::two_pi * 20e6;
    p.membrane.quality = 1e4;
    p.drive.power = 30e-3;
    p.drive.laser_omega = p.cavity.reference_frequency();
    p.temperature = 300.0;
    return p;
}

/// 0.74 mm cavity, F = 3e4, 9 ng membrane at 10 MHz with Q = 4e6, 28.5 mW, 1 K.
inline SystemParams short_cavity() {
    SystemParams p;
    p.cavity.length = 0.74e-3;
    p.cavity.wavelength = 1064e-9;
    p.cavity.kappa0 = kappa0_from_finesse(0.74e-3, 3e4);
    p.membrane.thickness = 50e-9;
    p.membrane.index = {2.0, 1e-6};
    p.membrane.z0 = 1064e-9 / 8;
    p.membrane.mass = 9e-12;
    p.membrane.omega_m = constants::two_pi * 10e6;
    p.membrane.quality = 4e6;
    p.drive.power = 28.5e-3;
    p.drive.laser_omega = p.cavity.reference_frequency();
    p.temperature = 1.0;
    return p;
}

/// Laser frequency `kappas` linewidths above the bare resonance.
inline double offset(const SystemParams& p, double kappas) {
    return p.cavity.reference_frequency() + kappas * p.cavity.kappa0;
}

}  // namespace optomem::testing
