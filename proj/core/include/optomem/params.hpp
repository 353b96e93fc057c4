#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace optomem {

/// Two-mirror Fabry-Perot cavity. All angular frequencies are in rad/s.
struct CavityParams {
    double length = 0.0;      ///< mirror separation L [m]
    double waist = 0.0;       ///< beam waist [m], informational only
    double wavelength = 0.0;  ///< drive wavelength [m]
    double kappa0 = 0.0;      ///< empty-cavity amplitude decay rate [rad/s]
    /// Longitudinal mode index p. When unset the mode nearest the drive,
    /// round(2L/lambda), is used.
    std::optional<int> mode_index;
    /// Reference frequency omega_b [rad/s]. Defaults to p*pi*c/L.
    std::optional<double> omega_b;

    double k0() const;
    int resolved_mode_index() const;
    double reference_frequency() const;
    double free_spectral_range() const;  ///< pi*c/L [rad/s]
    void validate() const;
};

/// kappa0 = pi c / (2 L F); the intensity Lorentzian then has FWHM 2*kappa0.
double kappa0_from_finesse(double length, double finesse);
double finesse_from_kappa0(double length, double kappa0);

struct MembraneParams {
    double thickness = 0.0;                  ///< L_d [m]
    std::complex<double> index{1.0, 0.0};    ///< n_M = n_R + i n_I
    double z0 = 0.0;                         ///< center-of-mass position from cavity center [m]
    double mass = 0.0;                       ///< effective mass [kg]
    double omega_m = 0.0;                    ///< mechanical angular frequency [rad/s]
    double quality = 0.0;                    ///< Q_m

    double gamma_m() const { return omega_m / quality; }
    /// Zero-point length sqrt(hbar / (m omega_m)) [m]. Always derived.
    double x0() const;
    void validate() const;
    std::vector<std::string> warnings() const;
};

struct DriveParams {
    double power = 0.0;        ///< input power P [W]
    double laser_omega = 0.0;  ///< omega_l [rad/s]

    /// |E|^2 = 2 P kappa0 / (hbar omega_l) [s^-2].
    double amplitude_squared(double kappa0) const;
    double amplitude(double kappa0) const;
};

struct SystemParams {
    CavityParams cavity;
    MembraneParams membrane;
    DriveParams drive;
    double temperature = 0.0;  ///< bath temperature T0 [K]

    /// Mean thermal occupancy n0 of the mechanical bath.
    double thermal_occupancy() const;
    void validate() const;
};

/// Bose occupancy 1/(exp(hbar omega / k_B T) - 1); 0 at T = 0.
double bose_occupancy(double omega, double temperature);

}  // namespace optomem
