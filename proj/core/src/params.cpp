#include "optomem/params.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"

#include <cmath>
#include <sstream>

namespace optomem {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double CavityParams::k0() const { return constants::two_pi / wavelength; }

int CavityParams::resolved_mode_index() const {
    if (mode_index) return *mode_index;
    return static_cast<int>(std::lround(2.0 * length / wavelength));
}

double CavityParams::free_spectral_range() const {
    return constants::pi * constants::speed_of_light / length;
}

double CavityParams::reference_frequency() const {
    if (omega_b) return *omega_b;
    return resolved_mode_index() * free_spectral_range();
}

void CavityParams::validate() const {
    require(finite_positive(length), "cavity length must be > 0");
    require(finite_positive(wavelength), "wavelength must be > 0");
    require(finite_positive(kappa0), "kappa0 must be > 0");
    require(std::isfinite(waist) && waist >= 0.0, "waist must be >= 0");
    if (omega_b) require(finite_positive(*omega_b), "omega_b must be > 0");
    if (mode_index) require(*mode_index >= 0, "mode index must be >= 0");
}

double kappa0_from_finesse(double length, double finesse) {
    require(finite_positive(length), "cavity length must be > 0");
    require(std::isfinite(finesse) && finesse > 1.0, "finesse must be > 1");
    return constants::pi * constants::speed_of_light / (2.0 * length * finesse);
}

double finesse_from_kappa0(double length, double kappa0) {
    return constants::pi * constants::speed_of_light / (2.0 * length * kappa0);
}

double MembraneParams::x0() const { return std::sqrt(constants::hbar / (mass * omega_m)); }

void MembraneParams::validate() const {
    require(std::isfinite(thickness) && thickness >= 0.0, "membrane thickness must be >= 0");
    require(std::isfinite(index.real()) && index.real() >= 1.0, "n_R must be >= 1");
    require(std::isfinite(index.imag()) && index.imag() >= 0.0, "n_I must be >= 0");
    require(std::isfinite(z0), "z0 must be finite");
    require(finite_positive(mass), "membrane mass must be > 0");
    require(finite_positive(omega_m), "omega_m must be > 0");
    require(finite_positive(quality), "Q_m must be > 0");
}

std::vector<std::string> MembraneParams::warnings() const {
    std::vector<std::string> out;
    if (quality < 100.0) {
        std::ostringstream os;
        os << "Q_m = " << quality << " < 100: Markovian Brownian-noise model is questionable";
        out.push_back(os.str());
    }
    return out;
}

double DriveParams::amplitude_squared(double kappa0) const {
    return 2.0 * power * kappa0 / (constants::hbar * laser_omega);
}

double DriveParams::amplitude(double kappa0) const { return std::sqrt(amplitude_squared(kappa0)); }

double bose_occupancy(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(constants::hbar * omega / (constants::boltzmann * temperature));
}

double SystemParams::thermal_occupancy() const {
    return bose_occupancy(membrane.omega_m, temperature);
}

void SystemParams::validate() const {
    cavity.validate();
    membrane.validate();
    require(std::isfinite(drive.power) && drive.power >= 0.0, "input power must be >= 0");
    require(finite_positive(drive.laser_omega), "laser frequency must be > 0");
    require(std::isfinite(temperature) && temperature >= 0.0, "temperature must be >= 0");
}

}  // namespace optomem
