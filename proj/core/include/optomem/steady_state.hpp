#pragma once

#include "optomem/cavity_mode.hpp"
#include "optomem/params.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optomem {

enum class Branch { single, lower, middle, upper };
std::string_view to_string(Branch b);

/// One classical operating point.
struct SteadyState {
    double q = 0.0;            ///< dimensionless membrane displacement q_s
    double photons = 0.0;      ///< |alpha_s|^2
    double laser_omega = 0.0;  ///< omega_l at which this point was solved [rad/s]
    double detuning = 0.0;     ///< Delta = omega_c(q_s) - omega_l [rad/s]
    double kappa_total = 0.0;  ///< kappa0 + kappa1(q_s) [rad/s]
    ModeFunction mode;         ///< mode function at q_s
    Branch branch = Branch::single;
    bool stable = false;
    double stability_margin = 0.0;
    /// |dF/dq| at the root is tiny: a fold (double root) is close by.
    bool near_degenerate = false;
    double residual_position = 0.0;  ///< |q_s + d omega_c/dq |alpha|^2 / omega_m|
    double residual_photons = 0.0;   ///< |alpha|^2 - |E|^2 / (kappa_T^2 + Delta^2)

    double alpha() const;
};

struct SteadyStateOptions {
    int min_samples = 2048;        ///< minimum sign-change scan density
    int max_samples = 1 << 22;
    double rel_tol = 1e-12;
    bool classify_stability = true;
};

/// Every real solution of the coupled steady-state equations at the drive in
/// `params`, sorted by photon number. The position equation uses the real
/// (dispersive) slope of omega_c; absorption enters only through kappa_T.
std::vector<SteadyState> find_steady_states(const SystemParams& params,
                                            const SteadyStateOptions& options = {});

/// Solutions for a prescribed effective detuning Delta = omega_c(q_s) - omega_l.
/// The laser frequency of each solution follows from Delta; `params.drive.laser_omega`
/// is ignored.
std::vector<SteadyState> find_steady_states_at_detuning(const SystemParams& params,
                                                        double detuning,
                                                        const SteadyStateOptions& options = {});

/// Transmitted power hbar omega_l 2 kappa0 |alpha_s|^2 [W].
double transmitted_power(const SystemParams& params, const SteadyState& ss);

enum class ScanDirection { up, down };
std::string_view to_string(ScanDirection d);

struct ScanPoint {
    int step = 0;
    double laser_omega = 0.0;
    double photons = 0.0;
    double q = 0.0;
    double detuning = 0.0;
    double transmitted = 0.0;  ///< [W]
    Branch branch = Branch::single;
    int solution_count = 0;
};

struct ScanTrace {
    ScanDirection direction = ScanDirection::up;
    std::vector<ScanPoint> points;
};

/// Grid of `steps` laser frequencies covering [omega_lo, omega_hi]. Both
/// directions use the same grid so traces can be compared point by point.
std::vector<double> scan_grid(double omega_lo, double omega_hi, int steps);

/// Adiabatic laser-frequency scan that follows the stable branch whose photon
/// number is closest to the previous step. Throws NoStableSolution when a step
/// has no stable solution.
ScanTrace scan_hysteresis(const SystemParams& params, double omega_lo, double omega_hi,
                          ScanDirection direction, int steps,
                          const SteadyStateOptions& options = {});

/// Pick the stable solution closest in photon number to `previous`, or the
/// lowest-photon stable one when `previous` is empty. Returns nullptr if none.
const SteadyState* follow_branch(const std::vector<SteadyState>& solutions,
                                 std::optional<double> previous_photons);

/// Laser-frequency windows [lo, hi] with three or more coexisting solutions,
/// found from the folds of the solution curve omega_l(q_s).
struct MultistableWindow {
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    int solution_count = 0;
};
std::vector<MultistableWindow> multistable_windows(const SystemParams& params, double omega_lo,
                                                   double omega_hi);

/// Largest number of coexisting solutions for any laser frequency in [omega_lo, omega_hi].
int max_solution_count(const SystemParams& params, double omega_lo, double omega_hi);

struct ThresholdOptions {
    double power_min = 1e-9;  ///< [W]
    double power_max = 10.0;  ///< [W]
    double rel_tol = 1e-3;
};

struct ThresholdResult {
    bool found = false;
    double power = 0.0;  ///< smallest bistable power [W], valid when found
    std::string message;
};

/// Smallest input power at which some laser frequency in the range admits
/// three solutions. `found` is false when no threshold lies in the probed range.
ThresholdResult bistability_threshold(const SystemParams& params, double omega_lo,
                                      double omega_hi, const ThresholdOptions& options = {});

}  // namespace optomem
