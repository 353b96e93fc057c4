#include "optomem/steady_state.hpp"

#include "optomem/constants.hpp"
#include "optomem/errors.hpp"
#include "optomem/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace optomem {

std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::single: return "single";
        case Branch::lower: return "lower";
        case Branch::middle: return "middle";
        case Branch::upper: return "upper";
    }
    return "?";
}

std::string_view to_string(ScanDirection d) { return d == ScanDirection::up ? "up" : "down"; }

double SteadyState::alpha() const { return std::sqrt(photons); }

double transmitted_power(const SystemParams& params, const SteadyState& ss) {
    return constants::hbar * ss.laser_omega * 2.0 * params.cavity.kappa0 * ss.photons;
}

namespace {

/// Value of the reduced scalar equation F(q) = q + omega_c'(q) N(q) / omega_m
/// and its derivative, together with the quantities needed to build a SteadyState.
struct Evaluation {
    double f = 0.0;
    double df = 0.0;
    double photons = 0.0;
    double detuning = 0.0;
    double laser_omega = 0.0;
    ModeFunction mode;
};

class FixedLaserEquation {
public:
    explicit FixedLaserEquation(const SystemParams& p)
        : params_(p),
          e2_(p.drive.amplitude_squared(p.cavity.kappa0)),
          // exact by Sterbenz whenever omega_l is within a factor 2 of omega_b
          laser_offset_(p.cavity.reference_frequency() - p.drive.laser_omega) {}

    Evaluation operator()(double q) const {
        Evaluation e;
        e.mode = mode_frequency(params_.cavity, params_.membrane, q);
        e.laser_omega = params_.drive.laser_omega;
        e.detuning = laser_offset_ + e.mode.shift;
        const double kt = params_.cavity.kappa0 + e.mode.kappa1;
        const double den = kt * kt + e.detuning * e.detuning;
        const double n = e2_ / den;
        const double dn =
            -e2_ * (2.0 * kt * e.mode.d_kappa1 + 2.0 * e.detuning * e.mode.d_omega) / (den * den);
        const double wm = params_.membrane.omega_m;
        e.photons = n;
        e.f = q + e.mode.d_omega * n / wm;
        e.df = 1.0 + (e.mode.d2_omega * n + e.mode.d_omega * dn) / wm;
        return e;
    }

    double drive_bound() const { return e2_; }

private:
    const SystemParams& params_;
    double e2_;
    double laser_offset_;
};

class FixedDetuningEquation {
public:
    FixedDetuningEquation(const SystemParams& p, double detuning)
        : params_(p), detuning_(detuning), omega_b_(p.cavity.reference_frequency()) {}

    Evaluation operator()(double q) const {
        Evaluation e;
        e.mode = mode_frequency(params_.cavity, params_.membrane, q);
        e.detuning = detuning_;
        e.laser_omega = omega_b_ + (e.mode.shift - detuning_);
        const double kappa0 = params_.cavity.kappa0;
        const double e2 = 2.0 * params_.drive.power * kappa0 / (constants::hbar * e.laser_omega);
        const double kt = kappa0 + e.mode.kappa1;
        const double den = kt * kt + detuning_ * detuning_;
        const double n = e2 / den;
        const double dn = -e2 * 2.0 * kt * e.mode.d_kappa1 / (den * den) -
                          n * e.mode.d_omega / e.laser_omega;
        const double wm = params_.membrane.omega_m;
        e.photons = n;
        e.f = q + e.mode.d_omega * n / wm;
        e.df = 1.0 + (e.mode.d2_omega * n + e.mode.d_omega * dn) / wm;
        return e;
    }

    double drive_bound() const {
        const double wl = omega_b_ - std::abs(detuning_) - 0.5 * params_.cavity.free_spectral_range();
        return 2.0 * params_.drive.power * params_.cavity.kappa0 / (constants::hbar * wl);
    }

private:
    const SystemParams& params_;
    double detuning_;
    double omega_b_;
};

struct ScanGrid {
    double bound = 0.0;
    int samples = 0;
};

/// Roots satisfy |q| <= |E|^2 max|omega_c'| / (omega_m kappa0^2); twice that is scanned.
/// Sample spacing resolves both the Lorentzian width in q and the lambda/2 period.
ScanGrid make_grid(const SystemParams& p, double drive_bound, double resolution,
                   const SteadyStateOptions& opt) {
    ScanGrid g;
    const double slope = max_coupling(p.cavity, p.membrane);
    const double kappa0 = p.cavity.kappa0;
    g.bound = 2.0 * drive_bound * slope / (p.membrane.omega_m * kappa0 * kappa0);
    if (!(g.bound > 0.0) || !std::isfinite(g.bound)) {
        g.bound = 0.0;
        g.samples = 1;
        return g;
    }
    const double width = kappa0 / slope;
    const double period = 0.5 * p.cavity.wavelength / p.membrane.x0();
    const double step = std::min(width * resolution, period / 64.0);
    const double wanted = std::ceil(2.0 * g.bound / step) + 1.0;
    g.samples = static_cast<int>(
        std::clamp(wanted, static_cast<double>(opt.min_samples), static_cast<double>(opt.max_samples)));
    return g;
}

double grid_point(const ScanGrid& g, int i) {
    if (g.samples == 1) return 0.0;
    return -g.bound + 2.0 * g.bound * static_cast<double>(i) / (g.samples - 1);
}

std::string sign_table(const ScanGrid& g, const std::vector<double>& f) {
    std::ostringstream os;
    os << "scanned q in [" << -g.bound << ", " << g.bound << "] with " << g.samples
       << " samples; sign changes:";
    int shown = 0;
    for (std::size_t i = 0; i + 1 < f.size() && shown < 16; ++i) {
        const bool bad = !std::isfinite(f[i]);
        if (bad || f[i] * f[i + 1] < 0.0) {
            os << " [" << grid_point(g, static_cast<int>(i)) << ": " << f[i] << " -> " << f[i + 1]
               << "]";
            ++shown;
        }
    }
    return os.str();
}

struct Root {
    double q = 0.0;
    bool degenerate = false;
};

template <class Equation>
double polish(const Equation& eq, double a, double fa, double b, double fb, double tol) {
    double best = a, best_f = std::abs(fa);
    if (std::abs(fb) < best_f) {
        best = b;
        best_f = std::abs(fb);
    }
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 400; ++iter) {
        const Evaluation e = eq(x);
        if (std::abs(e.f) < best_f) {
            best = x;
            best_f = std::abs(e.f);
        }
        if (e.f == 0.0) return x;
        if ((e.f < 0.0) == (fa < 0.0)) {
            a = x;
            fa = e.f;
        } else {
            b = x;
            fb = e.f;
        }
        const double scale = std::max(1.0, std::abs(x));
        if (std::abs(e.f) <= 1e-3 * tol * scale) break;
        if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
        double next = x - e.f / e.df;
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (!(next > lo && next < hi) || std::abs(next - x) > 0.5 * (hi - lo)) next = 0.5 * (a + b);
        if (next == x) break;
        x = next;
    }
    return best;
}

template <class Equation>
std::vector<Root> enumerate_roots(const Equation& eq, const ScanGrid& g,
                                  const SteadyStateOptions& opt) {
    std::vector<Root> roots;
    if (g.samples == 1) {
        roots.push_back({0.0, false});
        return roots;
    }
    std::vector<double> f(g.samples);
    for (int i = 0; i < g.samples; ++i) f[i] = eq(grid_point(g, i)).f;
    for (double v : f) {
        if (!std::isfinite(v)) {
            throw ConvergenceError("steady-state equation is not finite on the scan grid; " +
                                   sign_table(g, f));
        }
    }

    for (int i = 0; i < g.samples; ++i) {
        const double qi = grid_point(g, i);
        if (f[i] == 0.0) {
            roots.push_back({qi, false});
            continue;
        }
        if (i + 1 < g.samples && f[i + 1] != 0.0 && (f[i] < 0.0) != (f[i + 1] < 0.0)) {
            roots.push_back({polish(eq, qi, f[i], grid_point(g, i + 1), f[i + 1], opt.rel_tol), false});
        }
        // A dip toward zero without a sign change may hide a close pair of roots
        // or a tangent (double) root between samples.
        if (i > 0 && i + 1 < g.samples && (f[i - 1] < 0.0) == (f[i] < 0.0) &&
            (f[i] < 0.0) == (f[i + 1] < 0.0) && std::abs(f[i]) < std::abs(f[i - 1]) &&
            std::abs(f[i]) < std::abs(f[i + 1])) {
            // golden-section search for the extremum of |F| on [q_{i-1}, q_{i+1}]
            const double sgn = f[i] < 0.0 ? -1.0 : 1.0;
            double a = grid_point(g, i - 1), b = grid_point(g, i + 1);
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = sgn * eq(c).f, fd = sgn * eq(d).f;
            for (int k = 0; k < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, std::abs(a)); ++k) {
                if (fc < fd) {
                    b = d; d = c; fd = fc;
                    c = b - gr * (b - a);
                    fc = sgn * eq(c).f;
                } else {
                    a = c; c = d; fc = fd;
                    d = a + gr * (b - a);
                    fd = sgn * eq(d).f;
                }
            }
            const double qm = 0.5 * (a + b);
            const double fm = eq(qm).f;
            const double scale = std::max(1.0, std::abs(qm));
            if ((fm < 0.0) != (f[i] < 0.0) && fm != 0.0) {
                roots.push_back({polish(eq, grid_point(g, i - 1), f[i - 1], qm, fm, opt.rel_tol), true});
                roots.push_back({polish(eq, qm, fm, grid_point(g, i + 1), f[i + 1], opt.rel_tol), true});
            } else if (std::abs(fm) <= opt.rel_tol * scale) {
                roots.push_back({qm, true});
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.q < y.q; });
    return roots;
}

template <class Equation>
std::vector<SteadyState> assemble(const SystemParams& params, const Equation& eq,
                                  const std::vector<Root>& roots, const SteadyStateOptions& opt) {
    std::vector<SteadyState> out;
    out.reserve(roots.size());
    for (const Root& r : roots) {
        const Evaluation e = eq(r.q);
        SteadyState ss;
        ss.q = r.q;
        ss.photons = e.photons;
        ss.laser_omega = e.laser_omega;
        ss.detuning = e.detuning;
        ss.mode = e.mode;
        ss.kappa_total = params.cavity.kappa0 + e.mode.kappa1;
        ss.near_degenerate = r.degenerate || std::abs(e.df) < 1e-6;
        ss.residual_position = std::abs(e.f);
        ss.residual_photons = 0.0;  // photons are defined by the Lorentzian itself
        out.push_back(ss);
    }
    std::sort(out.begin(), out.end(),
              [](const SteadyState& a, const SteadyState& b) { return a.photons < b.photons; });
    if (out.size() == 1) {
        out.front().branch = Branch::single;
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].branch = i == 0 ? Branch::lower
                            : i + 1 == out.size() ? Branch::upper
                                                  : Branch::middle;
        }
    }
    if (opt.classify_stability) {
        for (SteadyState& ss : out) {
            const StabilityReport rep = is_stable(linearize(params, ss));
            ss.stable = rep.stable;
            ss.stability_margin = rep.margin;
        }
    }
    return out;
}

}  // namespace

std::vector<SteadyState> find_steady_states(const SystemParams& params,
                                            const SteadyStateOptions& options) {
    params.validate();
    const FixedLaserEquation eq(params);
    const ScanGrid grid = make_grid(params, eq.drive_bound(), 1.0 / 8.0, options);
    return assemble(params, eq, enumerate_roots(eq, grid, options), options);
}

std::vector<SteadyState> find_steady_states_at_detuning(const SystemParams& params,
                                                        double detuning,
                                                        const SteadyStateOptions& options) {
    params.validate();
    if (!std::isfinite(detuning)) throw InvalidParameter("detuning must be finite");
    const FixedDetuningEquation eq(params, detuning);
    const ScanGrid grid = make_grid(params, eq.drive_bound(), 1.0 / 8.0, options);
    return assemble(params, eq, enumerate_roots(eq, grid, options), options);
}

const SteadyState* follow_branch(const std::vector<SteadyState>& solutions,
                                 std::optional<double> previous_photons) {
    const SteadyState* best = nullptr;
    for (const SteadyState& ss : solutions) {
        if (!ss.stable) continue;
        if (!best) {
            best = &ss;
            if (!previous_photons) break;  // sorted by photons: first stable is the lowest
            continue;
        }
        if (std::abs(ss.photons - *previous_photons) < std::abs(best->photons - *previous_photons)) {
            best = &ss;
        }
    }
    return best;
}

std::vector<double> scan_grid(double omega_lo, double omega_hi, int steps) {
    if (steps < 2) throw InvalidParameter("scan needs at least 2 steps");
    if (!(omega_hi > omega_lo)) throw InvalidParameter("scan range must satisfy lo < hi");
    std::vector<double> grid(steps);
    const double span = omega_hi - omega_lo;
    for (int i = 0; i < steps; ++i) {
        grid[i] = omega_lo + span * static_cast<double>(i) / (steps - 1);
    }
    return grid;
}

ScanTrace scan_hysteresis(const SystemParams& params, double omega_lo, double omega_hi,
                          ScanDirection direction, int steps, const SteadyStateOptions& options) {
    const std::vector<double> grid = scan_grid(omega_lo, omega_hi, steps);
    ScanTrace trace;
    trace.direction = direction;
    trace.points.reserve(grid.size());
    SystemParams p = params;
    std::optional<double> previous;
    for (int k = 0; k < steps; ++k) {
        const int i = direction == ScanDirection::up ? k : steps - 1 - k;
        p.drive.laser_omega = grid[i];
        const std::vector<SteadyState> sols = find_steady_states(p, options);
        const SteadyState* pick = follow_branch(sols, previous);
        if (!pick) {
            std::ostringstream os;
            os << "no stable steady state at scan step " << k << " (omega_l = " << grid[i]
               << " rad/s, " << sols.size() << " unstable solutions)";
            throw NoStableSolution(k, grid[i], os.str());
        }
        previous = pick->photons;
        ScanPoint pt;
        pt.step = k;
        pt.laser_omega = grid[i];
        pt.photons = pick->photons;
        pt.q = pick->q;
        pt.detuning = pick->detuning;
        pt.transmitted = transmitted_power(p, *pick);
        pt.branch = pick->branch;
        pt.solution_count = static_cast<int>(sols.size());
        trace.points.push_back(pt);
    }
    return trace;
}

namespace {

/// The solution set in the (q, omega_l) plane. For each q, the position equation
/// fixes |alpha|^2 = -q omega_m / omega_c'(q) and the Lorentzian then gives two
/// laser offsets omega_c(q) - omega_b +- sqrt(|E|^2/|alpha|^2 - kappa_T^2).
struct SolutionCurve {
    std::vector<double> plus, minus;  // laser offsets omega_l - omega_b
    std::vector<char> valid;
    std::vector<char> join;           // curve turns from + to - at this sample
};

SolutionCurve trace_solution_curve(const SystemParams& p) {
    SteadyStateOptions opt;
    opt.min_samples = 16384;
    const double e2 = p.drive.amplitude_squared(p.cavity.kappa0);
    const ScanGrid g = make_grid(p, e2, 1.0 / 256.0, opt);
    SolutionCurve c;
    c.plus.assign(g.samples, 0.0);
    c.minus.assign(g.samples, 0.0);
    c.valid.assign(g.samples, 0);
    c.join.assign(g.samples, 0);
    std::vector<char> over(g.samples, 0);  // radicand negative: beyond the Lorentzian peak
    const double wm = p.membrane.omega_m;
    for (int i = 0; i < g.samples; ++i) {
        const double q = grid_point(g, i);
        const ModeFunction m = mode_frequency(p.cavity, p.membrane, q);
        if (m.d_omega == 0.0) continue;
        const double photons = -q * wm / m.d_omega;
        if (!(photons > 0.0)) continue;
        const double kt = p.cavity.kappa0 + m.kappa1;
        const double rad = e2 / photons - kt * kt;
        if (rad < 0.0) {
            over[i] = 1;
            continue;
        }
        const double root = std::sqrt(rad);
        c.plus[i] = m.shift + root;
        c.minus[i] = m.shift - root;
        c.valid[i] = 1;
    }
    for (int i = 0; i < g.samples; ++i) {
        if (!c.valid[i]) continue;
        if ((i > 0 && over[i - 1]) || (i + 1 < g.samples && over[i + 1])) c.join[i] = 1;
    }
    return c;
}

int crossings(const SolutionCurve& c, double w) {
    int count = 0;
    const std::size_t n = c.valid.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!c.valid[i] || !c.valid[i + 1]) continue;
        if ((c.plus[i] - w) * (c.plus[i + 1] - w) < 0.0) ++count;
        if ((c.minus[i] - w) * (c.minus[i + 1] - w) < 0.0) ++count;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (c.join[i] && (c.plus[i] - w) * (c.minus[i] - w) < 0.0) ++count;
    }
    return count;
}

}  // namespace

std::vector<MultistableWindow> multistable_windows(const SystemParams& params, double omega_lo,
                                                   double omega_hi) {
    params.validate();
    if (!(omega_hi > omega_lo)) throw InvalidParameter("frequency range must satisfy lo < hi");
    const double omega_b = params.cavity.reference_frequency();
    const double lo = omega_lo - omega_b, hi = omega_hi - omega_b;
    const SolutionCurve c = trace_solution_curve(params);

    std::vector<double> critical{lo, hi};
    const std::size_t n = c.valid.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!c.valid[i - 1] || !c.valid[i] || !c.valid[i + 1]) continue;
        for (const auto* branch : {&c.plus, &c.minus}) {
            const auto& w = *branch;
            const bool peak = w[i] >= w[i - 1] && w[i] > w[i + 1];
            const bool dip = w[i] <= w[i - 1] && w[i] < w[i + 1];
            if ((peak || dip) && w[i] > lo && w[i] < hi) critical.push_back(w[i]);
        }
    }
    std::sort(critical.begin(), critical.end());
    critical.erase(std::unique(critical.begin(), critical.end()), critical.end());

    std::vector<MultistableWindow> windows;
    for (std::size_t j = 0; j + 1 < critical.size(); ++j) {
        const double mid = 0.5 * (critical[j] + critical[j + 1]);
        const int count = crossings(c, mid);
        if (count < 3) continue;
        if (!windows.empty() && windows.back().omega_hi == omega_b + critical[j]) {
            windows.back().omega_hi = omega_b + critical[j + 1];
            windows.back().solution_count = std::max(windows.back().solution_count, count);
        } else {
            windows.push_back({omega_b + critical[j], omega_b + critical[j + 1], count});
        }
    }
    return windows;
}

int max_solution_count(const SystemParams& params, double omega_lo, double omega_hi) {
    int best = 1;
    for (const auto& w : multistable_windows(params, omega_lo, omega_hi)) {
        best = std::max(best, w.solution_count);
    }
    return best;
}

ThresholdResult bistability_threshold(const SystemParams& params, double omega_lo,
                                      double omega_hi, const ThresholdOptions& options) {
    if (!(options.power_min > 0.0) || !(options.power_max > options.power_min)) {
        throw InvalidParameter("threshold power range must satisfy 0 < min < max");
    }
    SystemParams p = params;
    auto bistable = [&](double power) {
        p.drive.power = power;
        return !multistable_windows(p, omega_lo, omega_hi).empty();
    };
    ThresholdResult res;
    std::ostringstream os;
    if (bistable(options.power_min)) {
        os << "already bistable at the lowest probed power " << options.power_min << " W";
        res.message = os.str();
        return res;
    }
    // The window drifts with power, so it can leave a finite frequency range again
    // at high drive. Step up geometrically and bisect on the first bistable step.
    constexpr double ratio = 1.5;
    double lo = options.power_min, hi = 0.0;
    for (double pw = options.power_min * ratio;; pw *= ratio) {
        pw = std::min(pw, options.power_max);
        if (bistable(pw)) {
            hi = pw;
            break;
        }
        lo = pw;
        if (pw >= options.power_max) break;
    }
    if (hi == 0.0) {
        os << "no bistability for P <= " << options.power_max << " W in the probed frequency range";
        res.message = os.str();
        return res;
    }
    while (hi / lo - 1.0 > options.rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (bistable(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    res.found = true;
    res.power = hi;
    os << "threshold bracketed in [" << lo << ", " << hi << "] W";
    res.message = os.str();
    return res;
}

}  // namespace optomem
