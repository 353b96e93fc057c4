#include "optomem/constants.hpp"
#include "optomem/errors.hpp"
#include "optomem/fluctuations.hpp"
#include "optomem/observables.hpp"
#include "optomem/steady_state.hpp"

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace optomem;
using optomem::testing::Gen;

namespace {

using Mat4 = Eigen::Matrix4d;

Mat4 diag(double a, double b, double c, double d) { return Eigen::Vector4d(a, b, c, d).asDiagonal(); }

Mat4 rotation(double mech, double opt) {
    Mat4 s = Mat4::Zero();
    s.block<2, 2>(0, 0) << std::cos(mech), std::sin(mech), -std::sin(mech), std::cos(mech);
    s.block<2, 2>(2, 2) << std::cos(opt), std::sin(opt), -std::sin(opt), std::cos(opt);
    return s;
}

Mat4 squeeze(double mech, double opt) {
    return diag(std::exp(mech), std::exp(-mech), std::exp(opt), std::exp(-opt));
}

Mat4 beam_splitter(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat4 b;
    b << c, 0, s, 0,
         0, c, 0, s,
        -s, 0, c, 0,
         0, -s, 0, c;
    return b;
}

Mat4 two_mode_squeezer(double r) {
    const double c = std::cosh(r), s = std::sinh(r);
    Mat4 t;
    t << c, 0, s, 0,
         0, c, 0, -s,
         s, 0, c, 0,
         0, -s, 0, c;
    return t;
}

/// Two-mode squeezed vacuum with squeezing r.
Mat4 tmsv(double r) {
    const Mat4 t = two_mode_squeezer(r);
    return t * (0.5 * Mat4::Identity()) * t.transpose();
}

Mat4 random_symplectic(Gen& gen, int layers = 3) {
    Mat4 s = Mat4::Identity();
    for (int k = 0; k < layers; ++k) {
        s = rotation(gen.uniform(0, 6.3), gen.uniform(0, 6.3)) * s;
        s = squeeze(gen.uniform(-1, 1), gen.uniform(-1, 1)) * s;
        s = beam_splitter(gen.uniform(0, 6.3)) * s;
        s = two_mode_squeezer(gen.uniform(-0.8, 0.8)) * s;
    }
    return s;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("phonon number of thermal and vacuum states") {
    for (double n0 : {0.0, 0.3, 17.0, 6.2e5}) {
        CHECK(phonon_number(diag(n0 + 0.5, n0 + 0.5, 0.5, 0.5)) == doctest::Approx(n0).epsilon(1e-15));
    }
    CHECK(phonon_number(0.5 * Mat4::Identity()) == 0.0);
}

TEST_CASE("phonon number is clamped at zero, with a warning beyond roundoff") {
    std::vector<std::string> w;
    CHECK(phonon_number(diag(0.5 - 1e-12, 0.5, 0.5, 0.5), &w) == 0.0);
    CHECK(w.empty());
    CHECK(phonon_number(diag(0.5 - 1e-6, 0.5, 0.5, 0.5), &w) == 0.0);
    CHECK(w.size() == 1);
}

TEST_CASE("two-mode squeezed vacuum: eta = exp(-2r)/2 and E_N = 2r") {
    for (double r : {0.0, 0.1, 0.5, 1.0, 2.0}) {
        const Negativity n = log_negativity(tmsv(r));
        CHECK(n.eta_minus == doctest::Approx(0.5 * std::exp(-2 * r)).epsilon(1e-10));
        CHECK(n.log_negativity == doctest::Approx(2 * r).epsilon(1e-10));
    }
    CHECK(log_negativity(tmsv(1.0)).log_negativity == doctest::Approx(2.0).epsilon(1e-12));
    // direct block form
    const double r = 0.7;
    Mat4 v = Mat4::Zero();
    v.block<2, 2>(0, 0) = 0.5 * std::cosh(2 * r) * Eigen::Matrix2d::Identity();
    v.block<2, 2>(2, 2) = 0.5 * std::cosh(2 * r) * Eigen::Matrix2d::Identity();
    v.block<2, 2>(0, 2) = 0.5 * std::sinh(2 * r) * Eigen::Vector2d(1, -1).asDiagonal();
    v.block<2, 2>(2, 0) = v.block<2, 2>(0, 2);
    CHECK(log_negativity(v).log_negativity == doctest::Approx(2 * r).epsilon(1e-12));
}

TEST_CASE("product states are not entangled") {
    Gen gen(31);
    for (int t = 0; t < 200; ++t) {
        const double n1 = gen.log_uniform(1e-6, 1e4);
        const double n2 = gen.log_uniform(1e-6, 1e2);
        Mat4 v = diag(n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5);
        const Mat4 s = rotation(gen.uniform(0, 6.3), gen.uniform(0, 6.3)) *
                       squeeze(gen.uniform(-1, 1), gen.uniform(-1, 1));
        v = s * v * s.transpose();
        const Negativity n = log_negativity(v);
        CHECK(n.log_negativity == 0.0);
        CHECK(n.eta_minus >= 0.5 - 1e-9);
        CHECK(n.raw <= 1e-9);
    }
}

TEST_CASE("symplectic spectrum of simple states") {
    auto s = symplectic_spectrum(0.5 * Mat4::Identity());
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-14));
    s = symplectic_spectrum(diag(3.5, 3.5, 0.5, 0.5));
    CHECK(s[0] == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("symplectic spectrum is recovered from S diag(nu) S^T") {
    Gen gen(32);
    for (int t = 0; t < 300; ++t) {
        const double a = 0.5 + gen.log_uniform(1e-6, 1e3);
        const double b = 0.5 + gen.log_uniform(1e-6, 1e3);
        const Mat4 s = random_symplectic(gen);
        Mat4 v = s * diag(a, a, b, b) * s.transpose();
        v = 0.5 * (v + v.transpose());
        const auto nu = symplectic_spectrum(v);
        CHECK(nu[0] == doctest::Approx(std::max(a, b)).epsilon(1e-10));
        CHECK(nu[1] == doctest::Approx(std::min(a, b)).epsilon(1e-10));
    }
}

TEST_CASE("non-symmetric input and negative determinant are rejected") {
    Mat4 v = 0.5 * Mat4::Identity();
    v(0, 1) = 0.1;
    CHECK_THROWS_AS((void)symplectic_spectrum(v), InvalidState);
    CHECK_THROWS_AS((void)log_negativity(diag(1.0, 1.0, 1.0, -1.0)), InvalidState);
}

// det V is formed from entries of size |V|, so its absolute error is ~eps |V|^4.
// One layer of squeezing keeps |V| small enough for 1e-10 agreement.
TEST_CASE("local rotations leave the entanglement invariants unchanged") {
    Gen gen(33);
    for (int t = 0; t < 200; ++t) {
        const double a = 0.5 + gen.log_uniform(1e-4, 10.0);
        const double b = 0.5 + gen.log_uniform(1e-4, 10.0);
        const Mat4 s = random_symplectic(gen, 1);
        const Mat4 v = s * diag(a, a, b, b) * s.transpose();
        const Mat4 r = rotation(gen.uniform(0, 6.3), gen.uniform(0, 6.3));
        const Mat4 w = r * v * r.transpose();
        const Negativity nv = log_negativity(v);
        const Negativity nw = log_negativity(w);
        const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
        CHECK(std::abs(nv.eta_minus - nw.eta_minus) <= 1e-10 * scale);
        CHECK(std::abs(nv.sigma - nw.sigma) <= 1e-10 * scale * scale);
        CHECK(std::abs(nv.det_v - nw.det_v) <= 1e-10 * std::pow(scale, 4));
        CHECK(std::abs(nv.log_negativity - nw.log_negativity) <= 1e-10 * scale);
    }
}

TEST_CASE("E_N is continuous away from the kink") {
    Gen gen(34);
    int tested = 0;
    while (tested < 200) {
        const Mat4 s = random_symplectic(gen);
        const double a = 0.5 + gen.log_uniform(1e-4, 1.0);
        const Mat4 v = s * diag(a, a, 0.5, 0.5) * s.transpose();
        const Negativity base = log_negativity(v);
        if (std::abs(base.raw) < 1e-3 || v.cwiseAbs().maxCoeff() > 20.0) continue;
        ++tested;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                Mat4 w = v;
                w(i, j) += 1e-8;
                if (i != j) w(j, i) += 1e-8;
                CHECK(std::abs(log_negativity(w).log_negativity - base.log_negativity) <= 1e-6);
            }
        }
    }
}

TEST_CASE("energy and metric bundle") {
    const double wm = constants::two_pi * 10e6;
    const GaussianStateMetrics m = evaluate_metrics(tmsv(0.4), wm);
    CHECK(m.phonons == doctest::Approx(0.5 * (std::cosh(0.8) - 1.0)).epsilon(1e-13));
    CHECK(m.energy == doctest::Approx(constants::hbar * wm * (m.phonons + 0.5)).epsilon(1e-15));
    CHECK(m.negativity.log_negativity == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(m.symplectic[1] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("red-detuned drive cools below the bath and E_N falls with n0") {
    SystemParams p = testing::short_cavity();
    double previous = INFINITY;
    for (double temperature : {0.01, 0.1, 1.0, 10.0, 100.0, 300.0}) {
        p.temperature = temperature;
        const auto sols = find_steady_states_at_detuning(p, p.membrane.omega_m);
        REQUIRE(sols.size() == 1);
        REQUIRE(sols[0].stable);
        const LinearizedModel model = linearize(p, sols[0]);
        const GaussianStateMetrics m = evaluate_metrics(solve_lyapunov(model).covariance, p.membrane.omega_m);
        CHECK(m.phonons < p.thermal_occupancy());
        CHECK(m.negativity.log_negativity <= previous);
        previous = m.negativity.log_negativity;
    }
}

}  // TEST_SUITE
