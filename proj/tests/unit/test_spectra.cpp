#include <doctest.h>

#include <cmath>
#include <random>

#include "optomech/errors.hpp"
#include "optomech/langevin.hpp"
#include "optomech/spectra.hpp"

using namespace optomech;

namespace {

const cplx I(0.0, 1.0);

FirstOrderCoefficients red_detuned(double m_noise = 1.0) {
    FirstOrderCoefficients c;
    c.Omega = 1.0;
    c.delta = -1.0;
    c.g = 0.01;
    c.kappa = 0.1;
    c.Gamma = 1e-4;
    c.m_noise = m_noise;
    return c;
}

// S = I - sqrt(gamma) X with (iw - M) X = sqrt(gamma), solved column by column.
Eigen::MatrixXcd scattering_by_columns(const LinearLangevinSystem& s, double w) {
    const int n = s.dim();
    const Eigen::MatrixXcd sg = s.sqrt_gamma();
    const Eigen::MatrixXcd A = I * w * Eigen::MatrixXcd::Identity(n, n) - s.M;
    const auto qr = A.colPivHouseholderQr();
    Eigen::MatrixXcd X(n, n);
    for (int j = 0; j < n; ++j) X.col(j) = qr.solve(sg.col(j));
    return Eigen::MatrixXcd::Identity(n, n) - sg * X;
}

double lorentz(double w, double c, double h) { return 1.0 / (1.0 + (w - c) * (w - c) / (h * h)); }

}  // namespace

TEST_CASE("scattering matrix") {
    auto c = red_detuned();
    c.g = 0.0;
    c.delta = 0.0;
    const auto s0 = build_first_order(c);
    for (double w : {-3.0, -0.2, 0.0, 0.05, 1.0, 7.0}) {
        CHECK(std::abs(std::abs(scattering_matrix(s0, w)(0, 0)) - 1.0) < 1e-13);
    }
    const auto s = build_first_order(red_detuned());
    const Eigen::MatrixXcd far = scattering_matrix(s, 1e9);
    CHECK((far - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
    for (double w : {1.0, -1.0, 0.3}) {
        CHECK((scattering_matrix(s, w) - scattering_by_columns(s, w)).cwiseAbs().maxCoeff() < 1e-12);
    }
    // Triangular input coupling used as is.
    SystemParams p;
    p.g0 = 0.02;
    p.alpha = 0.5;
    p.detuning = -1.0;
    const auto s2 = build_system("second_order", p);
    CHECK((scattering_matrix(s2, 0.9) - scattering_by_columns(s2, 0.9)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("singular resolvent is reported") {
    auto c = red_detuned();
    c.kappa = 0.0;
    c.g = 0.0;
    c.delta = 0.5;
    const auto s = build_first_order(c);
    CHECK_THROWS_AS(scattering_matrix(s, 0.5), SingularResolventError);
}

TEST_CASE("output spectral density") {
    auto c = red_detuned(0.0);
    c.g = 0.0;
    const auto s = build_first_order(c);
    std::vector<double> grid;
    for (int i = 1; i <= 200; ++i) grid.push_back(0.02 * i);
    for (double v : output_psd(s, grid).S_AA) CHECK(std::abs(v - 1.0) < 1e-12);

    // Red sideband peak height increases with the phonon occupation.
    double prev = -1.0;
    for (double m : {0.0, 1.0, 10.0}) {
        const auto sys = build_first_order(red_detuned(m));
        const auto grid2 = sideband_grid(sys, 1.0, 2000, 501);
        const auto r = output_psd(sys, grid2, NoiseOrdering::symmetrized);
        double peak = 0.0;
        for (std::size_t i = 0; i < grid2.size(); ++i)
            if (grid2[i] < -0.5 && grid2[i] > -1.5) peak = std::max(peak, r.S_AA[i]);
        CHECK(peak > prev);
        prev = peak;
    }

    // S_AA - 1 is integrable on a wide grid of positive detunings (the vacuum floor there is 1).
    const auto sys = build_first_order(red_detuned(1.0));
    std::vector<double> wide;
    for (int i = 1; i <= 40000; ++i) wide.push_back(40.0 * i / 40000.0);
    const auto r = output_psd(sys, wide);
    double integral = 0.0;
    for (std::size_t i = 1; i < wide.size(); ++i)
        integral += 0.5 * (wide[i] - wide[i - 1]) * ((r.S_AA[i] - 1.0) + (r.S_AA[i - 1] - 1.0));
    CHECK(std::isfinite(integral));
    CHECK(std::abs(r.S_AA.back() - 1.0) < 1e-3);
}

TEST_CASE("Fourier conjugation identity") {
    const auto s = build_first_order(red_detuned());
    for (double w : {0.3, 1.0, 2.5}) {
        const Eigen::MatrixXcd sp = scattering_matrix(s, w);
        const Eigen::MatrixXcd sm = scattering_matrix(s, -w);
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(sp(0, j) - std::conj(sm(1, s.channel_partner[j]))) < 1e-12);
        }
    }
}

TEST_CASE("vacuum output is non-negative for random stable systems") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    std::vector<double> grid;
    for (int i = 0; i < 10000; ++i) grid.push_back(-3.0 + 6.0 * i / 9999.0);
    while (checked < 100) {
        FirstOrderCoefficients c;
        c.Omega = 1.0;
        c.delta = 4.0 * u(rng) - 2.0;
        c.f = 0.1 * u(rng);
        c.g = 0.05 * u(rng);
        c.kappa = 0.01 + 0.5 * u(rng);
        c.Gamma = 1e-3 + 0.01 * u(rng);
        c.m_noise = 0.0;
        const auto s = build_first_order(c);
        if (!stability(s).stable) continue;
        ++checked;
        const auto r = output_psd(s, grid);
        CHECK(*std::min_element(r.S_AA.begin(), r.S_AA.end()) >= 0.0);
    }
}

TEST_CASE("stability") {
    auto c = red_detuned();
    c.g = 0.0;
    c.f = 0.2;
    const auto st = stability(build_first_order(c));
    CHECK(st.stable);
    CHECK(std::abs(nearest_mode(st, c.delta + c.f) - cplx(-0.05, c.delta + c.f)) < 1e-14);
    CHECK(std::abs(nearest_mode(st, 1.0) - cplx(-0.5e-4, 1.0)) < 1e-14);

    auto blue = red_detuned();
    blue.delta = 1.0;
    blue.g = 0.05;
    CHECK_FALSE(stability(build_first_order(blue)).stable);

    SystemParams p;
    p.kappa = 0.05;
    p.Gamma = 0.01;
    p.g0 = 0.1;
    p.alpha = 0.2;
    const auto sm = stability(build_minimal_fourth(p));
    CHECK(std::abs(nearest_mode(sm, 0.0) - cplx(-0.1, 0.0)) < 1e-14);
    CHECK(std::abs(nearest_mode(sm, -1.0) - cplx(-0.03, -1.0)) < 1e-14);
}

TEST_CASE("sideband analysis") {
    const double W = 1.0;
    std::vector<double> w, S;
    for (int i = 0; i <= 40001; ++i) {
        const double x = -2.0 + 4.0 * i / 40001.0;
        w.push_back(x);
        S.push_back(1e-3 + lorentz(x, -W, 0.01) + 0.5 * lorentz(x, W, 0.01));
    }
    const auto r = sideband_analysis(w, S, W);
    CHECK(std::abs(r.delta_Omega) < 1e-9);
    CHECK(std::abs(r.delta_r) < 1e-6);
    CHECK(r.red.width == doctest::Approx(0.02).epsilon(0.02));
    // Red is the w = +Ω feature, reported at probe detuning −Ω.
    CHECK(r.red.height == doctest::Approx(0.5 * lorentz(W, W, 0.01)).epsilon(0.01));
    CHECK(r.red.center == doctest::Approx(-W));

    // Both peaks moved by +3e-4 in w are moved by −3e-4 in probe detuning.
    std::vector<double> S2;
    for (double x : w) S2.push_back(1e-3 + lorentz(x, -W + 3e-4, 0.01) + lorentz(x, W + 3e-4, 0.01));
    const auto r2 = sideband_analysis(w, S2, W);
    CHECK(r2.delta_Omega == doctest::Approx(-3e-4).epsilon(1e-2));

    CHECK_THROWS_AS(sideband_analysis(w, S, W, 3.0), NotSidebandResolvedError);
    // Monotone window: maximum on the edge.
    std::vector<double> ramp;
    for (double x : w) ramp.push_back(std::exp(x));
    CHECK_THROWS_AS(sideband_analysis(w, ramp, W), NotSidebandResolvedError);
}

TEST_CASE("second-order modes carry the sideband inequivalence") {
    SystemParams p;
    p.Omega = 1.0;
    p.kappa = 0.05;
    p.Gamma = 1e-3;
    p.g0 = 1e-3;
    const double n = 100.0;
    const double K = pull_coefficient(p, CubicConvention::mean_field);
    p.alpha = std::sqrt(n * (K * n * K * n + 0.25 * p.kappa * p.kappa));
    const auto st = stability(build_system("second_order", p));
    const cplx up = nearest_mode(st, p.Omega);
    const cplx down = nearest_mode(st, -p.Omega);
    // Probe-axis mean offset of the two mechanical modes.
    const double shift = -0.5 * (up.imag() + down.imag());
    CHECK(shift == doctest::Approx(p.g0 * p.g0 * n / p.Omega).epsilon(0.05));
}

TEST_CASE("sideband analysis of a model spectrum") {
    SystemParams p;
    p.Omega = 1.0;
    p.kappa = 0.1;
    p.Gamma = 1e-3;
    p.g0 = 1e-3;
    p.detuning = -1.0;
    p.alpha = 0.5;
    const auto sys = build_system("first_order", p);
    auto psd = output_psd(sys, sideband_grid(sys, p.Omega));
    const auto r = sideband_analysis(psd, p.Omega, p.kappa);
    CHECK(std::isfinite(r.delta_Omega));
    CHECK(psd.delta_Omega == r.delta_Omega);
    CHECK(psd.peaks.size() == 2);
}

TEST_CASE("inequivalence estimate") {
    SystemParams p;
    p.Omega = 1.0;
    p.kappa = 0.05;
    CHECK(estimate_inequivalence(p, 100.0).delta_Omega == 0.0);
    p.g0 = 1e-3;
    const auto e = estimate_inequivalence(p, 100.0);
    CHECK(e.normalized == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(e.warnings.empty());
    p.kappa = 0.5;
    CHECK_FALSE(estimate_inequivalence(p, 100.0).warnings.empty());
}
