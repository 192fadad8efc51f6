#include <doctest.h>

#include <cmath>
#include <numbers>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"

using namespace optomech;

TEST_CASE("ideal-cavity ratio g2/g1 at omega = Omega") {
    // pi^2/12 + 1/16 in long double.
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double expected = pi * pi / 12.0L + 1.0L / 16.0L;
    const auto r = derive_rates(1.0, 1.0, 1.0, 0.5, 1.0);
    CHECK(std::abs(r.g2 / r.g1 - 0.884967) < 1e-6);
    CHECK(std::abs(static_cast<long double>(r.g2 / r.g1) - expected) < 1e-15L);
}

TEST_CASE("vanishing mechanical/optical ratio gives g2 = 0") {
    CHECK(quadratic_rate_ratio(1.0, 0.0) == 0.0);
}

TEST_CASE("beta plus/minus") {
    const auto [bp, bm] = beta_pm(1.0, 1.0);
    CHECK(bp == 2.0);
    CHECK(bm == 0.0);
    CHECK_THROWS_AS(beta_pm(1.0, 0.0), RatioUndefinedError);
    for (double g1 : {0.1, 1.0, 7.3}) {
        for (double g2 : {0.01, 0.5, 3.0}) {
            const auto [p, m] = beta_pm(g1, g2);
            CHECK(std::abs((p - m) - 2.0) < 1e-12);
        }
    }
    const auto r = derive_rates(1.0, 2.0, 1.0, 0.1, 1.0);
    REQUIRE(r.beta_plus.has_value());
    CHECK(std::abs(*r.beta_plus - *r.beta_minus - 2.0) < 1e-12);
}

TEST_CASE("derive_rates ladder and homogeneity") {
    const double g0 = 0.37, w = 3.0, W = 1.1, x = 0.02, l = 1.5;
    const auto r = derive_rates(g0, w, W, x, l);
    CHECK(r.g1 == doctest::Approx(x / l * g0).epsilon(1e-15));
    CHECK(r.g3 == doctest::Approx(x / l * r.g1).epsilon(1e-15));
    CHECK(std::abs(r.g4 / r.g3 - r.g2 / r.g1 / (3.0 * std::sqrt(2.0))) < 1e-15);
    const auto r2 = derive_rates(2.0 * g0, w, W, x, l);
    CHECK(r2.g1 == 2.0 * r.g1);
    CHECK(r2.g2 == 2.0 * r.g2);
    const auto r3 = derive_rates(3.0 * g0, w, W, x, l);
    CHECK(r3.g1 == doctest::Approx(3.0 * r.g1).epsilon(1e-15));
    CHECK(r3.g2 == doctest::Approx(3.0 * r.g2).epsilon(1e-15));
}

TEST_CASE("derive_rates rejects bad input") {
    CHECK_THROWS_AS(derive_rates(0.0, 1.0, 1.0, 0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(derive_rates(1.0, -1.0, 1.0, 0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(derive_rates(1.0, 1.0, 1.0, 2.0, 1.0), ValidationError);
}

TEST_CASE("shifted frequencies") {
    SystemParams p;
    p.omega = 100.0;
    p.Omega = 1.0;
    auto [w0, W0] = shifted_frequencies(p);
    CHECK(w0 == 100.0);
    CHECK(W0 == 1.0);
    p.g1 = 0.01;
    p.g2 = 0.002;
    auto [w, W] = shifted_frequencies(p);
    CHECK(w == doctest::Approx(100.006).epsilon(1e-14));
    CHECK(W == doctest::Approx(0.996).epsilon(1e-14));
    p.g2 = 0.5;
    CHECK_THROWS_AS(shifted_frequencies(p), UnphysicalShiftError);
}

TEST_CASE("parameter validation") {
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.Gamma = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.g2 = -0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.m_th = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.x_zp = 2.0;
    bad.cavity_length = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("detuning reference") {
    SystemParams p;
    p.omega = 10.0;
    p.g1 = 0.3;
    p.g2 = 0.1;
    p.detuning = 0.5;
    p.detuning_reference = DetuningReference::bare;
    CHECK(p.detuning_from_bare() == 0.5);
    CHECK(p.detuning_from_shifted() == doctest::Approx(0.5 - 0.1));
    p.detuning_reference = DetuningReference::shifted;
    CHECK(p.detuning_from_shifted() == 0.5);
    CHECK(p.detuning_from_bare() == doctest::Approx(0.6));
    CHECK(p.drive_frequency() == doctest::Approx(10.0 + 0.1 + 0.5));
}
