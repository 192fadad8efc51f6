#include "optomech/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be positive and finite (got " +
                              std::to_string(v) + ")");
    }
}

void require_non_negative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be non-negative and finite (got " +
                              std::to_string(v) + ")");
    }
}

}  // namespace

void SystemParams::validate() const {
    require_positive(omega, "omega");
    require_positive(Omega, "Omega");
    require_positive(kappa, "kappa");
    require_positive(Gamma, "Gamma");
    require_non_negative(g0, "g0");
    require_non_negative(g1, "g1");
    require_non_negative(g2, "g2");
    require_non_negative(g3, "g3");
    require_non_negative(g4, "g4");
    require_non_negative(m_th, "m_th");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw ValidationError("alpha must be finite");
    }
    if (!std::isfinite(detuning)) {
        throw ValidationError("detuning must be finite");
    }
    if (x_zp.has_value() != cavity_length.has_value()) {
        throw ValidationError("x_zp and cavity_length must be given together");
    }
    if (x_zp) {
        require_positive(*x_zp, "x_zp");
        require_positive(*cavity_length, "cavity_length");
        if (!(*x_zp < *cavity_length)) {
            throw ValidationError("x_zp must be smaller than cavity_length");
        }
    }
}

double SystemParams::detuning_from_bare() const {
    return detuning_reference == DetuningReference::bare ? detuning : detuning + g1 - 2.0 * g2;
}

double SystemParams::detuning_from_shifted() const {
    return detuning_reference == DetuningReference::shifted ? detuning : detuning - (g1 - 2.0 * g2);
}

double SystemParams::drive_frequency() const { return omega + detuning_from_bare(); }

double quadratic_rate_ratio(double omega, double Omega) {
    constexpr double pi = std::numbers::pi;
    const double r = Omega / omega;
    return 0.25 * (pi * pi / 3.0 + 0.25) * r * r;
}

std::pair<double, double> beta_pm(double g1, double g2) {
    if (g2 == 0.0) {
        throw RatioUndefinedError("beta_pm: g1/g2 undefined for g2 = 0");
    }
    const double r = g1 / g2;
    return {r + 1.0, r - 1.0};
}

RateSet derive_rates(double g0, double omega, double Omega, double x_zp, double cavity_length) {
    require_positive(g0, "g0");
    require_positive(omega, "omega");
    require_positive(Omega, "Omega");
    require_positive(x_zp, "x_zp");
    require_positive(cavity_length, "cavity_length");
    if (!(x_zp < cavity_length)) {
        throw ValidationError("derive_rates: x_zp must be smaller than cavity_length");
    }
    const double s = x_zp / cavity_length;
    RateSet r;
    r.g1 = s * g0;
    r.g2 = quadratic_rate_ratio(omega, Omega) * r.g1;
    r.g3 = s * r.g1;
    r.g4 = r.g3 * (r.g2 / r.g1) / (3.0 * std::numbers::sqrt2);
    if (r.g2 > 0.0) {
        auto [bp, bm] = beta_pm(r.g1, r.g2);
        r.beta_plus = bp;
        r.beta_minus = bm;
    }
    return r;
}

std::pair<double, double> shifted_frequencies(const SystemParams& p) {
    const double w = p.omega + p.g1 - 2.0 * p.g2;
    const double W = p.Omega - 2.0 * p.g2;
    if (!(W > 0.0)) {
        throw UnphysicalShiftError("shifted mechanical frequency Omega - 2 g2 = " + std::to_string(W) +
                                   " is not positive");
    }
    return {w, W};
}

}  // namespace optomech
