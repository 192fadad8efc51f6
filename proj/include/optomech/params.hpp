#pragma once

#include <complex>
#include <optional>
#include <utility>

namespace optomech {

using cplx = std::complex<double>;

/// Which optical frequency the drive detuning is measured against.
/// `bare` means Δ = ω̃ − ω; `shifted` means Δ = ω̃ − (ω + g1 − 2 g2).
enum class DetuningReference { bare, shifted };

/// Physical parameters of a driven optomechanical cavity. All rates and
/// frequencies are angular [rad/s] with ħ = 1, so energies are rates.
struct SystemParams {
    double omega = 1.0;   // optical resonance
    double Omega = 1.0;   // mechanical resonance
    double kappa = 0.1;   // optical decay
    double Gamma = 1e-3;  // mechanical decay

    double g0 = 0.0;  // single-photon (cubic) rate
    double g1 = 0.0;  // standard quadratic rate
    double g2 = 0.0;  // non-standard (momentum) quadratic rate
    double g3 = 0.0;  // standard quartic rate
    double g4 = 0.0;  // non-standard quartic rate

    cplx alpha{0.0, 0.0};    // drive amplitude
    double detuning = 0.0;   // Δ = ω̃ − ω (see detuning_reference)
    DetuningReference detuning_reference = DetuningReference::bare;

    double m_th = 0.0;  // thermal phonon occupation

    // Optional geometry for the ideal-cavity rate ladder; unset means "not given".
    std::optional<double> x_zp;
    std::optional<double> cavity_length;

    /// Throws ValidationError on the first violated invariant.
    void validate() const;

    /// Drive frequency ω̃ in absolute terms.
    double drive_frequency() const;

    /// Detuning of the drive from the shifted optical frequency ω + g1 − 2 g2.
    double detuning_from_shifted() const;

    /// Detuning of the drive from the bare optical frequency ω.
    double detuning_from_bare() const;
};

/// Interaction-rate ladder of an ideal one-dimensional cavity.
struct RateSet {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double g4 = 0.0;
    // β± = g1/g2 ± 1; absent when g2 = 0.
    std::optional<double> beta_plus;
    std::optional<double> beta_minus;
};

/// (1/4)(π²/3 + 1/4)(Ω/ω)², the ratio g2/g1 of an ideal cavity.
double quadratic_rate_ratio(double omega, double Omega);

/// Ideal-cavity ladder from the single-photon rate and geometry.
/// g1 = (x_zp/l) g0, g2 = ratio(Ω/ω) g1, g3 = (x_zp/l) g1,
/// g4 = g3 (g2/g1) / (3√2).
RateSet derive_rates(double g0, double omega, double Omega, double x_zp, double cavity_length);

/// β± = g1/g2 ± 1. Throws RatioUndefinedError when g2 is zero.
std::pair<double, double> beta_pm(double g1, double g2);

/// Frequencies renormalised by the quadratic interactions:
/// ω_eff = ω + g1 − 2 g2, Ω_eff = Ω − 2 g2. Throws UnphysicalShiftError if Ω_eff ≤ 0.
std::pair<double, double> shifted_frequencies(const SystemParams& p);

}  // namespace optomech
