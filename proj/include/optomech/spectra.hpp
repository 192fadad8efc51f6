#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "optomech/langevin.hpp"

namespace optomech {

/// Noise occupations used for the output spectrum. `quantum` takes the
/// w > 0 / w < 0 vectors; `symmetrized` uses their mean at every w, which is
/// what a classical simulation with effective occupations reproduces.
enum class NoiseOrdering { quantum, symmetrized };

struct Peak {
    double center = 0.0;
    double height = 0.0;
    double width = 0.0;  // full width at half height above the window minimum
};

struct SpectrumResult {
    std::vector<double> w_grid;
    std::vector<double> S_AA;
    std::vector<Peak> peaks;
    double delta_r = 0.0;
    double delta_b = 0.0;
    double delta_Omega = 0.0;
};

/// S(w) = I − √γ (iw I − M)⁻¹ √γ, by explicit inversion.
/// Throws SingularResolventError when iw is within `rel_tol` of an eigenvalue of M.
Eigen::MatrixXcd scattering_matrix(const LinearLangevinSystem& sys, double w, double rel_tol = 1e-12);

/// Output spectral density of the first basis element:
/// S_AA(w) = Σ_k |(S(w) T)_{0k}|² S_k,in(w).
SpectrumResult output_psd(const LinearLangevinSystem& sys, const std::vector<double>& w_grid,
                          NoiseOrdering ordering = NoiseOrdering::quantum);

struct StabilityReport {
    Eigen::VectorXcd eigenvalues;
    double max_real = 0.0;
    bool stable = false;
};

StabilityReport stability(const LinearLangevinSystem& sys);

/// Eigenvalue of M whose oscillation frequency Im λ is nearest `target`.
std::complex<double> nearest_mode(const StabilityReport& st, double target);

/// Grid of `coarse` points on [lo, hi] merged with dense windows of
/// `dense` points and width `window` centred on each entry of `centers`.
std::vector<double> piecewise_grid(double lo, double hi, int coarse, const std::vector<double>& centers,
                                   double window, int dense);

/// Grid resolving the mechanical sidebands of a rotating-frame system near ±Ω:
/// dense windows of width 10 Γ_eff (step below Γ_eff/10) around the mechanical
/// eigenfrequencies, coarse grid on [−2Ω, 2Ω] elsewhere.
std::vector<double> sideband_grid(const LinearLangevinSystem& sys, double Omega, int dense = 10000,
                                  int coarse = 2001);

struct SidebandResult {
    double delta_r = 0.0;  // red peak position + Ω
    double delta_b = 0.0;  // blue peak position − Ω
    double delta_Omega = 0.0;
    Peak red;
    Peak blue;
};

/// Locates the sideband maxima in the windows ∓Ω ± Ω/2 with parabolic
/// refinement on log S. `w` is the resolvent variable of output_psd and
/// welch_psd; peaks are reported on the probe axis −w, so the red (lower
/// optical frequency) sideband is the one at w = +Ω. Throws NotSidebandResolvedError when a window maximum
/// sits on the window edge, a peak is wider than Ω, or when a cavity
/// linewidth κ ≥ Ω is supplied.
SidebandResult sideband_analysis(const std::vector<double>& w, const std::vector<double>& S, double Omega,
                                 std::optional<double> kappa = std::nullopt);
SidebandResult sideband_analysis(SpectrumResult& spectrum, double Omega, std::optional<double> kappa = std::nullopt);

struct InequivalenceEstimate {
    double delta_Omega = 0.0;
    double normalized = 0.0;  // δΩ / Ω
    std::vector<std::string> warnings;
};

/// δΩ ≈ g0² n̄ / Ω, with warnings when Ω ≫ g0 √n̄ or Ω ≫ κ fail (ratio above 0.1).
InequivalenceEstimate estimate_inequivalence(const SystemParams& p, double n_bar);

}  // namespace optomech
