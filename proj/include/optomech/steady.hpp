#pragma once

#include <string>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

/// Coefficient of the frequency pull in the steady-state cubic.
/// `mean_field` uses f = 2 g0 Re b̄ = 2 g0² Ω n̄ / (Ω² + Γ²/4), consistent with
/// the linearized drift; `printed` uses 4 g0² Ω / (Ω² + Γ²/4).
enum class CubicConvention { mean_field, printed };

/// Quadratic-regime branch. `off_resonant` solves the coupled saturation
/// equations; `resonant` is the pump tuned to the shifted optical frequency.
enum class QuadraticBranch { off_resonant, resonant };

struct SteadyState {
    double n_bar = 0.0;
    double m_bar = 0.0;  // coherent phonon population (not m_th)
    cplx a_bar{0.0, 0.0};
    cplx b_bar{0.0, 0.0};
    cplx d_bar{0.0, 0.0};
    double f = 0.0;    // frequency pull 2 g0 Re b̄
    double psi = 0.0;  // m̄ n̄
    std::vector<double> all_real_roots;
    bool bistable = false;
    double residual = 0.0;  // relative residual of the defining equation(s)
    std::string regime;     // "cubic", "quadratic_off_resonant", "quadratic_resonant"
};

/// Pull coefficient K with f = K n̄.
double pull_coefficient(const SystemParams& p, CubicConvention conv);

/// Ascending coefficients of K² n³ + 2ΔK n² + (Δ² + κ²/4) n − |α|², Δ from bare ω.
std::vector<double> cubic_coefficients(const SystemParams& p, cplx alpha, CubicConvention conv);

/// ((Δ + K n)² + κ²/4) n − |α|², divided by max(|α|², tiny).
double cubic_relative_residual(const SystemParams& p, cplx alpha, double n, CubicConvention conv);

SteadyState solve_cubic_steady(const SystemParams& p, cplx alpha,
                               CubicConvention conv = CubicConvention::mean_field);

/// b̄ = i g0 n̄ / (iΩ + Γ/2).
cplx mirror_displacement(double n_bar, const SystemParams& p);

/// 2|α| n² + (g1²/s) √n − 2|α| g1²/s², s = g1 + g2.
double quadratic_quartic(const SystemParams& p, double abs_alpha, double n);

/// Relative residuals of the two coupled saturation equations.
std::pair<double, double> quadratic_pair_residuals(const SystemParams& p, double abs_alpha, double n, double m);

/// Root of the quartic by bracketed bisection alone (no polish).
double quadratic_root_bisection(const SystemParams& p, double abs_alpha);

SteadyState solve_quadratic_steady(const SystemParams& p, cplx alpha,
                                   QuadraticBranch branch = QuadraticBranch::off_resonant);

double cross_population(const SteadyState& s);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PumpSweep {
    std::vector<double> alphas;
    std::vector<SteadyState> states;
    double psi_exponent = 0.0;
    double n_exponent = 0.0;
};

/// Geometric sweep of |α| over [lo, hi] with `points` entries. Evaluated in
/// parallel; output order follows the sweep index.
std::vector<double> geometric_grid(double lo, double hi, int points);
PumpSweep sweep_quadratic(const SystemParams& p, const std::vector<double>& alphas, QuadraticBranch branch);
PumpSweep sweep_cubic(const SystemParams& p, const std::vector<double>& alphas,
                      CubicConvention conv = CubicConvention::mean_field);

/// Competition of the resonant quadratic population with the cubic one.
struct MaskingScan {
    std::vector<double> alphas;
    std::vector<double> n_quadratic;
    std::vector<double> n_cubic;
    double slope_quadratic = 0.0;  // fitted over the upper half of the sweep
    double slope_cubic = 0.0;
    double crossover_alpha = 0.0;  // intersection of the fitted asymptotic power laws
    bool overtakes = false;        // quadratic exceeds cubic with growing ratio beyond the crossover
};

MaskingScan masking_scan(const SystemParams& p, const std::vector<double>& alphas,
                         CubicConvention conv = CubicConvention::mean_field);

}  // namespace optomech
