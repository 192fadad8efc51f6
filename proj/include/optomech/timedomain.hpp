#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "optomech/langevin.hpp"
#include "optomech/params.hpp"
#include "optomech/steady.hpp"

namespace optomech {

/// Uniformly sampled complex series. t[k] = k dt (relative to the first kept sample).
struct Trajectory {
    std::vector<double> t;
    std::vector<std::string> labels;
    std::vector<std::vector<cplx>> series;
    std::uint64_t seed = 0;
    double dt = 0.0;
    long long steps = 0;
    std::string scheme;

    const std::vector<cplx>& get(const std::string& label) const;
};

/// splitmix64 finaliser; per-trajectory seeds are splitmix64(master + index).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Complex Gaussian source with independent real and imaginary parts, built on
/// mt19937_64 and Box–Muller so results do not depend on the standard
/// library's distribution implementation.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}
    double normal();
    /// Real and imaginary parts each with variance `var`.
    cplx complex_normal(double var);

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Largest step allowed for the semiclassical integrator: 0.01 over the fastest
/// rotating-frame rate max(|Δ|, Ω, κ, Γ).
double max_semiclassical_dt(const SystemParams& p);

/// min(0.01/Ω, 0.1/κ, 0.1/Γ)/(1 + g0 √n̄/Ω).
double recommended_dt(const SystemParams& p, double n_bar);

struct SemiclassicalOptions {
    double T = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    bool noise = true;
    bool start_at_mean_field = true;  // otherwise start at (a0, b0)
    cplx a0{0.0, 0.0};
    cplx b0{0.0, 0.0};
    double burn_in = 0.0;  // time discarded before recording
    int stride = 1;        // record every stride-th step
    bool enforce_step_bound = true;
    CubicConvention convention = CubicConvention::mean_field;
};

/// Integrates the nonlinear rotating-frame equations for (a, b) with
/// c-number amplitudes:
///   da/dt = (iΔ − κ/2) a + i g0 a (b + b*) − α − √κ a_in
///   db/dt = (−iΩ − Γ/2) b + i g0 |a|² − √Γ b_in
/// using exponential Euler on the linear part. Inputs are white complex noise
/// with occupations ½ (optical) and m_th + ½ (phonon). Records a, b and
/// a_out = a_in + √κ a; with stride > 1, a and b are point samples and a_out
/// is the mean over each stride interval. Throws BlowUpError on overflow.
Trajectory integrate_semiclassical(const SystemParams& p, const SemiclassicalOptions& opt);

struct LinearSimOptions {
    double T = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    double burn_in = 0.0;
};

/// Exact-propagator simulation of dA/dt = M A − √γ T ξ with zero-order-hold
/// white noise ξ (symmetrized occupations, conjugate channels tied together).
/// Records the basis components at step starts and out = ξ_0 + (√γ Ā)_0, with
/// Ā the exact mean of A over the step (an integrating detector).
Trajectory simulate_linear(const LinearLangevinSystem& sys, const LinearSimOptions& opt);

/// Which closed form the explicit minimal-basis solution uses.
/// `printed`: N(t) = N(0)e^{−2κt} − 2√κ ∫ e^{−2κ(t−τ)} N_in dτ and
///            B(t) = B(0)e^{−λt} − ∫ e^{−λ(t−τ)}[i g0 N + √γ B_in] dτ.
/// `drift_consistent`: the solution of dA/dt = M A − √γ A_in with the 2×2
///            drift matrix: √(2κ) N_in prefactor and +i g0 N source.
enum class ExplicitForm { printed, drift_consistent };

/// Evaluates the closed-form solution by trapezoidal recursive convolution.
Trajectory explicit_solution(const SystemParams& p, cplx N0, cplx B0, const std::vector<cplx>& N_in,
                             const std::vector<cplx>& B_in, double dt, ExplicitForm form = ExplicitForm::printed);

/// Approximate multiplicative inputs of the minimal basis from ladder inputs.
std::pair<std::vector<cplx>, std::vector<cplx>> minimal_inputs(const SystemParams& p, const SteadyState& s,
                                                               const std::vector<cplx>& a_in,
                                                               const std::vector<cplx>& b_in);

struct WelchResult {
    std::vector<double> w;    // ascending signed angular frequencies
    std::vector<double> psd;  // two-sided, dt |Σ x h e^{−iwt}|² / Σ h²
    int segments = 0;
};

/// Hann-windowed averaged periodogram. Throws ValidationError when the series
/// is shorter than 4 segments.
WelchResult welch_psd(const std::vector<cplx>& series, double dt, int segment_len, double overlap = 0.5,
                      bool remove_mean = false);

/// Accumulates segments from several series (in order) into one average.
WelchResult welch_psd_multi(const std::vector<std::vector<cplx>>& series, double dt, int segment_len,
                            double overlap = 0.5, bool remove_mean = false);

/// Runs `trajectories` linear simulations with seeds derived from opt.seed and
/// averages the Welch PSD of the output channel in trajectory order.
WelchResult simulated_output_psd(const LinearLangevinSystem& sys, const LinearSimOptions& opt, int trajectories,
                                 int segment_len, double overlap = 0.5);

/// Same for the nonlinear semiclassical model; the mean of each trajectory is
/// removed from the output before the periodogram.
WelchResult semiclassical_output_psd(const SystemParams& p, const SemiclassicalOptions& opt, int trajectories,
                                     int segment_len, double overlap = 0.5);

}  // namespace optomech
