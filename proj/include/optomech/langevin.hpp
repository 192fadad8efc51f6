#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/steady.hpp"

namespace optomech {

enum class Frame { rotating, absolute };

/// How the stored decay matrix enters the equations of motion.
/// `diagonal_rates`: γ holds rates, √γ is taken elementwise.
/// `input_coupling`: γ already multiplies the input vector and is used as √γ.
enum class GammaKind { diagonal_rates, input_coupling };

/// Phonon occupation used for the input-noise floor.
enum class PhononNoise { thermal, coherent };

/// Linear system dA/dt = M A − √γ A_in (− drive for the mean-field part),
/// with A_in = T ξ for independent input channels ξ.
struct LinearLangevinSystem {
    std::string name;
    std::vector<std::string> basis;
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd gamma;
    GammaKind gamma_kind = GammaKind::diagonal_rates;

    std::vector<std::string> channels;
    Eigen::MatrixXcd input_map;     // T: basis-dim × channel count
    Eigen::VectorXd noise_psd_pos;  // per channel, w > 0
    Eigen::VectorXd noise_psd_neg;  // per channel, w < 0
    Eigen::VectorXcd drive;

    Frame frame = Frame::rotating;
    std::vector<int> basis_partner;    // index of the conjugate basis element, or own index
    std::vector<int> channel_partner;  // same for channels
    std::vector<std::pair<std::string, double>> metadata;
    std::vector<std::string> warnings;

    int dim() const { return static_cast<int>(basis.size()); }
    Eigen::MatrixXcd sqrt_gamma() const;
    double meta(const std::string& key) const;  // throws when absent
    /// Throws ValidationError if dimensions disagree.
    void check_consistency() const;
};

/// Coefficients of the linearized first-order system.
struct FirstOrderCoefficients {
    double delta = 0.0;  // drive detuning from bare ω
    double f = 0.0;      // frequency pull
    double g = 0.0;      // g0 √n̄
    double kappa = 0.1;
    double Gamma = 1e-3;
    double Omega = 1.0;
    double m_noise = 0.0;  // phonon occupation in the noise vector
    cplx alpha{0.0, 0.0};
};

LinearLangevinSystem build_first_order(const FirstOrderCoefficients& c);
LinearLangevinSystem build_first_order(const SystemParams& p, const SteadyState& s,
                                       PhononNoise noise = PhononNoise::thermal);

LinearLangevinSystem build_second_order(const SystemParams& p, const SteadyState& s,
                                        PhononNoise noise = PhononNoise::thermal);

LinearLangevinSystem build_minimal_fourth(const SystemParams& p, const SteadyState& s,
                                          PhononNoise noise = PhononNoise::thermal);
/// Steady state from the cubic solver at p.alpha.
LinearLangevinSystem build_minimal_fourth(const SystemParams& p);

LinearLangevinSystem build_quadratic(const SystemParams& p, const SteadyState& s,
                                     PhononNoise noise = PhononNoise::thermal);

/// Adds the linearized g0 correction to a quadratic system, using p.g0 and s.b_bar.
LinearLangevinSystem apply_optomech_perturbation(const LinearLangevinSystem& sys, const SystemParams& p,
                                                 const SteadyState& s);

/// max |M[partner(i), partner(j)] − conj(M[i, j])| over all entries.
double conjugate_pairing_residual(const LinearLangevinSystem& sys);

/// Systems by basis name: first_order, second_order, minimal_fourth, quadratic,
/// quadratic_perturbed.
std::vector<std::string> system_kinds();
LinearLangevinSystem build_system(const std::string& kind, const SystemParams& p,
                                  CubicConvention conv = CubicConvention::mean_field,
                                  QuadraticBranch branch = QuadraticBranch::off_resonant,
                                  PhononNoise noise = PhononNoise::thermal);

}  // namespace optomech
