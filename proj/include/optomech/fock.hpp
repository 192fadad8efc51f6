#pragma once

// Exact truncated two-mode Fock-space representation used as an oracle for
// every operator-algebra identity the Langevin builders rely on.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "optomech/params.hpp"

namespace optomech::fock {

using Matrix = Eigen::MatrixXcd;

/// Ladder and derived operators on the photon ⊗ phonon space. Photon index is
/// the slow index: |p, q⟩ ↦ p * n_phonon + q.
struct FockRep {
    int n_photon = 0;
    int n_phonon = 0;

    Matrix id;
    Matrix a, a_dag, b, b_dag;
    Matrix n, m;        // a†a, b†b
    Matrix c, c_dag;    // a²/2 and its adjoint
    Matrix d, d_dag;    // b²/2 and its adjoint
    Matrix e, f;        // c + c†, d + d†
    Matrix B, B_dag;    // n b, n b†
    Matrix N;           // n²

    int dim() const { return n_photon * n_phonon; }
    int index(int photon, int phonon) const { return photon * n_phonon + phonon; }
};

/// Builds the representation. Throws TruncationError when either truncation
/// is below 4.
FockRep build_mode_ops(int n_photon, int n_phonon);

/// Column subset on which truncated products of up to `margin` raising
/// operators per mode are exact: photon ≤ n_photon − 1 − margin_photon,
/// phonon likewise.
struct SafeSubspace {
    std::vector<int> columns;
    int margin_photon = 0;
    int margin_phonon = 0;
};

SafeSubspace safe_subspace(const FockRep& rep, int margin_photon, int margin_phonon);
inline SafeSubspace safe_subspace(const FockRep& rep, int margin) {
    return safe_subspace(rep, margin, margin);
}

/// Frobenius norm of X restricted to the safe columns.
double restricted_norm(const Matrix& x, const SafeSubspace& safe);

/// Individual Hamiltonian terms, each exactly as written (without the
/// overall signs they carry in the total Hamiltonian).
struct HamiltonianTerms {
    Matrix free;       // ω n + Ω m (zero-point energy dropped)
    Matrix cubic;      // g0 n (b + b†)
    Matrix quad_std;   // g1 n (b + b†)²
    Matrix quad_mom;   // g2 (a + a†)² (b − b†)²
    Matrix quart_std;  // g3 n (b + b†)³
    Matrix quart_mom;  // g4 (a + a†)² [(b−b†)²(b+b†) + (b+b†)(b−b†)² + (b−b†)(b+b†)(b−b†)]
    Matrix drive;      // i(α* e^{iω̃t} a − α e^{−iω̃t} a†)
};

HamiltonianTerms hamiltonian_terms(const FockRep& rep, const SystemParams& p, double t);

/// H = H_s − H_0 + (H_1 − H_2) − (H_3 + H_4) + H_d.
Matrix build_hamiltonian(const FockRep& rep, const SystemParams& p, double t);

/// Standard-optomechanics Hamiltonian in the frame rotating at the drive,
/// without the drive: −Δ n + Ω m − g0 n (b + b†), Δ measured from bare ω.
Matrix build_rotating_cubic_hamiltonian(const FockRep& rep, const SystemParams& p);

inline Matrix commutator(const Matrix& x, const Matrix& y) { return x * y - y * x; }

/// −i [z, H].
Matrix heisenberg_drift(const Matrix& z, const Matrix& h);

/// One dissipation channel: system operator x with decay rate γ.
struct BathChannel {
    std::string name;
    Matrix x;
    double rate = 0.0;
};

/// Standard bath list {a: κ, b: Γ}.
std::vector<BathChannel> default_baths(const FockRep& rep, double kappa, double Gamma);

struct DampingResult {
    Matrix drift;                     // Σ_j −[z, x_j†](γ_j/2)x_j + (γ_j/2)x_j†[z, x_j]
    double leading_rate = 0.0;        // λ in drift ≈ −λ z + remainder
    Matrix remainder;                 // drift + λ z
    std::vector<std::string> remainder_labels;
    std::vector<cplx> remainder_coefficients;
    double fit_residual = 0.0;        // part of the drift outside span{z, remainder ops}
};

/// Damping drift of z under the given baths. The leading rate is the
/// coefficient of z in a joint least-squares fit of the drift over
/// {z} ∪ {I, n, m} on the safe subspace; the fitted lower-order part is
/// reported as the remainder.
DampingResult damping_drift(const FockRep& rep, const Matrix& z, const std::vector<BathChannel>& baths,
                            const SafeSubspace& safe);

/// Named operator used in closure and drift checks.
struct NamedOp {
    std::string label;
    Matrix op;
};

struct PairReport {
    std::string left;
    std::string right;
    std::vector<std::pair<std::string, cplx>> expansion;  // coefficients over basis ∪ {I}
    double residual = 0.0;
    // For named relations: residual of the printed identity itself.
    bool has_expected = false;
    std::string expected;
    double expected_residual = 0.0;
};

struct ClosureReport {
    std::string basis_name;
    std::vector<std::string> basis_labels;
    std::vector<PairReport> pairs;
    int safe_columns = 0;
    double tolerance = 1e-10;
    bool closed = false;
    double max_residual = 0.0;
};

/// Basis names: second_order_mixed, quadratic_six, minimal_fourth,
/// reduced_second_order. Throws ValidationError for anything else.
std::vector<std::string> known_bases();
std::vector<NamedOp> basis_operators(const FockRep& rep, const std::string& basis_name);

ClosureReport verify_basis_closure(const FockRep& rep, const std::string& basis_name, double tol = 1e-10,
                                   int margin = 4);

/// Least-squares expansion of x over the given operators on the safe subspace.
/// Returns coefficients; `residual` receives the restricted Frobenius residual.
std::vector<cplx> expand_in(const Matrix& x, const std::vector<Matrix>& ops, const SafeSubspace& safe,
                            double* residual);

/// Coefficient placement for the operator-valued drift matrix entries.
enum class Placement { left, right };

/// One entry of a printed operator matrix: drift_i contains coeff · z_j
/// (left placement) or z_j · coeff (right placement).
struct DriftRowCheck {
    std::string row_label;
    double residual_left = 0.0;
    double residual_right = 0.0;
    double drift_norm = 0.0;
    bool pass = false;
    Placement used = Placement::left;
};

struct DriftEquivalenceReport {
    std::string name;
    std::vector<DriftRowCheck> rows;
    double tolerance = 1e-9;
    bool pass = false;
};

/// Reduced second-order operator matrix versus the exact drift
/// of the rotating-frame cubic Hamiltonian, damping excluded.
DriftEquivalenceReport verify_second_order_drift(const FockRep& rep, const SystemParams& p,
                                                 double tol = 1e-9, int margin = 4);

/// Printed quadratic operator matrix (six-operator basis, damping excluded)
/// versus the exact drift of H with g0 = g3 = g4 = α = 0.
DriftEquivalenceReport verify_quadratic_drift(const FockRep& rep, const SystemParams& p, double tol = 1e-9,
                                              int margin = 4);

/// π/2 phase map U = exp(iπ n / 2): returns {‖U†(a−a†)²U + (a+a†)²‖, ‖U†nU − n‖}
/// on the safe subspace.
std::pair<double, double> verify_phase_map(const FockRep& rep, int margin = 2);

/// Mean-field Jacobian of drift operators about a product coherent state
/// |ā⟩⊗|b̄⟩. Entry (i, k) is the derivative of ⟨D_i⟩ with respect to the
/// k-th variable in {ā, ā*, b̄, b̄*}, evaluated through the exact commutator
/// identities ∂_ā⟨D⟩ = ⟨[D, a†]⟩, ∂_ā*⟨D⟩ = ⟨[a, D]⟩.
Eigen::MatrixXcd coherent_jacobian(const FockRep& rep, const std::vector<Matrix>& drifts, cplx a_mean,
                                   cplx b_mean);

/// Normalised product coherent state on the truncated space.
Eigen::VectorXcd coherent_state(const FockRep& rep, cplx a_mean, cplx b_mean);

}  // namespace optomech::fock
