#include "optomech/fock.hpp"

#include <cmath>
#include <numbers>

#include "optomech/errors.hpp"

namespace optomech::fock {

namespace {

const cplx I1{0.0, 1.0};

Matrix ladder(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return a;
}

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

// Stacks the safe columns of x into one vector.
Eigen::VectorXcd restrict_vec(const Matrix& x, const SafeSubspace& safe) {
    const Eigen::Index rows = x.rows();
    Eigen::VectorXcd v(rows * static_cast<Eigen::Index>(safe.columns.size()));
    Eigen::Index k = 0;
    for (int col : safe.columns) {
        v.segment(k, rows) = x.col(col);
        k += rows;
    }
    return v;
}

// Residual of drift − Σ_j coeff_j z_j (or z_j coeff_j) on the safe subspace.
double placement_residual(const Matrix& drift, const std::vector<Matrix>& coeffs, const std::vector<Matrix>& z,
                          Placement placement, const SafeSubspace& safe) {
    Matrix acc = drift;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (coeffs[j].isZero(0.0)) continue;
        acc -= placement == Placement::left ? Matrix(coeffs[j] * z[j]) : Matrix(z[j] * coeffs[j]);
    }
    return restricted_norm(acc, safe);
}

DriftRowCheck check_row(const std::string& label, const Matrix& drift, const std::vector<Matrix>& coeffs,
                        const std::vector<Matrix>& z, const SafeSubspace& safe, double tol) {
    DriftRowCheck row;
    row.row_label = label;
    row.drift_norm = restricted_norm(drift, safe);
    row.residual_left = placement_residual(drift, coeffs, z, Placement::left, safe);
    row.residual_right = placement_residual(drift, coeffs, z, Placement::right, safe);
    const double scale = std::max(1.0, row.drift_norm);
    if (row.residual_left <= tol * scale) {
        row.pass = true;
        row.used = Placement::left;
    } else if (row.residual_right <= tol * scale) {
        row.pass = true;
        row.used = Placement::right;
    } else {
        row.used = row.residual_left <= row.residual_right ? Placement::left : Placement::right;
    }
    return row;
}

}  // namespace

FockRep build_mode_ops(int n_photon, int n_phonon) {
    if (n_photon < 4 || n_phonon < 4) {
        throw TruncationError("Fock truncation must be at least 4 per mode (got " + std::to_string(n_photon) +
                              "x" + std::to_string(n_phonon) + ")");
    }
    FockRep r;
    r.n_photon = n_photon;
    r.n_phonon = n_phonon;
    const Matrix ia = Matrix::Identity(n_photon, n_photon);
    const Matrix ib = Matrix::Identity(n_phonon, n_phonon);
    const Matrix a1 = ladder(n_photon);
    const Matrix b1 = ladder(n_phonon);

    r.id = Matrix::Identity(r.dim(), r.dim());
    r.a = kron(a1, ib);
    r.a_dag = r.a.adjoint();
    r.b = kron(ia, b1);
    r.b_dag = r.b.adjoint();
    r.n = r.a_dag * r.a;
    r.m = r.b_dag * r.b;
    r.c = 0.5 * r.a * r.a;
    r.c_dag = r.c.adjoint();
    r.d = 0.5 * r.b * r.b;
    r.d_dag = r.d.adjoint();
    r.e = r.c + r.c_dag;
    r.f = r.d + r.d_dag;
    r.B = r.n * r.b;
    r.B_dag = r.B.adjoint();
    r.N = r.n * r.n;
    return r;
}

SafeSubspace safe_subspace(const FockRep& rep, int margin_photon, int margin_phonon) {
    SafeSubspace s;
    s.margin_photon = margin_photon;
    s.margin_phonon = margin_phonon;
    const int pmax = rep.n_photon - 1 - margin_photon;
    const int qmax = rep.n_phonon - 1 - margin_phonon;
    if (pmax < 0 || qmax < 0) {
        throw TruncationError("truncation too small for margin " + std::to_string(margin_photon) + "/" +
                              std::to_string(margin_phonon));
    }
    for (int p = 0; p <= pmax; ++p) {
        for (int q = 0; q <= qmax; ++q) {
            s.columns.push_back(rep.index(p, q));
        }
    }
    return s;
}

double restricted_norm(const Matrix& x, const SafeSubspace& safe) {
    double acc = 0.0;
    for (int col : safe.columns) {
        acc += x.col(col).squaredNorm();
    }
    return std::sqrt(acc);
}

HamiltonianTerms hamiltonian_terms(const FockRep& rep, const SystemParams& p, double t) {
    HamiltonianTerms h;
    const Matrix xb = rep.b + rep.b_dag;
    const Matrix pb = rep.b - rep.b_dag;
    const Matrix xa = rep.a + rep.a_dag;
    const Matrix xa2 = xa * xa;
    const Matrix xb2 = xb * xb;
    const Matrix pb2 = pb * pb;

    h.free = p.omega * rep.n + p.Omega * rep.m;
    h.cubic = p.g0 * rep.n * xb;
    h.quad_std = p.g1 * rep.n * xb2;
    h.quad_mom = p.g2 * xa2 * pb2;
    h.quart_std = p.g3 * rep.n * xb2 * xb;
    h.quart_mom = p.g4 * xa2 * (pb2 * xb + xb * pb2 + pb * xb * pb);

    const double wd = p.drive_frequency();
    const cplx ph = std::exp(I1 * wd * t);
    h.drive = I1 * (std::conj(p.alpha) * ph * rep.a - p.alpha * std::conj(ph) * rep.a_dag);
    return h;
}

Matrix build_hamiltonian(const FockRep& rep, const SystemParams& p, double t) {
    const HamiltonianTerms h = hamiltonian_terms(rep, p, t);
    return h.free - h.cubic + (h.quad_std - h.quad_mom) - (h.quart_std + h.quart_mom) + h.drive;
}

Matrix build_rotating_cubic_hamiltonian(const FockRep& rep, const SystemParams& p) {
    const double delta = p.detuning_from_bare();
    return -delta * rep.n + p.Omega * rep.m - p.g0 * rep.n * (rep.b + rep.b_dag);
}

Matrix heisenberg_drift(const Matrix& z, const Matrix& h) { return -I1 * commutator(z, h); }

std::vector<BathChannel> default_baths(const FockRep& rep, double kappa, double Gamma) {
    return {{"a", rep.a, kappa}, {"b", rep.b, Gamma}};
}

std::vector<cplx> expand_in(const Matrix& x, const std::vector<Matrix>& ops, const SafeSubspace& safe,
                            double* residual) {
    const Eigen::VectorXcd rhs = restrict_vec(x, safe);
    Eigen::MatrixXcd design(rhs.size(), static_cast<Eigen::Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
        design.col(static_cast<Eigen::Index>(k)) = restrict_vec(ops[k], safe);
    }
    Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ops.size()));
    if (!ops.empty()) {
        coef = design.colPivHouseholderQr().solve(rhs);
    }
    if (residual) {
        *residual = ops.empty() ? rhs.norm() : (design * coef - rhs).norm();
    }
    return {coef.data(), coef.data() + coef.size()};
}

DampingResult damping_drift(const FockRep& rep, const Matrix& z, const std::vector<BathChannel>& baths,
                            const SafeSubspace& safe) {
    DampingResult out;
    out.drift = Matrix::Zero(z.rows(), z.cols());
    for (const auto& ch : baths) {
        const Matrix xd = ch.x.adjoint();
        out.drift += -commutator(z, xd) * (0.5 * ch.rate) * ch.x + (0.5 * ch.rate) * xd * commutator(z, ch.x);
    }

    std::vector<NamedOp> candidates = {{"I", rep.id}, {"n", rep.n}, {"m", rep.m}};
    std::vector<Matrix> ops = {z};
    const Eigen::VectorXcd zv = restrict_vec(z, safe);
    for (const auto& cand : candidates) {
        const Eigen::VectorXcd cv = restrict_vec(cand.op, safe);
        // Skip candidates parallel to z; they would make the fit singular.
        const cplx overlap = zv.dot(cv);
        if (std::abs(std::abs(overlap) - zv.norm() * cv.norm()) <= 1e-12 * zv.norm() * cv.norm()) continue;
        ops.push_back(cand.op);
        out.remainder_labels.push_back(cand.label);
    }
    const std::vector<cplx> coef = expand_in(out.drift, ops, safe, &out.fit_residual);
    out.leading_rate = -coef[0].real();
    out.remainder = out.drift + out.leading_rate * z;
    out.remainder_coefficients.assign(coef.begin() + 1, coef.end());
    return out;
}

std::vector<std::string> known_bases() {
    return {"second_order_mixed", "quadratic_six", "minimal_fourth", "reduced_second_order"};
}

std::vector<NamedOp> basis_operators(const FockRep& rep, const std::string& name) {
    if (name == "second_order_mixed") {
        return {{"a", rep.a},
                {"b", rep.b},
                {"ab", rep.a * rep.b},
                {"ab_dag", rep.a * rep.b_dag},
                {"n", rep.n},
                {"c", rep.c}};
    }
    if (name == "quadratic_six") {
        return {{"c", rep.c}, {"c_dag", rep.c_dag}, {"n", rep.n}, {"d", rep.d}, {"d_dag", rep.d_dag}, {"m", rep.m}};
    }
    if (name == "minimal_fourth") {
        return {{"N", rep.N}, {"B", rep.B}, {"B_dag", rep.B_dag}};
    }
    if (name == "reduced_second_order") {
        return {{"a", rep.a}, {"ab", rep.a * rep.b}, {"ab_dag", rep.a * rep.b_dag}};
    }
    throw ValidationError("unknown basis '" + name + "'");
}

namespace {

struct Relation {
    std::string left, right, expected_label;
    Matrix expected;
};

std::vector<Relation> named_relations(const FockRep& rep, const std::string& name) {
    std::vector<Relation> rel;
    const auto& id = rep.id;
    if (name == "second_order_mixed") {
        const Matrix ab = rep.a * rep.b;
        const Matrix abd = rep.a * rep.b_dag;
        rel.push_back({"c", "n", "2c", 2.0 * rep.c});
        rel.push_back({"a", "n", "a", rep.a});
        rel.push_back({"b", "ab_dag", "a", rep.a});
        rel.push_back({"ab", "n", "ab", ab});
        rel.push_back({"ab_dag", "n", "ab_dag", abd});
        rel.push_back({"ab", "ab_dag", "2c", 2.0 * rep.c});
    } else if (name == "quadratic_six") {
        rel.push_back({"c", "c_dag", "n+1/2", rep.n + 0.5 * id});
        rel.push_back({"c", "n", "2c", 2.0 * rep.c});
        rel.push_back({"n", "c_dag", "2c_dag", 2.0 * rep.c_dag});
        rel.push_back({"d", "d_dag", "m+1/2", rep.m + 0.5 * id});
        rel.push_back({"d", "m", "2d", 2.0 * rep.d});
        rel.push_back({"m", "d_dag", "2d_dag", 2.0 * rep.d_dag});
        const char* photon[] = {"c", "c_dag", "n"};
        const char* phonon[] = {"d", "d_dag", "m"};
        for (const char* x : photon) {
            for (const char* y : phonon) {
                rel.push_back({x, y, "0", Matrix::Zero(rep.dim(), rep.dim())});
            }
        }
    } else if (name == "minimal_fourth") {
        rel.push_back({"B", "B_dag", "N", rep.N});
        rel.push_back({"N", "B", "0", Matrix::Zero(rep.dim(), rep.dim())});
        rel.push_back({"N", "B_dag", "0", Matrix::Zero(rep.dim(), rep.dim())});
    }
    return rel;
}

const Matrix& find_op(const std::vector<NamedOp>& ops, const std::string& label) {
    for (const auto& o : ops) {
        if (o.label == label) return o.op;
    }
    throw ValidationError("operator '" + label + "' not in basis");
}

}  // namespace

ClosureReport verify_basis_closure(const FockRep& rep, const std::string& basis_name, double tol, int margin) {
    const std::vector<NamedOp> ops = basis_operators(rep, basis_name);
    const SafeSubspace safe = safe_subspace(rep, margin);

    ClosureReport report;
    report.basis_name = basis_name;
    report.tolerance = tol;
    report.safe_columns = static_cast<int>(safe.columns.size());
    for (const auto& o : ops) report.basis_labels.push_back(o.label);

    std::vector<Matrix> span;
    std::vector<std::string> span_labels;
    for (const auto& o : ops) {
        span.push_back(o.op);
        span_labels.push_back(o.label);
    }
    span.push_back(rep.id);
    span_labels.push_back("I");

    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            PairReport pr;
            pr.left = ops[i].label;
            pr.right = ops[j].label;
            const Matrix comm = commutator(ops[i].op, ops[j].op);
            const std::vector<cplx> coef = expand_in(comm, span, safe, &pr.residual);
            for (std::size_t k = 0; k < coef.size(); ++k) {
                if (std::abs(coef[k]) > 1e-12) pr.expansion.emplace_back(span_labels[k], coef[k]);
            }
            report.pairs.push_back(std::move(pr));
        }
    }

    for (const auto& r : named_relations(rep, basis_name)) {
        PairReport pr;
        pr.left = r.left;
        pr.right = r.right;
        const Matrix comm = commutator(find_op(ops, r.left), find_op(ops, r.right));
        const std::vector<cplx> coef = expand_in(comm, span, safe, &pr.residual);
        for (std::size_t k = 0; k < coef.size(); ++k) {
            if (std::abs(coef[k]) > 1e-12) pr.expansion.emplace_back(span_labels[k], coef[k]);
        }
        pr.has_expected = true;
        pr.expected = r.expected_label;
        pr.expected_residual = restricted_norm(comm - r.expected, safe);
        report.pairs.push_back(std::move(pr));
    }

    report.closed = true;
    for (const auto& pr : report.pairs) {
        report.max_residual = std::max(report.max_residual, pr.residual);
        if (pr.has_expected) report.max_residual = std::max(report.max_residual, pr.expected_residual);
        if (pr.residual >= tol || (pr.has_expected && pr.expected_residual >= tol)) report.closed = false;
    }
    return report;
}

DriftEquivalenceReport verify_second_order_drift(const FockRep& rep, const SystemParams& p, double tol,
                                                 int margin) {
    const SafeSubspace safe = safe_subspace(rep, margin);
    const Matrix h = build_rotating_cubic_hamiltonian(rep, p);
    const double delta = p.detuning_from_bare();
    const double W = p.Omega;
    const double g0 = p.g0;
    const Matrix& id = rep.id;
    const Matrix zero = Matrix::Zero(rep.dim(), rep.dim());

    const std::vector<Matrix> z = {rep.a, rep.a * rep.b, rep.a * rep.b_dag};
    const std::vector<std::string> labels = {"a", "ab", "ab_dag"};
    // Coefficient operators with the damping entries removed.
    const std::vector<std::vector<Matrix>> coeff = {
        {I1 * delta * id, I1 * g0 * id, I1 * g0 * id},
        {I1 * g0 * (rep.m + rep.n + id), -I1 * (W - delta) * id + I1 * g0 * rep.b, zero},
        {I1 * g0 * (rep.m - rep.n), zero, I1 * (W + delta) * id + I1 * g0 * rep.b_dag},
    };

    DriftEquivalenceReport out;
    out.name = "second_order_reduced";
    out.tolerance = tol;
    out.pass = true;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Matrix drift = heisenberg_drift(z[i], h);
        out.rows.push_back(check_row(labels[i], drift, coeff[i], z, safe, tol));
        out.pass = out.pass && out.rows.back().pass;
    }
    return out;
}

DriftEquivalenceReport verify_quadratic_drift(const FockRep& rep, const SystemParams& p, double tol, int margin) {
    const SafeSubspace safe = safe_subspace(rep, margin);
    SystemParams q = p;
    q.g0 = q.g3 = q.g4 = 0.0;
    q.alpha = 0.0;
    const Matrix h = build_hamiltonian(rep, q, 0.0);

    const double w = p.omega;
    const double W = p.Omega;
    const double g2 = p.g2;
    // g2 β± = g1 ± g2, kept as products so g2 = 0 stays well defined.
    const double g2bp = p.g1 + p.g2;
    const double g2bm = p.g1 - p.g2;
    const Matrix& id = rep.id;
    const Matrix zero = Matrix::Zero(rep.dim(), rep.dim());
    const Matrix fm = rep.f - rep.m;
    const Matrix cm = rep.c - rep.c_dag;
    const Matrix ba_top = rep.m - 2.0 * rep.d + 0.5 * id;
    const Matrix ba_mid = -rep.m + 2.0 * rep.d_dag - 0.5 * id;
    const Matrix e_bn = I1 * g2 * rep.e - I1 * g2bm * rep.n;

    const std::vector<Matrix> z = {rep.c, rep.c_dag, rep.n, rep.d, rep.d_dag, rep.m};
    const std::vector<std::string> labels = {"c", "c_dag", "n", "d", "d_dag", "m"};
    const std::vector<std::vector<Matrix>> coeff = {
        {-2.0 * I1 * w * id, zero, 0.5 * I1 * g2 * fm, -I1 * g2bm * cm, -I1 * g2bm * cm, I1 * g2bp * cm},
        {zero, 2.0 * I1 * w * id, -0.5 * I1 * g2 * fm, I1 * g2bm * cm, I1 * g2bm * cm, -I1 * g2bp * cm},
        {-I1 * g2 * fm, I1 * g2 * fm, zero, zero, zero, zero},
        {0.5 * I1 * g2 * ba_top, 0.5 * I1 * g2 * ba_top, 0.5 * I1 * g2 * ba_top, -2.0 * I1 * W * id, zero,
         -0.5 * I1 * g2 * rep.n},
        {0.5 * I1 * g2 * ba_mid, 0.5 * I1 * g2 * ba_mid, 0.5 * I1 * g2 * ba_mid, zero, 2.0 * I1 * W * id,
         0.5 * I1 * g2 * rep.n},
        {zero, zero, zero, -e_bn, e_bn, zero},
    };

    DriftEquivalenceReport out;
    out.name = "quadratic_six";
    out.tolerance = tol;
    out.pass = true;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Matrix drift = heisenberg_drift(z[i], h);
        out.rows.push_back(check_row(labels[i], drift, coeff[i], z, safe, tol));
        out.pass = out.pass && out.rows.back().pass;
    }
    return out;
}

std::pair<double, double> verify_phase_map(const FockRep& rep, int margin) {
    const SafeSubspace safe = safe_subspace(rep, margin);
    Eigen::VectorXcd diag(rep.dim());
    for (int p = 0; p < rep.n_photon; ++p) {
        const cplx ph = std::exp(I1 * (std::numbers::pi / 2.0) * static_cast<double>(p));
        for (int q = 0; q < rep.n_phonon; ++q) diag(rep.index(p, q)) = ph;
    }
    const Matrix u = diag.asDiagonal();
    const Matrix ud = u.adjoint();
    const Matrix pa = rep.a - rep.a_dag;
    const Matrix xa = rep.a + rep.a_dag;
    const Matrix mapped = ud * pa * pa * u;
    const double r_field = restricted_norm(mapped + xa * xa, safe);
    const double r_number = restricted_norm(ud * rep.n * u - rep.n, safe);
    return {r_field, r_number};
}

Eigen::VectorXcd coherent_state(const FockRep& rep, cplx a_mean, cplx b_mean) {
    auto single = [](int n, cplx z) {
        Eigen::VectorXcd v(n);
        v(0) = 1.0;
        for (int k = 1; k < n; ++k) v(k) = v(k - 1) * z / std::sqrt(static_cast<double>(k));
        return Eigen::VectorXcd(v / v.norm());
    };
    const Eigen::VectorXcd va = single(rep.n_photon, a_mean);
    const Eigen::VectorXcd vb = single(rep.n_phonon, b_mean);
    Eigen::VectorXcd psi(rep.dim());
    for (int p = 0; p < rep.n_photon; ++p) {
        for (int q = 0; q < rep.n_phonon; ++q) psi(rep.index(p, q)) = va(p) * vb(q);
    }
    return psi;
}

Eigen::MatrixXcd coherent_jacobian(const FockRep& rep, const std::vector<Matrix>& drifts, cplx a_mean,
                                   cplx b_mean) {
    const Eigen::VectorXcd psi = coherent_state(rep, a_mean, b_mean);
    auto expect = [&](const Matrix& x) { return psi.dot(x * psi); };
    Eigen::MatrixXcd jac(static_cast<Eigen::Index>(drifts.size()), 4);
    for (std::size_t i = 0; i < drifts.size(); ++i) {
        const Matrix& dr = drifts[i];
        const auto r = static_cast<Eigen::Index>(i);
        jac(r, 0) = expect(commutator(dr, rep.a_dag));
        jac(r, 1) = expect(commutator(rep.a, dr));
        jac(r, 2) = expect(commutator(dr, rep.b_dag));
        jac(r, 3) = expect(commutator(rep.b, dr));
    }
    return jac;
}

}  // namespace optomech::fock
