#include "optomech/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optomech/errors.hpp"
#include "optomech/parallel.hpp"

namespace optomech {

namespace {

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXcd& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    return es.eigenvalues();
}

void check_resolvent(const Eigen::VectorXcd& eig, double w, double scale, double rel_tol) {
    const cplx iw(0.0, w);
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        if (std::abs(iw - eig(k)) <= rel_tol * scale) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "singular resolvent at w = " << w << ": eigenvalue " << eig(k).real() << " + "
                << eig(k).imag() << "i of M";
            throw SingularResolventError(msg.str(), eig(k).real(), eig(k).imag());
        }
    }
}

double matrix_scale(const Eigen::MatrixXcd& M) { return std::max(1.0, M.cwiseAbs().maxCoeff()); }

Eigen::VectorXd occupations(const LinearLangevinSystem& sys, double w, NoiseOrdering ordering) {
    if (ordering == NoiseOrdering::symmetrized || w == 0.0) return 0.5 * (sys.noise_psd_pos + sys.noise_psd_neg);
    return w > 0.0 ? sys.noise_psd_pos : sys.noise_psd_neg;
}

}  // namespace

Eigen::MatrixXcd scattering_matrix(const LinearLangevinSystem& sys, double w, double rel_tol) {
    check_resolvent(eigenvalues_of(sys.M), w, matrix_scale(sys.M), rel_tol);
    const auto n = sys.M.rows();
    const Eigen::MatrixXcd sg = sys.sqrt_gamma();
    const Eigen::MatrixXcd A = cplx(0.0, w) * Eigen::MatrixXcd::Identity(n, n) - sys.M;
    return Eigen::MatrixXcd::Identity(n, n) - sg * A.inverse() * sg;
}

SpectrumResult output_psd(const LinearLangevinSystem& sys, const std::vector<double>& w_grid,
                          NoiseOrdering ordering) {
    sys.check_consistency();
    const auto eig = eigenvalues_of(sys.M);
    const double scale = matrix_scale(sys.M);
    const auto n = sys.M.rows();
    const Eigen::MatrixXcd sg = sys.sqrt_gamma();
    const Eigen::RowVectorXcd u = sg.row(0);
    const Eigen::MatrixXcd Mt = sys.M.transpose();

    SpectrumResult out;
    out.w_grid = w_grid;
    out.S_AA.assign(w_grid.size(), 0.0);
    constexpr std::size_t chunk = 256;
    const std::size_t chunks = (w_grid.size() + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t end = std::min(w_grid.size(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
            const double w = w_grid[i];
            check_resolvent(eig, w, scale, 1e-12);
            // Row 0 of (iw − M)⁻¹ √γ via a transposed solve.
            const Eigen::MatrixXcd At = cplx(0.0, w) * Eigen::MatrixXcd::Identity(n, n) - Mt;
            const Eigen::VectorXcd v = At.partialPivLu().solve(u.transpose());
            Eigen::RowVectorXcd row = -(v.transpose() * sg);
            row(0) += 1.0;
            const Eigen::RowVectorXcd r = row * sys.input_map;
            const Eigen::VectorXd occ = occupations(sys, w, ordering);
            double acc = 0.0;
            for (Eigen::Index k = 0; k < r.size(); ++k) acc += std::norm(r(k)) * occ(k);
            out.S_AA[i] = acc;
        }
    });
    return out;
}

StabilityReport stability(const LinearLangevinSystem& sys) {
    StabilityReport r;
    r.eigenvalues = eigenvalues_of(sys.M);
    r.max_real = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k) r.max_real = std::max(r.max_real, r.eigenvalues(k).real());
    r.stable = r.max_real < 0.0;
    return r;
}

std::complex<double> nearest_mode(const StabilityReport& st, double target) {
    if (st.eigenvalues.size() == 0) throw ValidationError("nearest_mode: empty spectrum");
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < st.eigenvalues.size(); ++k) {
        if (std::abs(st.eigenvalues(k).imag() - target) < std::abs(st.eigenvalues(best).imag() - target)) best = k;
    }
    return st.eigenvalues(best);
}

std::vector<double> piecewise_grid(double lo, double hi, int coarse, const std::vector<double>& centers,
                                   double window, int dense) {
    if (!(hi > lo) || coarse < 2) throw ValidationError("piecewise_grid: need lo < hi and coarse >= 2");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(coarse) + centers.size() * static_cast<std::size_t>(std::max(dense, 0)));
    for (int i = 0; i < coarse; ++i) g.push_back(lo + (hi - lo) * i / (coarse - 1));
    if (dense >= 2) {
        for (double c : centers) {
            for (int i = 0; i < dense; ++i) g.push_back(c - 0.5 * window + window * i / (dense - 1));
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> sideband_grid(const LinearLangevinSystem& sys, double Omega, int dense, int coarse) {
    const auto st = stability(sys);
    std::vector<double> centers;
    double window = 0.0;
    for (double target : {-Omega, Omega}) {
        const auto lam = nearest_mode(st, target);
        const double linewidth = std::max(std::abs(2.0 * lam.real()), 1e-12 * Omega);
        centers.push_back(lam.imag());
        window = std::max(window, 10.0 * linewidth);
    }
    return piecewise_grid(-2.0 * Omega, 2.0 * Omega, coarse, centers, window, dense);
}

namespace {

Peak refine_peak(const std::vector<double>& w, const std::vector<double>& S, double lo, double hi, double Omega,
                 const char* label) {
    std::size_t first = w.size(), last = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= lo && w[i] <= hi) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == w.size() || last < first + 2) {
        throw NotSidebandResolvedError(std::string(label) + " sideband window holds fewer than 3 grid points");
    }
    std::size_t imax = first;
    double base = S[first];
    for (std::size_t i = first; i <= last; ++i) {
        if (S[i] > S[imax]) imax = i;
        base = std::min(base, S[i]);
    }
    if (imax == first || imax == last) {
        throw NotSidebandResolvedError(std::string(label) + " sideband maximum lies on the window edge");
    }
    const bool use_log = S[imax - 1] > 0.0 && S[imax] > 0.0 && S[imax + 1] > 0.0;
    auto y = [&](std::size_t i) { return use_log ? std::log(S[i]) : S[i]; };
    const double x0 = w[imax - 1], x1 = w[imax], x2 = w[imax + 1];
    const double y0 = y(imax - 1), y1 = y(imax), y2 = y(imax + 1);
    // Vertex of the parabola through three (possibly unevenly spaced) points.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    Peak pk;
    if (a < 0.0) {
        const double b = d01 - a * (x0 + x1);
        pk.center = -b / (2.0 * a);
        const double c = y1 - a * x1 * x1 - b * x1;
        const double yv = a * pk.center * pk.center + b * pk.center + c;
        pk.height = use_log ? std::exp(yv) : yv;
    } else {
        pk.center = x1;
        pk.height = S[imax];
    }
    const double half = base + 0.5 * (S[imax] - base);
    auto crossing = [&](int dir) -> std::optional<double> {
        std::size_t i = imax;
        while (true) {
            const std::size_t j = dir < 0 ? i - 1 : i + 1;
            if (S[j] <= half) {
                const double t = (S[i] - half) / (S[i] - S[j]);
                return w[i] + t * (w[j] - w[i]);
            }
            i = j;
            if (i == first || i == last) return std::nullopt;
        }
    };
    const auto left = crossing(-1);
    const auto right = crossing(+1);
    if (!left || !right) {
        throw NotSidebandResolvedError(std::string(label) + " sideband does not fall to half height inside its window");
    }
    pk.width = *right - *left;
    if (pk.width > Omega) {
        throw NotSidebandResolvedError(std::string(label) + " sideband is wider than the mechanical frequency");
    }
    return pk;
}

}  // namespace

SidebandResult sideband_analysis(const std::vector<double>& w, const std::vector<double>& S, double Omega,
                                 std::optional<double> kappa) {
    if (w.size() != S.size()) throw ValidationError("sideband_analysis: grid and spectrum sizes differ");
    if (!(Omega > 0.0)) throw ValidationError("sideband_analysis: Omega must be positive");
    if (kappa && *kappa >= Omega) {
        throw NotSidebandResolvedError("cavity linewidth kappa >= Omega: not sideband resolved");
    }
    // The resolvent variable is the negated probe detuning: a rotating-frame
    // component e^{iwt} sits at optical frequency ω̃ − w. Work on the probe axis.
    std::vector<double> wp(w.size()), Sp(S.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        wp[i] = -w[w.size() - 1 - i];
        Sp[i] = S[S.size() - 1 - i];
    }
    SidebandResult r;
    r.red = refine_peak(wp, Sp, -1.5 * Omega, -0.5 * Omega, Omega, "red");
    r.blue = refine_peak(wp, Sp, 0.5 * Omega, 1.5 * Omega, Omega, "blue");
    r.delta_r = r.red.center + Omega;
    r.delta_b = r.blue.center - Omega;
    r.delta_Omega = 0.5 * (r.delta_r + r.delta_b);
    return r;
}

SidebandResult sideband_analysis(SpectrumResult& spectrum, double Omega, std::optional<double> kappa) {
    auto r = sideband_analysis(spectrum.w_grid, spectrum.S_AA, Omega, kappa);
    spectrum.peaks = {r.red, r.blue};
    spectrum.delta_r = r.delta_r;
    spectrum.delta_b = r.delta_b;
    spectrum.delta_Omega = r.delta_Omega;
    return r;
}

InequivalenceEstimate estimate_inequivalence(const SystemParams& p, double n_bar) {
    p.validate();
    if (n_bar < 0.0) throw ValidationError("estimate_inequivalence: n_bar must be non-negative");
    InequivalenceEstimate e;
    e.delta_Omega = p.g0 * p.g0 * n_bar / p.Omega;
    e.normalized = e.delta_Omega / p.Omega;
    if (p.g0 * std::sqrt(n_bar) > 0.1 * p.Omega) e.warnings.push_back("weak-coupling condition Omega >> g0 sqrt(n) violated");
    if (p.kappa > 0.1 * p.Omega) e.warnings.push_back("sideband-resolved condition Omega >> kappa violated");
    return e;
}

}  // namespace optomech
