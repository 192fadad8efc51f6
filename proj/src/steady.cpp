#include "optomech/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"
#include "optomech/parallel.hpp"
#include "optomech/polynomial.hpp"

namespace optomech {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double factored_cubic(double delta, double K, double kappa, double a2, double n) {
    const double s = delta + K * n;
    return (s * s + 0.25 * kappa * kappa) * n - a2;
}

double factored_cubic_derivative(double delta, double K, double kappa, double n) {
    const double s = delta + K * n;
    return s * s + 0.25 * kappa * kappa + 2.0 * K * n * s;
}

// Roots located by sign changes between the critical points of the cubic.
std::vector<double> bracketed_cubic_roots(double delta, double K, double kappa, double a2, double hi) {
    auto f = [&](double n) { return factored_cubic(delta, K, kappa, a2, n); };
    std::vector<double> knots{0.0};
    // p'(n) = 3K² n² + 4ΔK n + Δ² + κ²/4
    const double qa = 3.0 * K * K;
    const double qb = 4.0 * delta * K;
    const double qc = delta * delta + 0.25 * kappa * kappa;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa > 0.0 && disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + std::copysign(sq, qb));
        double r1 = q / qa;
        double r2 = q != 0.0 ? qc / q : r1;
        if (r1 > r2) std::swap(r1, r2);
        for (double r : {r1, r2}) {
            if (r > 0.0 && r < hi) knots.push_back(r);
        }
    }
    knots.push_back(hi);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double up = knots[i + 1];
        const double flo = f(lo);
        const double fup = f(up);
        if (flo == 0.0) {
            roots.push_back(lo);
            continue;
        }
        if ((flo < 0.0) != (fup < 0.0) || fup == 0.0) roots.push_back(poly::bisect(f, lo, up));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }),
                roots.end());
    return roots;
}

}  // namespace

double pull_coefficient(const SystemParams& p, CubicConvention conv) {
    const double base = p.g0 * p.g0 * p.Omega / (p.Omega * p.Omega + 0.25 * p.Gamma * p.Gamma);
    return (conv == CubicConvention::mean_field ? 2.0 : 4.0) * base;
}

std::vector<double> cubic_coefficients(const SystemParams& p, cplx alpha, CubicConvention conv) {
    const double K = pull_coefficient(p, conv);
    const double d = p.detuning_from_bare();
    return {-std::norm(alpha), d * d + 0.25 * p.kappa * p.kappa, 2.0 * d * K, K * K};
}

double cubic_relative_residual(const SystemParams& p, cplx alpha, double n, CubicConvention conv) {
    const double a2 = std::norm(alpha);
    const double r = factored_cubic(p.detuning_from_bare(), pull_coefficient(p, conv), p.kappa, a2, n);
    return std::abs(r) / std::max(a2, kTiny);
}

cplx mirror_displacement(double n_bar, const SystemParams& p) {
    if (n_bar < 0.0) throw ValidationError("mirror_displacement: n_bar must be non-negative");
    return cplx(0.0, p.g0 * n_bar) / cplx(0.5 * p.Gamma, p.Omega);
}

SteadyState solve_cubic_steady(const SystemParams& p, cplx alpha, CubicConvention conv) {
    p.validate();
    SteadyState s;
    s.regime = "cubic";
    const double a2 = std::norm(alpha);
    const double delta = p.detuning_from_bare();
    const double K = pull_coefficient(p, conv);
    if (a2 == 0.0) {
        s.all_real_roots = {0.0};
        return s;
    }
    const double lorentz = a2 / (delta * delta + 0.25 * p.kappa * p.kappa);
    auto f = [&](double n) { return factored_cubic(delta, K, p.kappa, a2, n); };
    auto df = [&](double n) { return factored_cubic_derivative(delta, K, p.kappa, n); };

    std::vector<double> roots;
    if (K == 0.0) {
        roots = {lorentz};
    } else {
        // Every root satisfies n ≤ |α|²/(κ²/4).
        const double hi = 4.0 * a2 / (p.kappa * p.kappa) * (1.0 + 1e-9);
        for (double r : poly::real_roots(cubic_coefficients(p, alpha, conv), 0.0, hi)) {
            roots.push_back(poly::newton_polish(f, df, r, 0.0, hi));
        }
        const auto bracketed = bracketed_cubic_roots(delta, K, p.kappa, a2, hi);
        if (bracketed.size() != roots.size()) {
            // Near-tangent roots can be lost or split by the eigenvalue route.
            roots.clear();
            for (double r : bracketed) roots.push_back(poly::newton_polish(f, df, r, 0.0, hi));
        }
    }
    std::sort(roots.begin(), roots.end());
    if (roots.empty()) throw PhysicsError("solve_cubic_steady: no non-negative real root found");

    s.all_real_roots = roots;
    s.bistable = roots.size() == 3;
    s.n_bar = roots.front();
    s.b_bar = mirror_displacement(s.n_bar, p);
    s.m_bar = std::norm(s.b_bar);
    s.f = 2.0 * p.g0 * s.b_bar.real();
    // ā = α / (i(Δ + f) − κ/2) with the pull of the selected convention.
    s.a_bar = alpha / cplx(-0.5 * p.kappa, delta + K * s.n_bar);
    s.psi = s.m_bar * s.n_bar;
    s.residual = 0.0;
    for (double r : roots) s.residual = std::max(s.residual, std::abs(f(r)) / a2);
    return s;
}

double quadratic_quartic(const SystemParams& p, double abs_alpha, double n) {
    const double s = p.g1 + p.g2;
    return 2.0 * abs_alpha * n * n + (p.g1 * p.g1 / s) * std::sqrt(n) -
           2.0 * abs_alpha * p.g1 * p.g1 / (s * s);
}

std::pair<double, double> quadratic_pair_residuals(const SystemParams& p, double abs_alpha, double n, double m) {
    const double s = p.g1 + p.g2;
    const double a2 = abs_alpha * abs_alpha;
    const double lhs1 = 4.0 * a2;
    const double rhs1 = s * s * m * m * n;
    const double lhs2 = 4.0 * n * a2;
    const double rhs2 = p.g1 * p.g1 * (m * m - m);
    const double r1 = std::abs(lhs1 - rhs1) / std::max(std::abs(lhs1), kTiny);
    const double r2 = std::abs(lhs2 - rhs2) / std::max(std::abs(lhs2), kTiny);
    return {r1, r2};
}

namespace {

void require_quadratic(const SystemParams& p) {
    p.validate();
    if (p.g1 == 0.0) throw DegenerateSystemError("quadratic steady state requires g1 > 0");
    if (!(p.g1 + p.g2 > 0.0)) throw DegenerateSystemError("quadratic steady state requires g1 + g2 > 0");
}

}  // namespace

double quadratic_root_bisection(const SystemParams& p, double abs_alpha) {
    require_quadratic(p);
    const double hi = p.g1 / (p.g1 + p.g2) + 1.0;
    return poly::bisect([&](double n) { return quadratic_quartic(p, abs_alpha, n); }, 0.0, hi);
}

SteadyState solve_quadratic_steady(const SystemParams& p, cplx alpha, QuadraticBranch branch) {
    require_quadratic(p);
    SteadyState s;
    const double abs_alpha = std::abs(alpha);
    if (branch == QuadraticBranch::resonant) {
        s.regime = "quadratic_resonant";
        const double ds = p.detuning_from_shifted();
        const double denom = ds * ds + 0.25 * p.kappa * p.kappa;
        s.n_bar = abs_alpha * abs_alpha / denom;
        s.m_bar = abs_alpha > 0.0 ? 1.0 : 0.0;
        s.d_bar = 0.0;
        s.residual = abs_alpha > 0.0 ? std::abs(s.n_bar * denom - abs_alpha * abs_alpha) / (abs_alpha * abs_alpha)
                                     : 0.0;
    } else {
        s.regime = "quadratic_off_resonant";
        if (abs_alpha > 0.0) {
            const double sum = p.g1 + p.g2;
            const double c1 = p.g1 * p.g1 / sum;
            const double c0 = 2.0 * abs_alpha * p.g1 * p.g1 / (sum * sum);
            // Polish in x = √n where the quartic is a polynomial.
            auto fx = [&](double x) { return 2.0 * abs_alpha * x * x * x * x + c1 * x - c0; };
            auto dfx = [&](double x) { return 8.0 * abs_alpha * x * x * x + c1; };
            const double n0 = quadratic_root_bisection(p, abs_alpha);
            const double xhi = std::sqrt(p.g1 / sum + 1.0);
            const double x = poly::newton_polish(fx, dfx, std::sqrt(n0), 0.0, xhi);
            s.n_bar = x * x;
            s.m_bar = 2.0 * abs_alpha / (sum * x);
            s.d_bar = 0.5 * std::sqrt(std::max(0.0, s.m_bar * s.m_bar - s.m_bar));
            s.residual = std::abs(fx(x)) / c0;
        }
    }
    s.all_real_roots = {s.n_bar};
    s.b_bar = mirror_displacement(s.n_bar, p);
    s.f = 2.0 * p.g0 * s.b_bar.real();
    s.a_bar = std::sqrt(s.n_bar);
    s.psi = s.m_bar * s.n_bar;
    return s;
}

double cross_population(const SteadyState& s) { return s.m_bar * s.n_bar; }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = k * sxx - sx * sx;
    if (den == 0.0) throw ValidationError("loglog_slope: degenerate abscissa");
    return (k * sxy - sx * sy) / den;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw ValidationError("geometric_grid: need 0 < lo <= hi, points >= 1");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, t);
    }
    return out;
}

namespace {

PumpSweep finish_sweep(const std::vector<double>& alphas, std::vector<SteadyState> states) {
    PumpSweep out;
    out.alphas = alphas;
    out.states = std::move(states);
    std::vector<double> xs, psi, n;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] > 0.0 && out.states[i].psi > 0.0) {
            xs.push_back(alphas[i]);
            psi.push_back(out.states[i].psi);
            n.push_back(out.states[i].n_bar);
        }
    }
    if (xs.size() >= 2) {
        out.psi_exponent = loglog_slope(xs, psi);
        out.n_exponent = loglog_slope(xs, n);
    }
    return out;
}

}  // namespace

PumpSweep sweep_quadratic(const SystemParams& p, const std::vector<double>& alphas, QuadraticBranch branch) {
    std::vector<SteadyState> states(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t i) { states[i] = solve_quadratic_steady(p, alphas[i], branch); });
    return finish_sweep(alphas, std::move(states));
}

PumpSweep sweep_cubic(const SystemParams& p, const std::vector<double>& alphas, CubicConvention conv) {
    std::vector<SteadyState> states(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t i) { states[i] = solve_cubic_steady(p, alphas[i], conv); });
    return finish_sweep(alphas, std::move(states));
}

MaskingScan masking_scan(const SystemParams& p, const std::vector<double>& alphas, CubicConvention conv) {
    if (alphas.size() < 4) throw ValidationError("masking_scan: need at least 4 pump values");
    MaskingScan out;
    out.alphas = alphas;
    const auto quad = sweep_quadratic(p, alphas, QuadraticBranch::resonant);
    const auto cub = sweep_cubic(p, alphas, conv);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        out.n_quadratic.push_back(quad.states[i].n_bar);
        out.n_cubic.push_back(cub.states[i].n_bar);
    }
    const std::size_t half = alphas.size() / 2;
    const std::vector<double> xs(alphas.begin() + static_cast<long>(half), alphas.end());
    const std::vector<double> yq(out.n_quadratic.begin() + static_cast<long>(half), out.n_quadratic.end());
    const std::vector<double> yc(out.n_cubic.begin() + static_cast<long>(half), out.n_cubic.end());
    out.slope_quadratic = loglog_slope(xs, yq);
    out.slope_cubic = loglog_slope(xs, yc);
    // Power laws n ≈ A x^s through the last sample of each branch.
    const double lx = std::log(xs.back());
    const double aq = std::log(yq.back()) - out.slope_quadratic * lx;
    const double ac = std::log(yc.back()) - out.slope_cubic * lx;
    if (out.slope_quadratic > out.slope_cubic) {
        out.crossover_alpha = std::exp((ac - aq) / (out.slope_quadratic - out.slope_cubic));
        bool ok = false;
        double prev_ratio = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (alphas[i] < out.crossover_alpha) continue;
            const double ratio = out.n_quadratic[i] / out.n_cubic[i];
            if (!(ratio > 1.0) || (!first && ratio < prev_ratio * (1.0 - 1e-12))) {
                ok = false;
                break;
            }
            ok = true;
            first = false;
            prev_ratio = ratio;
        }
        out.overtakes = ok;
    }
    return out;
}

}  // namespace optomech
