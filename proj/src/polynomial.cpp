#include "optomech/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"

namespace optomech::poly {

double evaluate(const Coeffs& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double derivative(const Coeffs& c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
    return acc;
}

std::vector<std::complex<double>> companion_roots(const Coeffs& c_in) {
    Coeffs c = c_in;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() < 2) return {};
    const auto deg = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) {
        throw Error("companion_roots: eigenvalue iteration failed");
    }
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(deg));
    for (Eigen::Index i = 0; i < deg; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw Error("bisect: interval does not bracket a root");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double newton_polish(const std::function<double(double)>& f, const std::function<double(double)>& df, double x0,
                     double lo, double hi, int max_iter) {
    double x = x0;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        const double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        double next = x - fx / d;
        if (!(next >= lo && next <= hi)) next = 0.5 * (x + (next < lo ? lo : hi));
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

std::vector<double> real_roots(const Coeffs& c, double lo, double hi) {
    const auto roots = companion_roots(c);
    auto f = [&](double x) { return evaluate(c, x); };
    auto df = [&](double x) { return derivative(c, x); };
    std::vector<double> out;
    for (const auto& r : roots) {
        const double scale = 1.0 + std::abs(r);
        if (std::abs(r.imag()) > 1e-7 * scale) continue;
        double x = newton_polish(f, df, r.real(), lo - scale, hi + scale);
        if (x < lo || x > hi) continue;
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }),
              out.end());
    return out;
}

}  // namespace optomech::poly
