#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace optomech::poly {

/// Coefficients in ascending order: c[0] + c[1] x + ... + c[n] x^n.
using Coeffs = std::vector<double>;

double evaluate(const Coeffs& c, double x);
double derivative(const Coeffs& c, double x);

/// All roots from the eigenvalues of the companion matrix. Trailing zero
/// leading coefficients are dropped first.
std::vector<std::complex<double>> companion_roots(const Coeffs& c);

/// Real roots in [lo, hi]: companion eigenvalues with negligible imaginary part,
/// Newton-polished, deduplicated and sorted ascending.
std::vector<double> real_roots(const Coeffs& c, double lo, double hi);

/// Bisection to machine precision on a bracket with f(lo), f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi);

/// Safeguarded Newton: steps that leave [lo, hi] fall back to bisection.
double newton_polish(const std::function<double(double)>& f, const std::function<double(double)>& df,
                     double x0, double lo, double hi, int max_iter = 50);

}  // namespace optomech::poly
