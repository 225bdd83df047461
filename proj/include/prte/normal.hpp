#pragma once

#include <functional>

namespace prte {

// Standard normal density, distribution function and quantile.
// norm_quantile uses Wichura's AS 241 (PPND16) rational approximations
// followed by one Newton polish step; absolute accuracy is well below
// 1e-12 over (0,1).
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);  // throws std::domain_error outside (0,1)

// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance tol.
// Throws prte::NumericError if the recursion cannot reach the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 60);

}  // namespace prte
