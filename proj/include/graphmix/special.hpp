#pragma once

// Scalar special functions used by the model likelihoods and the
// goodness-of-fit machinery.  All functions are deterministic and
// thread-safe; invalid arguments raise std::domain_error.

namespace graphmix {

// Natural log of the gamma function for x > 0.
// Relative error is below 1e-12 for x >= 0.1.
double log_gamma(double x);

// Derivative of log_gamma for x > 0.
double digamma(double x);

// ln Beta(a, b) = lnG(a) + lnG(b) - lnG(a+b), a > 0, b > 0.
double log_beta(double a, double b);

// ln C(n, k) for integers 0 <= k <= n.
double log_choose(long long n, long long k);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_lower_gamma(double a, double x);

// Survival function of the chi-square distribution with df degrees
// of freedom: Pr(X > x).
double chi_square_sf(double x, double df);

}  // namespace graphmix
