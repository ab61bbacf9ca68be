#pragma once

// Special functions used by the coverage analysis: the Gauss hypergeometric
// function on the negative real axis, Beta, the regularized lower incomplete
// gamma function and the composite interference integrals built from them.

namespace hetcache::specfun {

struct SpecFunConfig {
  double series_tol = 1e-12;
  int max_terms = 10000;

  void validate() const;
};

/// 2F1(a, b; c; -x) for x >= 0.
double gauss_2f1_neg(double a, double b, double c, double x, const SpecFunConfig& cfg = {});

/// x^p * 2F1(a, b; c; -x). For large x the power is folded into the
/// asymptotic expansion so that neither factor overflows.
double gauss_2f1_neg_scaled(double a, double b, double c, double x, double p,
                            const SpecFunConfig& cfg = {});

// Individual evaluation routes, exposed so tests can compare them on the
// regions where they overlap.
namespace detail {
/// Defining power series of 2F1(a, b; c; z), |z| < 1.
double hyp2f1_series(double a, double b, double c, double z, const SpecFunConfig& cfg);
/// 2F1(a, b; c; -x) through (1+x)^{-b} 2F1(c-a, b; c; x/(1+x)).
double hyp2f1_pfaff(double a, double b, double c, double x, const SpecFunConfig& cfg);
/// x^p 2F1(a, b; c; -x) through the 1/x connection formula; needs a-b non-integer.
double hyp2f1_large(double a, double b, double c, double x, double p, const SpecFunConfig& cfg);
}  // namespace detail

double beta(double x, double y);

/// (u)_m / m!, i.e. binom(u + m - 1, m) for real u.
double pochhammer_over_factorial(double u, int m);

/// gamma(s, x) / Gamma(s).
double lower_inc_gamma_reg(double s, double x, const SpecFunConfig& cfg = {});

/// F(x) = 2F1(-2/alpha, U; 1 - 2/alpha; -x) - 1.
double capital_f(double x, int U, double alpha, const SpecFunConfig& cfg = {});

/// G(x) = Gamma(1 - 2/alpha) Gamma(U + 2/alpha) / Gamma(U) * x^{2/alpha}; the
/// r -> 0 limit of r^2 F(x r^-alpha).
double capital_g(double x, int U, double alpha);

/// x^k / (alpha k - 2) * 2F1(U + k, k - 2/alpha; k - 2/alpha + 1; -x).
double f_tilde(double x, int k, int U, double alpha, const SpecFunConfig& cfg = {});

/// (1/alpha) x^{2/alpha} B(k - 2/alpha, U + 2/alpha); the r -> 0 limit of
/// r^2 f_tilde(x r^-alpha).
double b_tilde(double x, int k, int U, double alpha);

}  // namespace hetcache::specfun
