#include "hetcache/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <math.h>  // lgamma_r
#include <string>
#include <utility>

#include "hetcache/error.hpp"

namespace hetcache::specfun {

namespace {

constexpr double kLargeX = 9.0;
// Direct series is accepted only when its largest term stays within this
// factor of the result; beyond it alternating cancellation eats the digits.
constexpr double kMaxGrowth = 1e4;

bool is_nonpos_integer(double v) { return v <= 0.0 && v == std::nearbyint(v); }

bool near_integer(double v) { return std::fabs(v - std::nearbyint(v)) < 1e-9; }

struct LogGamma {
  double log_abs;
  int sign;  // 0 at a pole, so 1/Gamma vanishes there
};

LogGamma log_gamma(double v) {
  if (is_nonpos_integer(v)) return {std::numeric_limits<double>::infinity(), 0};
  int sign = 1;
  double lg = ::lgamma_r(v, &sign);
  return {lg, sign};
}

struct SeriesResult {
  double sum;
  double max_term;
};

// sum_{n >= first} (a)_n (b)_n / ((c)_n n!) z^n
SeriesResult series_core(double a, double b, double c, double z, int first,
                         const SpecFunConfig& cfg) {
  double term = 1.0;
  double sum = first == 0 ? 1.0 : 0.0;
  double max_term = first == 0 ? 1.0 : 0.0;
  for (int n = 0; n < cfg.max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    if (n + 1 >= first) {
      sum += term;
      max_term = std::max(max_term, std::fabs(term));
    }
    if (term == 0.0) return {sum, max_term};
    double ratio = std::fabs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0)) * z);
    if (ratio < 1.0 && std::fabs(term) <= cfg.series_tol * std::fabs(sum) * (1.0 - ratio))
      return {sum, max_term};
  }
  throw Error(ErrorCode::NonConvergence,
              "2F1 series did not converge in " + std::to_string(cfg.max_terms) + " terms");
}

void check_c(double c) {
  require(!is_nonpos_integer(c), ErrorCode::InvalidParam,
          "2F1: c must not be a nonpositive integer");
}

// 2F1 is symmetric in (a, b); order them so the Pfaff series has positive
// terms whenever that is possible.
std::pair<double, double> pfaff_order(double a, double b, double c) {
  if (c - a < 0.0 && c - b >= 0.0) return {b, a};
  return {a, b};
}

bool use_large(double a, double b, double x) {
  if (near_integer(a - b)) return false;
  double threshold = std::max(kLargeX, 1.0 + 2.0 * std::max(std::fabs(a), std::fabs(b)));
  return x > threshold;
}

}  // namespace

void SpecFunConfig::validate() const {
  require(series_tol > 0.0, ErrorCode::InvalidParam, "series_tol must be positive");
  require(max_terms >= 1, ErrorCode::InvalidParam, "max_terms must be >= 1");
}

namespace detail {

double hyp2f1_series(double a, double b, double c, double z, const SpecFunConfig& cfg) {
  check_c(c);
  require(std::fabs(z) < 1.0, ErrorCode::InvalidParam, "2F1 series needs |z| < 1");
  return series_core(a, b, c, z, 0, cfg).sum;
}

double hyp2f1_pfaff(double a, double b, double c, double x, const SpecFunConfig& cfg) {
  check_c(c);
  require(x >= 0.0, ErrorCode::InvalidParam, "2F1: x must be nonnegative");
  double z = x / (1.0 + x);
  return std::pow(1.0 + x, -b) * series_core(c - a, b, c, z, 0, cfg).sum;
}

double hyp2f1_large(double a, double b, double c, double x, double p, const SpecFunConfig& cfg) {
  check_c(c);
  require(x > 1.0, ErrorCode::InvalidParam, "2F1 connection formula needs x > 1");
  require(!near_integer(a - b), ErrorCode::InvalidParam,
          "2F1 connection formula needs a - b non-integer");
  // 2F1(a,b;c;-x) = G1 x^-a 2F1(a, a-c+1; a-b+1; -1/x) + G2 x^-b 2F1(b, b-c+1; b-a+1; -1/x)
  auto branch = [&](double s, double t) {
    LogGamma gc = log_gamma(c), gts = log_gamma(t - s), gt = log_gamma(t), gcs = log_gamma(c - s);
    if (gt.sign == 0 || gcs.sign == 0) return 0.0;  // reciprocal gamma at a pole
    double lx = std::log(x);
    double log_mag = gc.log_abs + gts.log_abs - gt.log_abs - gcs.log_abs + (p - s) * lx;
    double sign = gc.sign * gts.sign * gt.sign * gcs.sign;
    double inner = series_core(s, s - c + 1.0, s - t + 1.0, -1.0 / x, 0, cfg).sum;
    return sign * std::exp(log_mag) * inner;
  };
  return branch(a, b) + branch(b, a);
}

}  // namespace detail

double gauss_2f1_neg(double a, double b, double c, double x, const SpecFunConfig& cfg) {
  return gauss_2f1_neg_scaled(a, b, c, x, 0.0, cfg);
}

double gauss_2f1_neg_scaled(double a, double b, double c, double x, double p,
                            const SpecFunConfig& cfg) {
  check_c(c);
  require(x >= 0.0 && !std::isnan(x), ErrorCode::InvalidParam, "2F1: x must be nonnegative");
  if (x == 0.0) return p == 0.0 ? 1.0 : (p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  if (std::isinf(x)) throw Error(ErrorCode::InvalidParam, "2F1: x must be finite");
  double scale = p == 0.0 ? 1.0 : std::pow(x, p);
  if (x <= 0.5) {
    auto r = series_core(a, b, c, -x, 0, cfg);
    if (r.max_term <= kMaxGrowth * std::fabs(r.sum)) return scale * r.sum;
  }
  if (use_large(a, b, x)) return detail::hyp2f1_large(a, b, c, x, p, cfg);
  auto [pa, pb] = pfaff_order(a, b, c);
  return scale * detail::hyp2f1_pfaff(pa, pb, c, x, cfg);
}

double beta(double x, double y) {
  require(x > 0.0 && y > 0.0, ErrorCode::InvalidParam, "beta needs positive arguments");
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double pochhammer_over_factorial(double u, int m) {
  require(m >= 0, ErrorCode::InvalidParam, "pochhammer order must be >= 0");
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= (u + i) / (i + 1.0);
  return r;
}

double lower_inc_gamma_reg(double s, double x, const SpecFunConfig& cfg) {
  require(s > 0.0, ErrorCode::InvalidParam, "incomplete gamma needs s > 0");
  require(x >= 0.0, ErrorCode::InvalidParam, "incomplete gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  double log_pref = s * std::log(x) - x - std::lgamma(s);
  if (x < s + 1.0) {
    double term = 1.0 / s, sum = term;
    for (int n = 1; n <= cfg.max_terms; ++n) {
      term *= x / (s + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * cfg.series_tol)
        return std::clamp(sum * std::exp(log_pref), 0.0, 1.0);
    }
    throw Error(ErrorCode::NonConvergence, "incomplete gamma series");
  }
  // Modified Lentz on the continued fraction for the upper tail.
  constexpr double tiny = 1e-300;
  double bb = x + 1.0 - s, cc = 1.0 / tiny, dd = 1.0 / bb, h = dd;
  for (int i = 1; i <= cfg.max_terms; ++i) {
    double an = -i * (i - s);
    bb += 2.0;
    dd = an * dd + bb;
    if (std::fabs(dd) < tiny) dd = tiny;
    cc = bb + an / cc;
    if (std::fabs(cc) < tiny) cc = tiny;
    dd = 1.0 / dd;
    double delta = dd * cc;
    h *= delta;
    if (std::fabs(delta - 1.0) < cfg.series_tol)
      return std::clamp(1.0 - std::exp(log_pref) * h, 0.0, 1.0);
  }
  throw Error(ErrorCode::NonConvergence, "incomplete gamma continued fraction");
}

namespace {
void check_tier(int U, double alpha) {
  require(U >= 1, ErrorCode::InvalidParam, "U must be >= 1");
  require(alpha > 2.0, ErrorCode::InvalidParam, "path-loss exponent must exceed 2");
}
}  // namespace

double capital_f(double x, int U, double alpha, const SpecFunConfig& cfg) {
  check_tier(U, alpha);
  require(x >= 0.0, ErrorCode::InvalidParam, "F: x must be nonnegative");
  if (x == 0.0) return 0.0;
  double d = 2.0 / alpha;
  double a = -d, b = U, c = 1.0 - d;
  // Subtracting the leading 1 loses everything for small x, so sum the tail.
  if (x <= 0.5) {
    auto r = series_core(a, b, c, -x, 1, cfg);
    if (r.max_term <= kMaxGrowth * std::fabs(r.sum)) return std::max(r.sum, 0.0);
  }
  return std::max(gauss_2f1_neg(a, b, c, x, cfg) - 1.0, 0.0);
}

double capital_g(double x, int U, double alpha) {
  check_tier(U, alpha);
  require(x >= 0.0, ErrorCode::InvalidParam, "G: x must be nonnegative");
  if (x == 0.0) return 0.0;
  double d = 2.0 / alpha;
  return std::exp(std::lgamma(1.0 - d) + std::lgamma(U + d) - std::lgamma(U) + d * std::log(x));
}

double f_tilde(double x, int k, int U, double alpha, const SpecFunConfig& cfg) {
  check_tier(U, alpha);
  require(k >= 1, ErrorCode::InvalidParam, "F~: k must be >= 1");
  require(x >= 0.0, ErrorCode::InvalidParam, "F~: x must be nonnegative");
  if (x == 0.0) return 0.0;
  double d = 2.0 / alpha;
  double v = gauss_2f1_neg_scaled(U + k, k - d, k - d + 1.0, x, k, cfg) / (alpha * k - 2.0);
  return std::max(v, 0.0);
}

double b_tilde(double x, int k, int U, double alpha) {
  check_tier(U, alpha);
  require(k >= 1, ErrorCode::InvalidParam, "B~: k must be >= 1");
  require(x >= 0.0, ErrorCode::InvalidParam, "B~: x must be nonnegative");
  if (x == 0.0) return 0.0;
  double d = 2.0 / alpha;
  return std::pow(x, d) / alpha * beta(k - d, U + d);
}

}  // namespace hetcache::specfun
