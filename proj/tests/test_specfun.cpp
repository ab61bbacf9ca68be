#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "hetcache/error.hpp"
#include "hetcache/specfun.hpp"

using namespace hetcache;
using namespace hetcache::specfun;

namespace {

constexpr double kPi = std::numbers::pi;

// 2 * int_1^inf (1 - (1 + x v^-alpha)^-U) v dv, after v = 1 + s.
double f_oracle(double x, int U, double alpha) {
  boost::math::quadrature::exp_sinh<double> q;
  auto g = [&](double s) {
    double v = 1.0 + s;
    return 2.0 * (-std::expm1(-U * std::log1p(x * std::pow(v, -alpha)))) * v;
  };
  return q.integrate(g, 1e-13);
}

// (x^k / alpha) * int_0^1 t^{k - 2/alpha - 1} (1 + x t)^{-(U+k)} dt
double f_tilde_oracle(double x, int k, int U, double alpha) {
  boost::math::quadrature::tanh_sinh<double> q;
  double d = 2.0 / alpha;
  auto g = [&](double t) { return std::pow(t, k - d - 1.0) * std::pow(1.0 + x * t, -(U + k)); };
  return std::pow(x, k) / alpha * q.integrate(g, 0.0, 1.0, 1e-13);
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST(Hyp2F1, TrivialAndClosedForm) {
  EXPECT_DOUBLE_EQ(gauss_2f1_neg(-0.5, 1, 0.5, 0.0), 1.0);
  EXPECT_NEAR(gauss_2f1_neg(-0.5, 1, 0.5, 1.0), 1.7853981634, 1e-10);
  for (double x : {0.05, 0.4, 3.0, 25.0, 400.0, 1e6})
    EXPECT_LT(rel(gauss_2f1_neg(-0.5, 1, 0.5, x), 1.0 + std::sqrt(x) * std::atan(std::sqrt(x))),
              1e-11)
        << x;
}

TEST(Hyp2F1, QuadratureOracle) {
  // 2F1(-1/2, 2; 1/2; -x) - 1 is the interference integral with U = 2, alpha = 4.
  for (double x : {0.2, 2.0, 15.0, 300.0})
    EXPECT_LT(rel(gauss_2f1_neg(-0.5, 2, 0.5, x), 1.0 + f_oracle(x, 2, 4.0)), 1e-9) << x;
}

TEST(Hyp2F1, PfaffAgreesWithSeriesOnOverlap) {
  SpecFunConfig cfg;
  const double params[][3] = {{-0.5, 1, 0.5}, {-0.5, 4, 0.5}, {3, 0.5, 1.5},
                              {-2.0 / 3.5, 2, 1 - 2.0 / 3.5}, {5, 1.4286, 2.4286}};
  for (auto& p : params) {
    for (double x = 0.3; x <= 0.9 + 1e-12; x += 0.05) {
      double direct = detail::hyp2f1_series(p[0], p[1], p[2], -x, cfg);
      double pfaff = detail::hyp2f1_pfaff(p[0], p[1], p[2], x, cfg);
      EXPECT_LT(rel(pfaff, direct), 1e-9) << p[0] << " " << p[1] << " x=" << x;
    }
  }
}

TEST(Hyp2F1, ConnectionFormulaAgreesWithPfaff) {
  SpecFunConfig cfg;
  for (double x : {12.0, 40.0, 90.0}) {
    double big = detail::hyp2f1_large(3, 1.5, 2.5, x, 0.0, cfg);
    double pf = detail::hyp2f1_pfaff(1.5, 3, 2.5, x, cfg);
    EXPECT_LT(rel(big, pf), 1e-10) << x;
  }
}

TEST(Hyp2F1, RejectsPoleInC) {
  EXPECT_THROW(gauss_2f1_neg(1, 1, -2.0, 0.5), Error);
  try {
    gauss_2f1_neg(1, 1, 0.0, 0.5);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParam);
  }
}

TEST(Hyp2F1, ReportsNonConvergence) {
  SpecFunConfig cfg;
  cfg.max_terms = 3;
  try {
    gauss_2f1_neg(-0.5, 2, 0.5, 5.0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
  }
}

TEST(CapitalF, Examples) {
  EXPECT_EQ(capital_f(0.0, 1, 4.0), 0.0);
  EXPECT_NEAR(capital_f(1.0, 1, 4.0), kPi / 4, 1e-12);
  EXPECT_LT(rel(capital_f(2.0, 2, 4.0), f_oracle(2.0, 2, 4.0)), 1e-9);
}

TEST(CapitalF, ArctanClosedForm) {
  for (double x : {1e-6, 0.1, 1.0, 10.0, 100.0}) {
    double s = std::sqrt(x);
    EXPECT_LT(rel(capital_f(x, 1, 4.0), s * std::atan(s)), 1e-9) << x;
  }
}

TEST(CapitalF, MatchesQuadratureAcrossTiers) {
  for (int U : {1, 2, 4, 8, 32})
    for (double alpha : {2.5, 3.5, 4.0})
      for (double x : {0.01, 0.3, 1.0, 7.0, 60.0, 5e3})
        EXPECT_LT(rel(capital_f(x, U, alpha), f_oracle(x, U, alpha)), 1e-8)
            << "U=" << U << " alpha=" << alpha << " x=" << x;
}

TEST(CapitalF, NonnegativeAndNondecreasing) {
  for (int U : {1, 3, 8, 32})
    for (double alpha : {2.2, 3.0, 4.0, 5.5}) {
      double prev = 0.0;
      for (int i = 0; i <= 150; ++i) {
        double x = std::pow(10.0, -4.0 + 8.0 * i / 150.0);
        double f = capital_f(x, U, alpha);
        ASSERT_GE(f, 0.0);
        ASSERT_GE(f, prev * (1 - 1e-12)) << "U=" << U << " alpha=" << alpha << " x=" << x;
        prev = f;
      }
    }
}

TEST(CapitalF, ScaledLimitIsG) {
  // r^2 F(x r^-alpha) -> G(x) as r -> 0
  for (int U : {1, 4}) {
    double g = capital_g(1.3, U, 4.0);
    double r = 1e-3;
    EXPECT_LT(rel(r * r * capital_f(1.3 / std::pow(r, 4.0), U, 4.0), g), 1e-5);
  }
}

TEST(CapitalG, Examples) {
  EXPECT_EQ(capital_g(0.0, 2, 4.0), 0.0);
  EXPECT_NEAR(capital_g(1.0, 1, 4.0), kPi / 2, 1e-12);
  EXPECT_NEAR(capital_g(1.0, 2, 4.0), 3 * kPi / 4, 1e-12);
  // G equals the same interference integral taken from 0
  boost::math::quadrature::exp_sinh<double> q;
  double oracle = q.integrate(
      [](double v) { return -2.0 * std::expm1(-3.0 * std::log1p(2.0 * std::pow(v, -3.0))) * v; },
      1e-12);
  EXPECT_LT(rel(capital_g(2.0, 3, 3.0), oracle), 1e-8);
}

TEST(CapitalG, StrictlyIncreasing) {
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    double g = capital_g(0.1 * i, 3, 3.7);
    ASSERT_GT(g, prev);
    prev = g;
  }
}

TEST(FTilde, Examples) {
  EXPECT_EQ(f_tilde(0.0, 1, 2, 4.0), 0.0);
  EXPECT_LT(rel(f_tilde(1.0, 1, 1, 4.0), f_tilde_oracle(1.0, 1, 1, 4.0)), 1e-9);
  EXPECT_LT(rel(f_tilde(3.0, 2, 4, 3.5), f_tilde_oracle(3.0, 2, 4, 3.5)), 1e-9);
}

TEST(FTilde, MatchesQuadratureGrid) {
  for (int k : {1, 2, 5, 12})
    for (int U : {1, 2, 4})
      for (double x : {1e-3, 0.4, 2.0, 30.0, 1e4}) {
        double v = f_tilde(x, k, U, 4.0);
        EXPECT_GE(v, 0.0);
        EXPECT_LT(rel(v, f_tilde_oracle(x, k, U, 4.0)), 1e-8) << k << " " << U << " " << x;
      }
}

TEST(FTilde, ScaledLimitIsBTilde) {
  double r = 1e-3;
  for (int k : {1, 3}) {
    double lim = b_tilde(0.8, k, 2, 4.0);
    EXPECT_LT(rel(r * r * f_tilde(0.8 / std::pow(r, 4.0), k, 2, 4.0), lim), 1e-5);
  }
}

TEST(BTilde, SeriesSumsToG) {
  // sum_m 2 (U)_m/m! B~_m = G. The tail decays like M^{-2/alpha}, so extrapolate
  // from partial sums at M, 4M, 16M.
  auto partial = [](int M) {
    double t = 0.0;
    for (int m = 1; m <= M; ++m) t += 2.0 * pochhammer_over_factorial(2, m) * b_tilde(1.0, m, 2, 4.0);
    return t;
  };
  double s1 = partial(4000), s2 = partial(16000), s3 = partial(64000);
  double r = (s3 - s2) / (s2 - s1);
  double limit = s3 + (s3 - s2) * r / (1.0 - r);
  EXPECT_NEAR(r, 0.5, 1e-2);
  EXPECT_LT(rel(limit, capital_g(1.0, 2, 4.0)), 1e-5);
}

TEST(LowerIncGamma, Examples) {
  EXPECT_EQ(lower_inc_gamma_reg(1, 0), 0.0);
  EXPECT_NEAR(lower_inc_gamma_reg(1, std::log(2.0)), 0.5, 1e-14);
  EXPECT_NEAR(lower_inc_gamma_reg(3, 2), 1 - std::exp(-2.0) * 5, 1e-13);
  EXPECT_NEAR(lower_inc_gamma_reg(3, 2), 0.3233235838, 1e-10);
}

TEST(LowerIncGamma, AgreesWithBoostAndSaturates) {
  for (double s : {0.3, 1.0, 2.0, 4.0, 12.0, 40.0}) {
    double prev = 0.0;
    for (double x = 0.0; x <= 3 * s + 10; x += 0.25) {
      double v = lower_inc_gamma_reg(s, x);
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      ASSERT_GE(v, prev);
      EXPECT_NEAR(v, boost::math::gamma_p(s, x), 1e-12) << s << " " << x;
      prev = v;
    }
    // The upper tail at x = 50 s is e^{-50 s} (50 s)^{s-1} / Gamma(s), below 1e-10 once s >= 1.
    if (s >= 1.0) EXPECT_NEAR(lower_inc_gamma_reg(s, 50 * s), 1.0, 1e-10);
    EXPECT_NEAR(lower_inc_gamma_reg(s, 50 * s), boost::math::gamma_p(s, 50 * s), 1e-14);
  }
}

TEST(Misc, BetaAndPochhammer) {
  EXPECT_NEAR(beta(2, 3), 1.0 / 12, 1e-15);
  EXPECT_NEAR(pochhammer_over_factorial(4, 3), 4.0 * 5 * 6 / 6, 1e-12);
  EXPECT_EQ(pochhammer_over_factorial(2.5, 0), 1.0);
  EXPECT_THROW(beta(0.0, 1.0), Error);
}
