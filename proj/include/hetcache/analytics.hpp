#pragma once

#include <span>
#include <vector>

#include "hetcache/params.hpp"
#include "hetcache/specfun.hpp"

namespace hetcache::analytics {

enum class Variant { Exact, Lower, Upper };

// --- Interference-nulling statistics --------------------------------------

double mean_theta(int Nc, int C2, int U2, double mu);
/// Poisson pmf, evaluated in log space.
double theta_pmf(int theta, double theta_bar);
/// Probability that an IN request is denied, Poisson tail truncated at 1e-12.
double in_miss_prob(int M2, int U2, double theta_bar);

/// First D coefficients of the inverse of the lower-triangular Toeplitz matrix
/// with diagonal T + w0 and subdiagonals -w[0..], scaled by T. w[k-1] holds w_k.
std::vector<double> toeplitz_coeffs(double T, double w0, std::span<const double> w, int D);

// --- Coverage -----------------------------------------------------------------

double psi1(const NetworkParams& net, const specfun::SpecFunConfig& cfg = {});
double q1(const NetworkParams& net, const ContentConfig& content, const std::vector<int>& nc_set);
double psi2_special(double T, const NetworkParams& net);

/// c * T / (slope * T + offset); both bounds are sums of these.
struct LfTerm {
  double coef;
  double slope;
  double offset;
  double value(double T) const { return coef * T / (slope * T + offset); }
  double deriv(double T) const {
    double d = slope * T + offset;
    return coef * offset / (d * d);
  }
};

// Everything in the SBS-tier coverage that depends on (N_c, mu) but not on
// T_n. Building one of these costs a few dozen hypergeometric evaluations;
// evaluating Psi2 for a given T_n afterwards is cheap.
class SbsTierModel {
 public:
  SbsTierModel(const NetworkParams& net, int Nc, int C2, double mu, bool with_upper = true,
               const specfun::SpecFunConfig& cfg = {});

  double psi2_exact(double T) const;
  double psi2_lower(double T) const;
  double psi2_upper(double T) const;
  double psi2(double T, Variant v) const;

  /// Toeplitz weights w_0..w_K for a given T_n (K = M2 - U2).
  std::vector<double> weights(double T) const;

  const std::vector<LfTerm>& lower_terms() const { return lower_; }
  const std::vector<LfTerm>& upper_terms() const;

  double theta_bar() const { return theta_bar_; }
  double epsilon() const { return eps_; }
  double p_s() const { return p_s_; }
  int K() const { return K_; }
  double mu() const { return mu_; }
  const std::vector<double>& pmf() const { return pmf_; }

 private:
  // The bound constants evaluated at s = i x tau.
  double rho2(double s) const;
  double rho1(double s, double r2) const;

  NetworkParams net_;
  specfun::SpecFunConfig cfg_;
  double mu_;
  int K_;
  double theta_bar_, eps_, p_s_;
  std::vector<double> pmf_;  // p(theta), theta = 0..K-1
  // constants at tau
  double G_, F_, Fmu_;
  std::vector<double> c_, Bt_, Ft_, Ftmu_;  // index m = 1..K (slot 0 unused)
  std::vector<LfTerm> lower_, upper_;
  bool has_upper_;
};

/// mu^2 F(x / mu^alpha), continuous at mu = 0 where it tends to G(x).
double scaled_f(double x, double mu, int U, double alpha, const specfun::SpecFunConfig& cfg = {});
/// mu^2 F~_k(x / mu^alpha), tending to B~_k(x) at mu = 0.
double scaled_f_tilde(double x, double mu, int k, int U, double alpha,
                      const specfun::SpecFunConfig& cfg = {});

double q2(const SbsTierModel& model, const ContentConfig& content, const CachingPolicy& policy,
          Variant v);

struct AnalyticReport {
  double q1 = 0, q2 = 0, q2_lower = 0, q2_upper = 0;
  double ase = 0, ase_lower = 0, ase_upper = 0;
  double ase1 = 0;  // MBS-tier part, common to all variants
  double theta_bar = 0, epsilon = 0, psi1 = 0;
};

double ase_from_q(const NetworkParams& net, double q1, double q2);

AnalyticReport analyze(const NetworkParams& net, const ContentConfig& content,
                       const CachingPolicy& policy, const specfun::SpecFunConfig& cfg = {});
double ase(const NetworkParams& net, const ContentConfig& content, const CachingPolicy& policy,
           Variant v);

/// Clamp float drift into [0, 1]; anything further out than 1e-9 is a bug.
double clamp_probability(double p, const char* what);

}  // namespace hetcache::analytics
