#include "hetcache/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetcache/error.hpp"

namespace hetcache::analytics {

using specfun::SpecFunConfig;

double clamp_probability(double p, const char* what) {
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9))
    throw Error(ErrorCode::DegenerateInput,
                std::string(what) + " left [0,1]: " + std::to_string(p));
  return std::clamp(p, 0.0, 1.0);
}

double mean_theta(int Nc, int C2, int U2, double mu) {
  require(C2 >= 1 && Nc >= C2 && U2 >= 1, ErrorCode::InvalidParam,
          "mean_theta needs Nc >= C2 >= 1 and U2 >= 1");
  require(mu >= 0.0, ErrorCode::InvalidParam, "mu must be nonnegative");
  double m2 = mu * mu;
  return std::max(0.0, Nc * U2 * m2 / C2 - std::min(m2, 1.0) * U2);
}

double theta_pmf(int theta, double theta_bar) {
  require(theta >= 0 && theta_bar >= 0.0, ErrorCode::InvalidParam, "theta_pmf arguments");
  if (theta_bar == 0.0) return theta == 0 ? 1.0 : 0.0;
  return std::exp(theta * std::log(theta_bar) - theta_bar - std::lgamma(theta + 1.0));
}

double in_miss_prob(int M2, int U2, double theta_bar) {
  require(M2 >= U2 && U2 >= 1, ErrorCode::InvalidParam, "in_miss_prob needs M2 >= U2 >= 1");
  const int K = M2 - U2;
  if (K == 0) return 1.0;
  if (theta_bar == 0.0) return 0.0;
  const int cap = static_cast<int>(std::ceil(10.0 * (theta_bar + M2)));
  double eps = 0.0;
  for (int th = K; th <= std::max(cap, K + 1); ++th) {
    double p = theta_pmf(th, theta_bar);
    eps += (th + 1.0 - K) / (th + 1.0) * p;
    if (th > theta_bar) {
      // geometric bound on the remaining Poisson mass
      double tail = theta_pmf(th + 1, theta_bar) / (1.0 - theta_bar / (th + 2.0));
      if (tail < 1e-12) break;
    }
  }
  return clamp_probability(eps, "epsilon");
}

std::vector<double> toeplitz_coeffs(double T, double w0, std::span<const double> w, int D) {
  require(D >= 1, ErrorCode::InvalidParam, "toeplitz_coeffs needs D >= 1");
  require(static_cast<int>(w.size()) >= D - 1, ErrorCode::InvalidParam,
          "toeplitz_coeffs needs D-1 off-diagonal weights");
  const double diag = T + w0;
  if (!(diag > 0.0)) throw Error(ErrorCode::DegenerateInput, "T + w0 must be positive");
  std::vector<double> q(D);
  q[0] = T / diag;
  for (int m = 1; m < D; ++m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += w[k - 1] * q[m - k];
    q[m] = s / diag;
  }
  return q;
}

double psi1(const NetworkParams& net, const SpecFunConfig& cfg) {
  return 1.0 / (1.0 + specfun::capital_f(net.tau, net.U1, net.alpha1, cfg));
}

double q1(const NetworkParams& net, const ContentConfig& content, const std::vector<int>& nc_set) {
  double mbs = 0.0;
  for (int n = 1; n <= content.N1; ++n) mbs += content.a(n);
  auto nb = backhaul_files(content, nc_set);
  double bh = 0.0;
  if (!nb.empty()) {
    double xi = std::min(1.0, static_cast<double>(content.Cb) / nb.size());
    for (int n : nb) bh += content.a(n) * xi;
  }
  return clamp_probability((mbs + bh) * psi1(net), "q1");
}

double psi2_special(double T, const NetworkParams& net) {
  require(net.U2 == net.M2, ErrorCode::InvalidParam, "psi2_special needs U2 == M2");
  if (T == 0.0) return 0.0;
  double G = specfun::capital_g(net.tau, net.U2, net.alpha2);
  double F = specfun::capital_f(net.tau, net.U2, net.alpha2);
  return clamp_probability(T / ((1.0 - G + F) * T + G), "psi2_special");
}

double scaled_f(double x, double mu, int U, double alpha, const SpecFunConfig& cfg) {
  if (x == 0.0) return 0.0;
  if (mu == 0.0) return specfun::capital_g(x, U, alpha);
  double arg = x * std::pow(mu, -alpha);
  if (!std::isfinite(arg)) return specfun::capital_g(x, U, alpha);
  return mu * mu * specfun::capital_f(arg, U, alpha, cfg);
}

double scaled_f_tilde(double x, double mu, int k, int U, double alpha, const SpecFunConfig& cfg) {
  if (x == 0.0) return 0.0;
  if (mu == 0.0) return specfun::b_tilde(x, k, U, alpha);
  double arg = x * std::pow(mu, -alpha);
  if (!std::isfinite(arg)) return specfun::b_tilde(x, k, U, alpha);
  return mu * mu * specfun::f_tilde(arg, k, U, alpha, cfg);
}

SbsTierModel::SbsTierModel(const NetworkParams& net, int Nc, int C2, double mu, bool with_upper,
                           const SpecFunConfig& cfg)
    : net_(net), cfg_(cfg), mu_(mu), has_upper_(with_upper) {
  net.validate();
  cfg.validate();
  K_ = net.M2 - net.U2;
  theta_bar_ = mean_theta(Nc, C2, net.U2, mu);
  eps_ = in_miss_prob(net.M2, net.U2, theta_bar_);
  if (K_ == 0)
    p_s_ = 1.0;
  else
    p_s_ = theta_bar_ == 0.0 ? 0.0 : specfun::lower_inc_gamma_reg(K_, theta_bar_, cfg);
  pmf_.resize(K_);
  for (int th = 0; th < K_; ++th) pmf_[th] = theta_pmf(th, theta_bar_);

  const int U = net.U2;
  const double al = net.alpha2, tau = net.tau;
  G_ = specfun::capital_g(tau, U, al);
  F_ = specfun::capital_f(tau, U, al, cfg);
  Fmu_ = scaled_f(tau, mu, U, al, cfg);
  c_.assign(K_ + 1, 0.0);
  Bt_ = Ft_ = Ftmu_ = c_;
  for (int m = 1; m <= K_; ++m) {
    c_[m] = 2.0 * specfun::pochhammer_over_factorial(U, m);
    Bt_[m] = specfun::b_tilde(tau, m, U, al);
    Ft_[m] = specfun::f_tilde(tau, m, U, al, cfg);
    Ftmu_[m] = scaled_f_tilde(tau, mu, m, U, al, cfg);
  }

  const double r21 = rho2(tau);
  const double r11 = rho1(tau, r21);
  for (int th = 0; th < K_; ++th) {
    const int D = K_ + 1 - th;
    double slope = r11, offset = r21;
    for (int m = 1; m < D; ++m) {
      double wgt = c_[m] * (1.0 - static_cast<double>(m) / D);
      double rt = eps_ * Bt_[m] + (1.0 - eps_) * Ftmu_[m];
      slope += wgt * (mu < 1.0 ? rt - Ft_[m] : eps_ * (Bt_[m] - Ft_[m]));
      offset -= wgt * rt;
    }
    lower_.push_back({pmf_[th], slope, offset});
  }
  lower_.push_back({p_s_, r11, r21});

  if (with_upper) {
    for (int th = 0; th < K_; ++th) {
      const int D = K_ + 1 - th;
      const double beta = std::exp(-std::lgamma(D + 1.0) / D);
      double binom = 1.0;
      for (int i = 1; i <= D; ++i) {
        binom = binom * (D - i + 1) / i;
        double s = i * beta * tau;
        double r2 = rho2(s);
        double sign = (i % 2 == 1) ? 1.0 : -1.0;
        upper_.push_back({pmf_[th] * sign * binom, rho1(s, r2), r2});
      }
    }
    upper_.push_back({p_s_, r11, r21});
  }
}

double SbsTierModel::rho2(double s) const {
  return eps_ * specfun::capital_g(s, net_.U2, net_.alpha2) +
         (1.0 - eps_) * scaled_f(s, mu_, net_.U2, net_.alpha2, cfg_);
}

double SbsTierModel::rho1(double s, double r2) const {
  double F = specfun::capital_f(s, net_.U2, net_.alpha2, cfg_);
  if (mu_ < 1.0) return 1.0 - r2 + F;
  return 1.0 - eps_ * specfun::capital_g(s, net_.U2, net_.alpha2) + eps_ * F;
}

const std::vector<LfTerm>& SbsTierModel::upper_terms() const {
  require(has_upper_, ErrorCode::InvalidParam, "model was built without upper-bound terms");
  return upper_;
}

std::vector<double> SbsTierModel::weights(double T) const {
  const bool near = mu_ < 1.0;
  const double a = near ? 1.0 - T : 1.0;
  const double b = near ? 1.0 : eps_;
  std::vector<double> w(K_ + 1);
  w[0] = eps_ * (1.0 - T) * G_ + a * (1.0 - eps_) * Fmu_ + b * T * F_;
  for (int m = 1; m <= K_; ++m)
    w[m] = c_[m] * (eps_ * (1.0 - T) * Bt_[m] + a * (1.0 - eps_) * Ftmu_[m] + b * T * Ft_[m]);
  return w;
}

double SbsTierModel::psi2_exact(double T) const {
  if (T == 0.0) return 0.0;
  auto w = weights(T);
  auto q = toeplitz_coeffs(T, w[0], std::span<const double>(w).subspan(1), K_ + 1);
  double psi = p_s_ * q[0];
  double prefix = 0.0;
  // theta = K - 1 needs two coefficients, theta = 0 needs all K + 1
  for (int m = 0; m <= K_; ++m) {
    prefix += q[m];
    int th = K_ - m;
    if (m >= 1 && th >= 0) psi += pmf_[th] * prefix;
  }
  return clamp_probability(psi, "psi2");
}

namespace {
double sum_terms(const std::vector<LfTerm>& terms, double T) {
  if (T == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& t : terms) s += t.value(T);
  return s;
}
}  // namespace

double SbsTierModel::psi2_lower(double T) const {
  return clamp_probability(sum_terms(lower_, T), "psi2 lower bound");
}

double SbsTierModel::psi2_upper(double T) const {
  return clamp_probability(sum_terms(upper_terms(), T), "psi2 upper bound");
}

double SbsTierModel::psi2(double T, Variant v) const {
  switch (v) {
    case Variant::Exact: return psi2_exact(T);
    case Variant::Lower: return psi2_lower(T);
    case Variant::Upper: return psi2_upper(T);
  }
  return 0.0;
}

double q2(const SbsTierModel& model, const ContentConfig& content, const CachingPolicy& policy,
          Variant v) {
  double s = 0.0;
  for (std::size_t i = 0; i < policy.nc_set.size(); ++i)
    s += content.a(policy.nc_set[i]) * model.psi2(policy.T[i], v);
  return clamp_probability(s, "q2");
}

double ase_from_q(const NetworkParams& net, double q1v, double q2v) {
  return std::log2(1.0 + net.tau) * (net.lambda1 * net.U1 * q1v + net.lambda2 * net.U2 * q2v);
}

AnalyticReport analyze(const NetworkParams& net, const ContentConfig& content,
                       const CachingPolicy& policy, const SpecFunConfig& cfg) {
  net.validate();
  content.validate();
  policy.validate(content);
  SbsTierModel model(net, policy.Nc(), content.C2, policy.mu, true, cfg);
  AnalyticReport r;
  r.psi1 = psi1(net, cfg);
  r.q1 = q1(net, content, policy.nc_set);
  r.q2 = q2(model, content, policy, Variant::Exact);
  r.q2_lower = q2(model, content, policy, Variant::Lower);
  r.q2_upper = q2(model, content, policy, Variant::Upper);
  r.ase1 = ase_from_q(net, r.q1, 0.0);
  r.ase = ase_from_q(net, r.q1, r.q2);
  r.ase_lower = ase_from_q(net, r.q1, r.q2_lower);
  r.ase_upper = ase_from_q(net, r.q1, r.q2_upper);
  r.theta_bar = model.theta_bar();
  r.epsilon = model.epsilon();
  return r;
}

double ase(const NetworkParams& net, const ContentConfig& content, const CachingPolicy& policy,
           Variant v) {
  policy.validate(content);
  SbsTierModel model(net, policy.Nc(), content.C2, policy.mu, v == Variant::Upper);
  return ase_from_q(net, q1(net, content, policy.nc_set), q2(model, content, policy, v));
}

}  // namespace hetcache::analytics
