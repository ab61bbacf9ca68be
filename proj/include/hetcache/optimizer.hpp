#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/params.hpp"

namespace hetcache::opt {

struct OptimizerConfig {
  double bisect_tol = 1e-8;  // on nu and on each T_n root
  int mu_grid = 201;
  double mu_tol = 1e-4;
  int alt_max_iters = 50;
  double alt_tol = 1e-6;
  int ccp_max_iters = 100;
  double ccp_tol = 1e-7;
  int ccp_restarts = 5;
  bool ccp_extrapolate = true;  // monotone extrapolation on top of each CCP step
  std::uint64_t seed = 1;  // CCP random starts
  int jobs = 1;

  void validate() const;
};

struct Solution {
  std::string method;
  CachingPolicy policy;
  double objective = 0.0;  // the bound that was optimized (lower or upper ASE)
  double ase_exact = 0.0, ase_lower = 0.0, ase_upper = 0.0;
  std::vector<double> trace;
  int iterations = 0;
};

/// Upper end of the admissible IN coefficient range for a given N_c.
double mu_max(const NetworkParams& net, int Nc, int C2);

/// Lower- or upper-bound ASE for a fixed (nc_set, T) under a prebuilt model.
double objective(const NetworkParams& net, const ContentConfig& content, const std::vector<int>& nc_set,
                 std::span<const double> T, const analytics::SbsTierModel& model,
                 analytics::Variant v);

/// Sum of c T / (s T + o) terms with its first two derivatives. sign > 0 keeps
/// the positive-coefficient terms, sign < 0 the negative ones, 0 keeps all.
class Curve {
 public:
  explicit Curve(const std::vector<analytics::LfTerm>& terms, int sign = 0);
  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  std::vector<double> c_, s_, o_;
};

/// Maximizes sum_n a_n h(T_n) over {0 <= T <= 1, sum T = C2} where h is
/// concave with derivative g.d1. Each file solves a_n (g.d1(T_n) - shift_n) = nu.
std::vector<double> water_fill(std::span<const double> a, std::span<const double> shift, const Curve& g,
                               int C2, double tol);

std::vector<double> kkt_continuous(const analytics::SbsTierModel& model, std::span<const double> a,
                                   int C2, const OptimizerConfig& cfg = {});
std::vector<double> kkt_continuous(const std::vector<int>& nc_set, double mu, const NetworkParams& net,
                                   const ContentConfig& content, const OptimizerConfig& cfg = {});

/// Convex-concave procedure on the upper bound for fixed (N_c, mu). The trace
/// holds sum_n a_n psi2_upper(T_n) after every iteration.
std::vector<double> ccp_solve(const analytics::SbsTierModel& model, std::span<const double> a, int C2,
                              std::vector<double> T0, const OptimizerConfig& cfg,
                              std::vector<double>* trace = nullptr);

/// The N_c candidates of the discrete search: N_2 minus one consecutive block.
std::vector<std::vector<int>> enumerate_candidates(const ContentConfig& content);

Solution discrete_enumerate(double mu, const NetworkParams& net, const ContentConfig& content,
                            const OptimizerConfig& cfg = {});

double mu_line_search(const std::vector<int>& nc_set, std::span<const double> T,
                      const NetworkParams& net, const ContentConfig& content,
                      const OptimizerConfig& cfg = {},
                      analytics::Variant v = analytics::Variant::Lower);

Solution alternate(const NetworkParams& net, const ContentConfig& content,
                   const OptimizerConfig& cfg = {});
Solution ccp_upper(const NetworkParams& net, const ContentConfig& content,
                   const OptimizerConfig& cfg = {});

Solution baseline_mpc(const NetworkParams& net, const ContentConfig& content,
                      const OptimizerConfig& cfg = {});
Solution baseline_udc(const NetworkParams& net, const ContentConfig& content,
                      const OptimizerConfig& cfg = {});

/// Euclidean projection onto {0 <= x <= 1, sum x = total}.
std::vector<double> project_capped_simplex(std::span<const double> y, double total);

/// Central-difference gradient of sum_n a_n psi2(T_n) for the chosen variant.
std::vector<double> objective_gradient(const analytics::SbsTierModel& model, std::span<const double> a,
                                       std::span<const double> T, double h,
                                       analytics::Variant v = analytics::Variant::Exact);

/// Projected-gradient ascent with Armijo backtracking, by default on the exact objective.
std::vector<double> projected_gradient(const std::vector<int>& nc_set, double mu,
                                       const NetworkParams& net, const ContentConfig& content,
                                       analytics::Variant v = analytics::Variant::Exact,
                                       int max_iters = 5000);

/// Random feasible T: uniform on the capped simplex by rejection, projected
/// Dirichlet sample if rejection keeps failing.
std::vector<double> random_feasible(int Nc, int C2, std::uint64_t seed);

/// Fills ase_exact / ase_lower / ase_upper from the analytic model.
void annotate(Solution& s, const NetworkParams& net, const ContentConfig& content);

}  // namespace hetcache::opt
