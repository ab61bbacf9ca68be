#include "hetcache/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <thread>

#include "hetcache/error.hpp"

namespace hetcache::opt {

using analytics::LfTerm;
using analytics::SbsTierModel;
using analytics::Variant;

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> popularity_of(const ContentConfig& content, const std::vector<int>& nc) {
  std::vector<double> a;
  a.reserve(nc.size());
  for (int n : nc) a.push_back(content.a(n));
  return a;
}

// Bracketing root of a monotone function; returns the final bracket.
template <class F>
std::pair<double, double> bracket_root(F&& f, double lo, double hi, double flo, double fhi,
                                       double width) {
  auto tol = [width](double a, double b) { return std::fabs(b - a) <= width; };
  std::uintmax_t iters = 200;
  return boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
}

bool better(double obj, const std::vector<int>& nc, double best, const std::vector<int>& best_nc) {
  double slack = 1e-12 * std::max(std::fabs(best), 1e-300);
  if (obj > best + slack) return true;
  return std::fabs(obj - best) <= slack && nc < best_nc;
}

// Models depend on (N_c, mu) only, so candidates share them.
class ModelCache {
 public:
  ModelCache(const NetworkParams& net, int C2, double mu, bool upper)
      : net_(net), C2_(C2), mu_(mu), upper_(upper) {}
  const SbsTierModel& get(int Nc) {
    auto it = models_.find(Nc);
    if (it == models_.end())
      it = models_.emplace(Nc, std::make_unique<SbsTierModel>(net_, Nc, C2_, mu_, upper_)).first;
    return *it->second;
  }

 private:
  NetworkParams net_;
  int C2_;
  double mu_;
  bool upper_;
  std::map<int, std::unique_ptr<SbsTierModel>> models_;
};

// Runs f(i) for i in [0, n), on cfg.jobs threads; f writes to its own slot.
template <class F>
void parallel_for(int n, int jobs, F&& f) {
  if (jobs <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int j = 0; j < std::min(jobs, n); ++j)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) f(i);
    });
}

// T-step for a candidate under either bound.
using TStep = std::function<std::vector<double>(const SbsTierModel&, std::span<const double>, int,
                                                std::size_t)>;

Solution enumerate_with(double mu, const NetworkParams& net, const ContentConfig& content,
                        const OptimizerConfig& cfg, Variant v, const TStep& tstep) {
  auto cands = enumerate_candidates(content);
  const int C2 = content.C2;
  ModelCache cache(net, C2, mu, v == Variant::Upper);
  std::vector<char> ok(cands.size(), 0);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    int Nc = static_cast<int>(cands[i].size());
    if (mu <= mu_max(net, Nc, C2) + 1e-12) {
      ok[i] = 1;
      cache.get(Nc);  // build before going parallel
    }
  }
  std::vector<std::vector<double>> Ts(cands.size());
  std::vector<double> obj(cands.size(), -1.0);
  parallel_for(static_cast<int>(cands.size()), cfg.jobs, [&](int i) {
    if (!ok[i]) return;
    const auto& model = cache.get(static_cast<int>(cands[i].size()));
    auto a = popularity_of(content, cands[i]);
    Ts[i] = tstep(model, a, C2, i);
    obj[i] = objective(net, content, cands[i], Ts[i], model, v);
  });
  int best = -1;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    if (!ok[i]) continue;
    if (best < 0 || better(obj[i], cands[i], obj[best], cands[best])) best = i;
  }
  if (best < 0) throw Error(ErrorCode::InvalidParam, "no candidate admits this IN coefficient");
  Solution s;
  s.policy = {cands[best], Ts[best], mu};
  s.objective = obj[best];
  return s;
}

// Algorithm-1 style alternation between the discrete step and the mu search.
Solution alternate_with(const NetworkParams& net, const ContentConfig& content,
                        const OptimizerConfig& cfg, Variant v,
                        const std::function<Solution(double)>& discrete) {
  // With a single candidate the discrete step cannot change anything after the
  // first mu search.
  const bool single = enumerate_candidates(content).size() == 1;
  double mu = 1.0;
  Solution cur;
  bool have = false;
  for (int it = 0; it < cfg.alt_max_iters; ++it) {
    double before = have ? cur.objective : -1.0;
    Solution d = discrete(mu);
    if (!have || d.objective >= cur.objective) {
      d.trace = std::move(cur.trace);
      cur = std::move(d);
      have = true;
    }
    double m = mu_line_search(cur.policy.nc_set, cur.policy.T, net, content, cfg, v);
    SbsTierModel model(net, cur.policy.Nc(), content.C2, m, v == Variant::Upper);
    double o = objective(net, content, cur.policy.nc_set, cur.policy.T, model, v);
    if (o >= cur.objective) {
      cur.policy.mu = m;
      cur.objective = o;
    }
    mu = cur.policy.mu;
    cur.trace.push_back(cur.objective);
    cur.iterations = it + 1;
    if (single) break;
    if (before > 0 && cur.objective - before <= cfg.alt_tol * std::fabs(before)) break;
  }
  return cur;
}

}  // namespace

void OptimizerConfig::validate() const {
  auto bad = [](const char* w) { throw Error(ErrorCode::InvalidParam, w); };
  if (!(bisect_tol > 0) || !(mu_tol > 0) || !(alt_tol > 0) || !(ccp_tol > 0))
    bad("optimizer tolerances must be positive");
  if (mu_grid < 2) bad("mu_grid must be >= 2");
  if (alt_max_iters < 1 || ccp_max_iters < 1 || ccp_restarts < 1 || jobs < 1)
    bad("optimizer counts must be >= 1");
}

double mu_max(const NetworkParams& net, int Nc, int C2) {
  double dA = static_cast<double>(net.M2) / net.U2;
  double dF = static_cast<double>(Nc) / C2;
  if (dA >= dF) return std::sqrt(dA / dF);
  return std::sqrt((dA - 1.0) / (dF - 1.0));
}

double objective(const NetworkParams& net, const ContentConfig& content, const std::vector<int>& nc_set,
                 std::span<const double> T, const SbsTierModel& model, Variant v) {
  double s = 0.0;
  for (std::size_t i = 0; i < nc_set.size(); ++i) s += content.a(nc_set[i]) * model.psi2(T[i], v);
  return analytics::ase_from_q(net, analytics::q1(net, content, nc_set), s);
}

Curve::Curve(const std::vector<LfTerm>& terms, int sign) {
  for (const auto& t : terms) {
    if (sign > 0 && !(t.coef > 0)) continue;
    if (sign < 0 && !(t.coef < 0)) continue;
    c_.push_back(t.coef);
    s_.push_back(t.slope);
    o_.push_back(t.offset);
  }
}

double Curve::value(double x) const {
  if (x == 0.0) return 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) v += c_[i] * x / (s_[i] * x + o_[i]);
  return v;
}

double Curve::d1(double x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    double d = s_[i] * x + o_[i];
    v += c_[i] * o_[i] / (d * d);
  }
  return v;
}

double Curve::d2(double x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    double d = s_[i] * x + o_[i];
    v -= 2.0 * c_[i] * o_[i] * s_[i] / (d * d * d);
  }
  return v;
}

std::vector<double> water_fill(std::span<const double> a, std::span<const double> shift, const Curve& g,
                               int C2, double tol) {
  const int n = static_cast<int>(a.size());
  if (n < C2) throw Error(ErrorCode::InfeasibleSum, "fewer candidate files than cache slots");
  if (n == C2) return std::vector<double>(n, 1.0);
  const double g0 = g.d1(0.0), g1 = g.d1(1.0);
  const double xtol = std::min(tol, 1e-13);
  std::vector<double> warm(n, 0.5);

  // Safeguarded Newton for g.d1(x) = y on [0, 1], warm-started from the
  // previous nu; g.d1 is decreasing.
  auto invert = [&](double y, double& x0) {
    if (y >= g0) return 0.0;
    if (y <= g1) return 1.0;
    double lo = 0.0, hi = 1.0, x = std::clamp(x0, 0.0, 1.0);
    for (int it = 0; it < 100 && hi - lo > xtol; ++it) {
      double f = g.d1(x) - y;
      if (f == 0.0) break;
      (f > 0 ? lo : hi) = x;
      double step = f / g.d2(x);
      double xn = x - step;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      bool tiny = std::fabs(xn - x) <= 0.1 * xtol;
      x = xn;
      if (tiny) break;
    }
    x0 = x;
    return x;
  };
  auto solve_at = [&](double nu, std::vector<double>& T) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += (T[i] = invert(nu / a[i] + shift[i], warm[i]));
    return sum;
  };

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n; ++i) {
    lo = std::min(lo, a[i] * (g1 - shift[i]));
    hi = std::max(hi, a[i] * (g0 - shift[i]));
  }
  std::vector<double> Tlo(n), Thi(n);
  double slo = solve_at(lo, Tlo) - C2, shi = solve_at(hi, Thi) - C2;
  if (slo < 0 || shi > 0) throw Error(ErrorCode::InfeasibleSum, "cache sum unreachable in bracket");
  double width = std::max(tol, 1e-15) * std::max(std::fabs(lo), std::fabs(hi)) * 1e-6;
  auto r = bracket_root([&](double nu) { return solve_at(nu, Thi) - C2; }, lo, hi, slo, shi, width);
  // Blend the two bracket ends so the sum hits C2 exactly; both are box feasible.
  slo = solve_at(r.first, Tlo);
  shi = solve_at(r.second, Thi);
  double theta = slo - shi > 0 ? (C2 - shi) / (slo - shi) : 1.0;
  theta = std::clamp(theta, 0.0, 1.0);
  std::vector<double> T(n);
  for (int i = 0; i < n; ++i) T[i] = std::clamp(theta * Tlo[i] + (1 - theta) * Thi[i], 0.0, 1.0);
  return T;
}

std::vector<double> kkt_continuous(const SbsTierModel& model, std::span<const double> a, int C2,
                                   const OptimizerConfig& cfg) {
  std::vector<double> zero(a.size(), 0.0);
  return water_fill(a, zero, Curve(model.lower_terms()), C2, cfg.bisect_tol);
}

std::vector<double> kkt_continuous(const std::vector<int>& nc_set, double mu, const NetworkParams& net,
                                   const ContentConfig& content, const OptimizerConfig& cfg) {
  SbsTierModel model(net, static_cast<int>(nc_set.size()), content.C2, mu, false);
  return kkt_continuous(model, popularity_of(content, nc_set), content.C2, cfg);
}

std::vector<double> ccp_solve(const SbsTierModel& model, std::span<const double> a, int C2,
                              std::vector<double> T, const OptimizerConfig& cfg,
                              std::vector<double>* trace) {
  const Curve eta1(model.upper_terms(), 1), eta2(model.upper_terms(), -1);  // eta2 keeps the negative terms
  const int n = static_cast<int>(a.size());
  auto value = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * (eta1.value(x[i]) + eta2.value(x[i]));
    return s;
  };
  double prev = value(T);
  if (trace) trace->push_back(prev);
  std::vector<double> shift(n), y(n);
  for (int it = 0; it < cfg.ccp_max_iters; ++it) {
    // eta2 (the negative terms) is concave; linearizing it at the current
    // point leaves a concave surrogate that minorizes the bound.
    for (int i = 0; i < n; ++i) shift[i] = -eta2.d1(T[i]);
    auto next = water_fill(a, shift, eta1, C2, cfg.bisect_tol);
    double v = value(next);
    if (v < prev - 1e-9 * std::max(1.0, std::fabs(prev)))
      throw Error(ErrorCode::NonMonotoneCCP, "CCP objective decreased");
    // The plain iteration crawls when eta1 and eta2 nearly cancel. Search
    // along the last move with doubling steps; keep the best point found.
    if (cfg.ccp_extrapolate) {
      for (double beta = 1.0; beta <= 1e6; beta *= 2.0) {
        for (int i = 0; i < n; ++i) y[i] = next[i] + beta * (next[i] - T[i]);
        auto cand = project_capped_simplex(y, C2);
        double vc = value(cand);
        if (!(vc > v)) break;
        next = std::move(cand);
        v = vc;
      }
    }
    double move = 0.0;
    for (int i = 0; i < n; ++i) move = std::max(move, std::fabs(next[i] - T[i]));
    T = std::move(next);
    if (trace) trace->push_back(v);
    // Near a flat optimum the objective gain drops below ccp_tol long before
    // the iterate settles, so both must be small.
    bool done = v - prev <= cfg.ccp_tol * std::fabs(prev) && move <= std::sqrt(cfg.ccp_tol);
    prev = std::max(prev, v);
    if (done) break;
  }
  return T;
}

std::vector<std::vector<int>> enumerate_candidates(const ContentConfig& content) {
  const int N2 = content.N2(), C2 = content.C2;
  std::vector<std::vector<int>> out;
  std::vector<int> all(N2);
  std::iota(all.begin(), all.end(), content.N1 + 1);
  if (N2 >= C2) out.push_back(all);
  for (int Nb = 1; Nb <= N2 - C2; ++Nb)
    for (int s = 0; s + Nb <= N2; ++s) {
      std::vector<int> nc;
      nc.reserve(N2 - Nb);
      for (int i = 0; i < N2; ++i)
        if (i < s || i >= s + Nb) nc.push_back(all[i]);
      out.push_back(std::move(nc));
    }
  return out;
}

Solution discrete_enumerate(double mu, const NetworkParams& net, const ContentConfig& content,
                            const OptimizerConfig& cfg) {
  auto s = enumerate_with(mu, net, content, cfg, Variant::Lower,
                          [&](const SbsTierModel& m, std::span<const double> a, int C2, std::size_t) {
                            return kkt_continuous(m, a, C2, cfg);
                          });
  s.method = "discrete";
  return s;
}

double mu_line_search(const std::vector<int>& nc_set, std::span<const double> T, const NetworkParams& net,
                      const ContentConfig& content, const OptimizerConfig& cfg, Variant v) {
  const int C2 = content.C2;
  const double hi = mu_max(net, static_cast<int>(nc_set.size()), C2);
  auto f = [&](double mu) {
    SbsTierModel m(net, static_cast<int>(nc_set.size()), C2, mu, v == Variant::Upper);
    return objective(net, content, nc_set, T, m, v);
  };
  if (hi <= 0.0) return 0.0;
  std::vector<double> grid(cfg.mu_grid);
  for (int i = 0; i < cfg.mu_grid; ++i) grid[i] = hi * i / (cfg.mu_grid - 1);
  if (hi > 1.0) grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  std::vector<double> val(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) val[i] = f(grid[i]);
  auto [mn, mx] = std::minmax_element(val.begin(), val.end());
  if (*mx - *mn <= 1e-12 * std::fabs(*mx)) return 0.5 * hi;
  std::size_t b = mx - val.begin();
  double lo_b = grid[b > 0 ? b - 1 : 0], hi_b = grid[std::min(b + 1, grid.size() - 1)];
  // Golden-section refinement inside the neighbouring grid cells.
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi_b - r * (hi_b - lo_b), x2 = lo_b + r * (hi_b - lo_b);
  double f1 = f(x1), f2 = f(x2);
  while (hi_b - lo_b > cfg.mu_tol) {
    if (f1 >= f2) {
      hi_b = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi_b - r * (hi_b - lo_b);
      f1 = f(x1);
    } else {
      lo_b = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo_b + r * (hi_b - lo_b);
      f2 = f(x2);
    }
  }
  double best = grid[b], fb = val[b];
  if (f1 > fb) best = x1, fb = f1;
  if (f2 > fb) best = x2, fb = f2;
  return best;
}

Solution alternate(const NetworkParams& net, const ContentConfig& content, const OptimizerConfig& cfg) {
  net.validate();
  content.validate();
  cfg.validate();
  auto s = alternate_with(net, content, cfg, Variant::Lower,
                          [&](double mu) { return discrete_enumerate(mu, net, content, cfg); });
  s.method = "proposed";
  annotate(s, net, content);
  return s;
}

Solution ccp_upper(const NetworkParams& net, const ContentConfig& content, const OptimizerConfig& cfg) {
  net.validate();
  content.validate();
  cfg.validate();
  Solution best;
  bool have = false;
  for (int r = 0; r < cfg.ccp_restarts; ++r) {
    auto discrete = [&](double mu) {
      return enumerate_with(
          mu, net, content, cfg, Variant::Upper,
          [&](const SbsTierModel& m, std::span<const double> a, int C2, std::size_t idx) {
            std::uint64_t seed = mix(mix(cfg.seed) ^ (static_cast<std::uint64_t>(r) << 32) ^ idx);
            return ccp_solve(m, a, C2, random_feasible(static_cast<int>(a.size()), C2, seed), cfg);
          });
    };
    auto s = alternate_with(net, content, cfg, Variant::Upper, discrete);
    if (!have || s.objective > best.objective) {
      best = std::move(s);
      have = true;
    }
  }
  best.method = "upper";
  annotate(best, net, content);
  return best;
}

namespace {
Solution finish_baseline(std::string name, std::vector<int> nc, std::vector<double> T,
                         const NetworkParams& net, const ContentConfig& content,
                         const OptimizerConfig& cfg) {
  Solution s;
  s.method = std::move(name);
  double mu = mu_line_search(nc, T, net, content, cfg);
  s.policy = {std::move(nc), std::move(T), mu};
  annotate(s, net, content);
  s.objective = s.ase_lower;
  s.trace = {s.objective};
  s.iterations = 1;
  return s;
}
}  // namespace

Solution baseline_mpc(const NetworkParams& net, const ContentConfig& content, const OptimizerConfig& cfg) {
  net.validate();
  content.validate();
  require(content.N2() >= content.C2, ErrorCode::InvalidParam, "MPC needs N2 >= C2");
  std::vector<int> nc(content.C2);
  std::iota(nc.begin(), nc.end(), content.N1 + 1);
  return finish_baseline("mpc", nc, std::vector<double>(content.C2, 1.0), net, content, cfg);
}

Solution baseline_udc(const NetworkParams& net, const ContentConfig& content, const OptimizerConfig& cfg) {
  net.validate();
  content.validate();
  int Nc = content.N2() - content.Cb;
  require(Nc >= content.C2, ErrorCode::InvalidParam, "UDC needs N2 - Cb >= C2");
  std::vector<int> nc(Nc);
  std::iota(nc.begin(), nc.end(), content.N1 + 1);
  return finish_baseline("udc", nc, std::vector<double>(Nc, static_cast<double>(content.C2) / Nc), net,
                         content, cfg);
}

std::vector<double> project_capped_simplex(std::span<const double> y, double total) {
  const int n = static_cast<int>(y.size());
  require(total >= 0 && total <= n, ErrorCode::InfeasibleSum, "capped simplex is empty");
  auto sum_at = [&](double s) {
    double t = 0.0;
    for (double v : y) t += std::clamp(v - s, 0.0, 1.0);
    return t;
  };
  double lo = *std::min_element(y.begin(), y.end()) - 1.0;
  double hi = *std::max_element(y.begin(), y.end());
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::fabs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    (sum_at(mid) > total ? lo : hi) = mid;
  }
  std::vector<double> x(n);
  double slo = sum_at(lo), shi = sum_at(hi);
  double th = slo - shi > 0 ? (total - shi) / (slo - shi) : 0.0;
  for (int i = 0; i < n; ++i)
    x[i] = th * std::clamp(y[i] - lo, 0.0, 1.0) + (1 - th) * std::clamp(y[i] - hi, 0.0, 1.0);
  return x;
}

std::vector<double> objective_gradient(const SbsTierModel& model, std::span<const double> a,
                                       std::span<const double> T, double h, Variant v) {
  std::vector<double> g(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    double lo = std::max(0.0, T[i] - h), hi = std::min(1.0, T[i] + h);
    g[i] = a[i] * (model.psi2(hi, v) - model.psi2(lo, v)) / (hi - lo);
  }
  return g;
}

std::vector<double> projected_gradient(const std::vector<int>& nc_set, double mu, const NetworkParams& net,
                                       const ContentConfig& content, Variant v, int max_iters) {
  const int n = static_cast<int>(nc_set.size()), C2 = content.C2;
  if (n == C2) return std::vector<double>(n, 1.0);
  SbsTierModel model(net, n, C2, mu, v == Variant::Upper);
  auto a = popularity_of(content, nc_set);
  auto f = [&](const std::vector<double>& T) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * model.psi2(T[i], v);
    return s;
  };
  std::vector<double> T(n, static_cast<double>(C2) / n);
  double fx = f(T), step = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    auto g = objective_gradient(model, a, T, 1e-7, v);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    if (step < 0) step = 0.1 / gmax;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = T[i] + step * g[i];
      auto x = project_capped_simplex(y, C2);
      double dir = 0.0, move = 0.0;
      for (int i = 0; i < n; ++i) {
        dir += g[i] * (x[i] - T[i]);
        move = std::max(move, std::fabs(x[i] - T[i]));
      }
      if (move < 1e-12) return T;  // stationary
      double fn = f(x);
      if (fn >= fx + 1e-4 * dir) {
        accepted = true;
        T = std::move(x);
        if (fn - fx <= 1e-15 * std::fabs(fx)) return T;
        fx = fn;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return T;  // no ascent direction left at machine precision
  }
  throw Error(ErrorCode::MaxIters, "projected gradient did not converge");
}

std::vector<double> random_feasible(int Nc, int C2, std::uint64_t seed) {
  require(Nc >= C2 && C2 >= 1, ErrorCode::InfeasibleSum, "need Nc >= C2 >= 1");
  if (Nc == C2) return std::vector<double>(Nc, 1.0);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(Nc);
  for (int tries = 0; tries < 1000; ++tries) {
    double s = 0.0;
    for (double& v : x) s += (v = e(rng));
    bool ok = true;
    for (double& v : x) ok &= (v = v / s * C2) <= 1.0;
    if (ok) return x;
  }
  return project_capped_simplex(x, C2);
}

void annotate(Solution& s, const NetworkParams& net, const ContentConfig& content) {
  auto r = analytics::analyze(net, content, s.policy);
  s.ase_exact = r.ase;
  s.ase_lower = r.ase_lower;
  s.ase_upper = r.ase_upper;
}

}  // namespace hetcache::opt
