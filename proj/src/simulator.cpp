#include "hetcache/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "hetcache/error.hpp"

namespace hetcache::sim {

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Uniform bucket grid over a window. Items keep a copy of their position so
// scans stay in one contiguous array.
class Grid {
 public:
  struct Item {
    Point p;
    int id;
  };

  Grid(const Window& w, double cell) : w_(w), cell_(cell) {
    nx_ = std::max(1, static_cast<int>(std::ceil((w.x1 - w.x0) / cell)));
    ny_ = std::max(1, static_cast<int>(std::ceil((w.y1 - w.y0) / cell)));
  }

  static double cell_for(double density, const Window& w) {
    double side = std::max(w.x1 - w.x0, w.y1 - w.y0);
    if (density <= 0) return side;
    return std::clamp(std::sqrt(2.0 / density), 5.0, side);
  }

  void build(const std::vector<Point>& pts, const std::vector<int>& ids) {
    start_.assign(nx_ * ny_ + 1, 0);
    for (int id : ids) ++start_[cell_index(pts[id]) + 1];
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(ids.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (int id : ids) items_[fill[cell_index(pts[id])]++] = {pts[id], id};
  }

  bool empty() const { return items_.empty(); }

  // Nearest item; -1 if the grid is empty.
  int nearest(Point p, double& best) const {
    best = std::numeric_limits<double>::infinity();
    int arg = -1;
    if (items_.empty()) return -1;
    int cx = clampx(p.x), cy = clampy(p.y);
    int kmax = std::max(nx_, ny_);
    for (int k = 0; k <= kmax; ++k) {
      for_ring(cx, cy, k, [&](int c) {
        for (int i = start_[c]; i < start_[c + 1]; ++i) {
          double d = dist(p, items_[i].p);
          if (d < best) {
            best = d;
            arg = items_[i].id;
          }
        }
      });
      if (arg >= 0 && best <= k * cell_) break;
    }
    return arg;
  }

  // Calls f(id, d) for every item strictly closer than r.
  template <class F>
  void within(Point p, double r, F&& f) const {
    int x0 = clampx(p.x - r), x1 = clampx(p.x + r);
    int y0 = clampy(p.y - r), y1 = clampy(p.y + r);
    for (int cy = y0; cy <= y1; ++cy)
      for (int cx = x0; cx <= x1; ++cx) {
        int c = cy * nx_ + cx;
        for (int i = start_[c]; i < start_[c + 1]; ++i) {
          double d = dist(p, items_[i].p);
          if (d < r) f(items_[i].id, d);
        }
      }
  }

 private:
  int clampx(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - w_.x0) / cell_)), 0, nx_ - 1);
  }
  int clampy(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - w_.y0) / cell_)), 0, ny_ - 1);
  }
  int cell_index(Point p) const { return clampy(p.y) * nx_ + clampx(p.x); }

  template <class F>
  void for_ring(int cx, int cy, int k, F&& f) const {
    if (k == 0) {
      f(cy * nx_ + cx);
      return;
    }
    for (int dx = -k; dx <= k; ++dx) {
      int x = cx + dx;
      if (x < 0 || x >= nx_) continue;
      if (cy - k >= 0) f((cy - k) * nx_ + x);
      if (cy + k < ny_) f((cy + k) * nx_ + x);
    }
    for (int dy = -k + 1; dy <= k - 1; ++dy) {
      int y = cy + dy;
      if (y < 0 || y >= ny_) continue;
      if (cx - k >= 0) f(y * nx_ + cx - k);
      if (cx + k < nx_) f(y * nx_ + cx + k);
    }
  }

  Window w_;
  double cell_;
  int nx_, ny_;
  std::vector<int> start_;
  std::vector<Item> items_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Choose min(k, n) of n items uniformly; `forced` entries come first and are
// always kept.
std::vector<int> choose_subset(std::vector<int> pool, int k, Rng& rng, int forced = 0) {
  int n = static_cast<int>(pool.size());
  int take = std::min(k, n);
  for (int i = forced; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  return pool;
}

// Everything fixed across realizations.
struct Scenario {
  NetworkParams net;
  ContentConfig content;
  CachingPolicy policy;
  SimConfig sim;
  Window win, obs, users;
  int K = 0;
  int groups = 0;                 // 0: N1 files, 1: backhaul files, 2 + i: nc_set[i]
  std::vector<int> group_of;      // by file id
  std::vector<double> group_weight;
  std::vector<int> sbs_files, mbs_files;
  std::vector<double> sbs_file_w, mbs_file_w;
  double sbs_share = 0.0;
  std::vector<double> taus;
};

Scenario make_scenario(const NetworkParams& net, const ContentConfig& content,
                       const CachingPolicy& policy, const SimConfig& sim,
                       std::span<const double> taus) {
  Scenario s{net, content, policy, sim, sim.window(), sim.observation(), {}, 0, 0, {}, {}, {}, {}, {}, {}, 0.0, {}};
  const double b = sim.user_buffer;
  s.users = {std::max(s.win.x0, s.obs.x0 - b), std::max(s.win.y0, s.obs.y0 - b),
             std::min(s.win.x1, s.obs.x1 + b), std::min(s.win.y1, s.obs.y1 + b)};
  s.K = net.M2 - net.U2;
  s.groups = 2 + policy.Nc();
  s.group_of.assign(content.N + 1, 1);
  s.group_weight.assign(s.groups, 0.0);
  for (int n = 1; n <= content.N1; ++n) s.group_of[n] = 0;
  for (int i = 0; i < policy.Nc(); ++i) s.group_of[policy.nc_set[i]] = 2 + i;
  for (int n = 1; n <= content.N; ++n) {
    int g = s.group_of[n];
    s.group_weight[g] += content.a(n);
    if (g >= 2) {
      s.sbs_files.push_back(n);
      s.sbs_file_w.push_back(content.a(n));
      s.sbs_share += content.a(n);
    } else {
      s.mbs_files.push_back(n);
      s.mbs_file_w.push_back(content.a(n));
    }
  }
  // backhaul success is capped at Cb / Nb in expectation; weight carries a_n only
  s.taus.assign(taus.begin(), taus.end());
  if (s.taus.empty()) s.taus.push_back(net.tau);
  return s;
}

struct RealizationRecord {
  std::vector<int> trials;     // per group
  std::vector<int> successes;  // per group x tau
  std::vector<int> theta_obs;  // Theta of every SBS in the observation region
  int dropped = 0;
};

struct User {
  Point pos;
  int file;
  int server = -1;
  double r = 0.0;
};

void run_realization(const Scenario& sc, std::uint64_t index, RealizationRecord* rec,
                     RealizationTrace* trace) {
  const auto& net = sc.net;
  const auto& pol = sc.policy;
  const int C2 = sc.content.C2;
  Rng rng(stream_seed(sc.sim.seed, index));

  auto mbs = sample_ppp(net.lambda1, sc.win, rng);
  auto sbs = sample_ppp(net.lambda2, sc.win, rng);
  auto caches = realize_caches(static_cast<int>(sbs.size()), pol, C2, rng);

  std::vector<int> all_sbs(sbs.size());
  std::iota(all_sbs.begin(), all_sbs.end(), 0);
  Grid sbs_grid(sc.win, Grid::cell_for(net.lambda2, sc.win));
  sbs_grid.build(sbs, all_sbs);
  std::vector<std::vector<int>> holders(pol.Nc());
  for (int j = 0; j < static_cast<int>(sbs.size()); ++j)
    for (int slot : caches.of(j)) holders[slot].push_back(j);
  std::vector<Grid> file_grids;
  file_grids.reserve(pol.Nc());
  for (int i = 0; i < pol.Nc(); ++i) {
    file_grids.emplace_back(sc.win, Grid::cell_for(net.lambda2 * std::max(pol.T[i], 1e-3), sc.win));
    file_grids.back().build(sbs, holders[i]);
  }

  // SBS-tier requests: a thinned PPP of users over the user region.
  std::vector<User> su;
  {
    std::discrete_distribution<int> pick(sc.sbs_file_w.begin(), sc.sbs_file_w.end());
    auto pts = sample_ppp(net.lambda_u * sc.sbs_share, sc.users, rng);
    su.reserve(pts.size());
    for (auto p : pts) {
      User u{p, sc.sbs_files[pick(rng)]};
      int g = sc.group_of[u.file] - 2;
      u.server = file_grids[g].nearest(p, u.r);
      if (u.server < 0) {
        ++rec->dropped;
        continue;
      }
      su.push_back(u);
    }
  }

  // Typical SBS users: uniform among requests inside the observation region,
  // at most U2 per SBS so each can be served.
  std::vector<int> typical_s;
  std::vector<int> forced_at(sbs.size(), 0);
  if (!sc.sim.theta_only) {
    std::vector<int> cand;
    for (int i = 0; i < static_cast<int>(su.size()); ++i)
      if (sc.obs.contains(su[i].pos)) cand.push_back(i);
    std::shuffle(cand.begin(), cand.end(), rng);
    for (int i : cand) {
      if (static_cast<int>(typical_s.size()) >= sc.sim.typical_users) break;
      if (forced_at[su[i].server] >= net.U2) continue;
      ++forced_at[su[i].server];
      typical_s.push_back(i);
    }
  }

  // Each SBS serves min(U2, candidates) users; typical users are always among them.
  std::vector<std::vector<int>> cands(sbs.size());
  for (int i : typical_s) cands[su[i].server].push_back(i);
  for (int i = 0; i < static_cast<int>(su.size()); ++i) {
    if (std::find(typical_s.begin(), typical_s.end(), i) != typical_s.end()) continue;
    cands[su[i].server].push_back(i);
  }
  std::vector<int> served;
  for (int j = 0; j < static_cast<int>(sbs.size()); ++j) {
    if (cands[j].empty()) continue;
    for (int i : choose_subset(std::move(cands[j]), net.U2, rng, forced_at[j])) served.push_back(i);
  }
  std::sort(served.begin(), served.end());

  // IN requests to every non-serving SBS strictly inside mu * Z2.
  struct Request {
    int user, sbs;
  };
  std::vector<Request> reqs;
  if (pol.mu > 0.0) {
    for (int i : served) {
      const User& u = su[i];
      sbs_grid.within(u.pos, pol.mu * u.r, [&](int j, double) {
        if (j != u.server) reqs.push_back({i, j});
      });
    }
  }
  std::vector<int> theta(sbs.size(), 0);
  for (auto& r : reqs) ++theta[r.sbs];
  // Each SBS grants min(Theta, K) of its requests uniformly.
  std::vector<std::vector<int>> by_sbs(sbs.size());
  for (int k = 0; k < static_cast<int>(reqs.size()); ++k) by_sbs[reqs[k].sbs].push_back(k);
  std::vector<char> granted(reqs.size(), 0);
  std::vector<int> grants(sbs.size(), 0);
  for (int j = 0; j < static_cast<int>(sbs.size()); ++j) {
    if (by_sbs[j].empty()) continue;
    auto g = choose_subset(by_sbs[j], sc.K, rng);
    grants[j] = static_cast<int>(g.size());
    for (int k : g) granted[k] = 1;
  }

  for (int j = 0; j < static_cast<int>(sbs.size()); ++j)
    if (sc.obs.contains(sbs[j])) rec->theta_obs.push_back(theta[j]);

  if (trace) {
    trace->sbs = sbs;
    trace->theta = theta;
    trace->grants = grants;
    std::vector<int> slot(su.size(), -1);
    for (int i : served) {
      slot[i] = static_cast<int>(trace->served_sbs_users.size());
      trace->served_sbs_users.push_back({su[i].pos, su[i].server, su[i].r, {}, {}});
    }
    for (int k = 0; k < static_cast<int>(reqs.size()); ++k) {
      auto& t = trace->served_sbs_users[slot[reqs[k].user]];
      t.requested.push_back(reqs[k].sbs);
      if (granted[k]) t.granted.push_back(reqs[k].sbs);
    }
  }
  if (sc.sim.theta_only) return;

  const int nt = static_cast<int>(sc.taus.size());
  auto record = [&](int g, double sir, bool ok) {
    ++rec->trials[g];
    for (int t = 0; t < nt; ++t)
      if (ok && sir >= sc.taus[t]) ++rec->successes[g * nt + t];
  };

  // SBS-tier SIR for the typical users.
  std::vector<char> nulled(sbs.size(), 0);
  for (int i : typical_s) {
    const User& u = su[i];
    std::fill(nulled.begin(), nulled.end(), 0);
    for (int k = 0; k < static_cast<int>(reqs.size()); ++k)
      if (reqs[k].user == i && granted[k]) nulled[reqs[k].sbs] = 1;
    int D2 = sc.K + 1 - grants[u.server];
    double I = 0.0;
    for (int j = 0; j < static_cast<int>(sbs.size()); ++j) {
      if (j == u.server || nulled[j]) continue;
      I += gamma_int(net.U2, rng) * std::pow(dist(u.pos, sbs[j]), -net.alpha2);
    }
    double S = gamma_int(D2, rng) * std::pow(u.r, -net.alpha2);
    record(sc.group_of[u.file], I > 0 ? S / I : std::numeric_limits<double>::infinity(), true);
  }

  // MBS tier: N1 files and backhaul files go to the nearest MBS.
  std::vector<int> all_mbs(mbs.size());
  std::iota(all_mbs.begin(), all_mbs.end(), 0);
  Grid mbs_grid(sc.win, Grid::cell_for(net.lambda1, sc.win));
  mbs_grid.build(mbs, all_mbs);
  std::vector<User> mu_;
  if (!sc.mbs_files.empty() && !mbs.empty()) {
    std::discrete_distribution<int> pick(sc.mbs_file_w.begin(), sc.mbs_file_w.end());
    auto pts = sample_ppp(net.lambda_u * (1.0 - sc.sbs_share), sc.users, rng);
    mu_.reserve(pts.size());
    for (auto p : pts) {
      User u{p, sc.mbs_files[pick(rng)]};
      u.server = mbs_grid.nearest(p, u.r);
      mu_.push_back(u);
    }
  }
  std::vector<int> typical_m;
  std::vector<int> forced_m(mbs.size(), 0);
  {
    std::vector<int> cand;
    for (int i = 0; i < static_cast<int>(mu_.size()); ++i)
      if (sc.obs.contains(mu_[i].pos)) cand.push_back(i);
    std::shuffle(cand.begin(), cand.end(), rng);
    for (int i : cand) {
      if (static_cast<int>(typical_m.size()) >= sc.sim.typical_users) break;
      if (forced_m[mu_[i].server] >= net.U1) continue;
      ++forced_m[mu_[i].server];
      typical_m.push_back(i);
    }
  }
  // Backhaul: distinct uncached files requested at the MBS; if more than Cb,
  // a uniform Cb-subset is fetched.
  std::vector<std::vector<int>> nb_req(mbs.size());
  for (auto& u : mu_)
    if (sc.group_of[u.file] == 1) nb_req[u.server].push_back(u.file);
  const int D1 = net.M1 - net.U1 + 1;
  for (int i : typical_m) {
    const User& u = mu_[i];
    bool fetched = true;
    if (sc.group_of[u.file] == 1) {
      auto files = nb_req[u.server];
      std::sort(files.begin(), files.end());
      files.erase(std::unique(files.begin(), files.end()), files.end());
      if (static_cast<int>(files.size()) > sc.content.Cb) {
        auto pickd = choose_subset(files, sc.content.Cb, rng);
        fetched = std::find(pickd.begin(), pickd.end(), u.file) != pickd.end();
      }
    }
    double I = 0.0;
    for (int j = 0; j < static_cast<int>(mbs.size()); ++j) {
      if (j == u.server) continue;
      I += gamma_int(net.U1, rng) * std::pow(dist(u.pos, mbs[j]), -net.alpha1);
    }
    double S = gamma_int(D1, rng) * std::pow(u.r, -net.alpha1);
    record(sc.group_of[u.file], I > 0 ? S / I : std::numeric_limits<double>::infinity(), fetched);
  }
}

}  // namespace

void SimConfig::validate() const {
  auto bad = [](const char* w) { throw Error(ErrorCode::InvalidParam, w); };
  if (!(window_side > 0)) bad("window_side must be positive");
  if (n_realizations < 1) bad("n_realizations must be >= 1");
  if (!(observation_margin >= 0 && observation_margin < window_side / 2))
    bad("observation_margin must lie in [0, window_side/2)");
  if (!(user_buffer >= 0)) bad("user_buffer must be nonnegative");
  if (typical_users < 1) bad("typical_users must be >= 1");
  if (jobs < 1) bad("jobs must be >= 1");
}

Window SimConfig::observation() const {
  double m = observation_margin;
  return {m, m, window_side - m, window_side - m};
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

std::vector<Point> sample_ppp(double density, const Window& w, Rng& rng) {
  require(density >= 0, ErrorCode::InvalidParam, "PPP density must be nonnegative");
  std::vector<Point> pts;
  if (density == 0.0) return pts;
  std::poisson_distribution<long> count(density * w.area());
  std::uniform_real_distribution<double> ux(w.x0, w.x1), uy(w.y0, w.y1);
  long n = count(rng);
  pts.reserve(n);
  for (long i = 0; i < n; ++i) {
    double x = ux(rng);
    pts.push_back({x, uy(rng)});
  }
  return pts;
}

CacheRealization realize_caches(int sbs_count, const CachingPolicy& policy, int C2, Rng& rng) {
  double total = 0.0;
  for (double t : policy.T) {
    if (t < -1e-12 || t > 1.0 + 1e-12)
      throw Error(ErrorCode::InfeasibleMarginals, "caching probability outside [0,1]");
    total += t;
  }
  if (std::fabs(total - C2) > 1e-8)
    throw Error(ErrorCode::InfeasibleMarginals, "caching probabilities must sum to C2");
  // Segment order is reshuffled per SBS; marginals do not depend on the order,
  // and a fixed order would make some C2-subsets unreachable.
  const int n = policy.Nc();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> edge(n + 1, 0.0);
  CacheRealization c;
  c.C2 = C2;
  c.slots.resize(static_cast<std::size_t>(sbs_count) * C2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < sbs_count; ++j) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < n; ++i) edge[i + 1] = edge[i] + policy.T[order[i]];
    edge.back() = C2;  // absorb rounding so u + k always lands in a segment
    double u = unif(rng);
    for (int k = 0; k < C2; ++k) {
      auto it = std::upper_bound(edge.begin(), edge.end(), u + k);
      int pos = std::clamp(static_cast<int>(it - edge.begin()) - 1, 0, n - 1);
      c.slots[static_cast<std::size_t>(j) * C2 + k] = order[pos];
    }
  }
  return c;
}

namespace {
// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cum += s[i];
    double t = (cum - 1.0) / (i + 1.0);
    if (s[i] - t > 0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}
}  // namespace

CombinationProbabilities solve_pi_least_squares(const CachingPolicy& policy, int C2,
                                                long max_combos) {
  const int n = policy.Nc();
  require(C2 >= 1 && C2 <= n, ErrorCode::InvalidParam, "need 1 <= C2 <= Nc");
  double count = std::exp(std::lgamma(n + 1.0) - std::lgamma(C2 + 1.0) - std::lgamma(n - C2 + 1.0));
  if (count > max_combos + 0.5)
    throw Error(ErrorCode::InstanceTooLarge, "too many cache combinations");
  CombinationProbabilities out;
  std::vector<int> comb(C2);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    out.combos.push_back(comb);
    int i = C2 - 1;
    while (i >= 0 && comb[i] == n - C2 + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < C2; ++j) comb[j] = comb[j - 1] + 1;
  }
  const int m = static_cast<int>(out.combos.size());
  auto marginals = [&](const std::vector<double>& p) {
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < m; ++i)
      for (int f : out.combos[i]) r[f] += p[i];
    return r;
  };
  // Accelerated projected gradient; the Lipschitz constant of A^T A is at most
  // C2 times the largest per-file combination count.
  double L = 2.0 * C2 * (count * C2 / n);
  std::vector<double> p(m, 1.0 / m), y = p, prev = p;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    auto r = marginals(y);
    for (int f = 0; f < n; ++f) r[f] -= policy.T[f];
    std::vector<double> next(m);
    for (int i = 0; i < m; ++i) {
      double g = 0.0;
      for (int f : out.combos[i]) g += 2.0 * r[f];
      next[i] = y[i] - g / L;
    }
    project_simplex(next);
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double step = 0.0;
    for (int i = 0; i < m; ++i) {
      y[i] = next[i] + (t - 1.0) / tn * (next[i] - prev[i]);
      step = std::max(step, std::fabs(next[i] - prev[i]));
    }
    prev = next;
    t = tn;
    if (step < 1e-13 && it > 10) break;
  }
  out.p = prev;
  auto r = marginals(out.p);
  for (int f = 0; f < n; ++f) out.residual += (r[f] - policy.T[f]) * (r[f] - policy.T[f]);
  return out;
}

double gamma_int(int k, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double prod = 1.0, acc = 0.0;
  for (int i = 0; i < k; ++i) {
    prod *= 1.0 - unif(rng);  // (0, 1]
    if (prod < 1e-200) {
      acc -= std::log(prod);
      prod = 1.0;
    }
  }
  return acc - std::log(prod);
}

double draw_sir(int D, double r0, std::span<const double> interferer_dist, int U, double alpha,
                Rng& rng) {
  double I = 0.0;
  for (double d : interferer_dist) I += gamma_int(U, rng) * std::pow(d, -alpha);
  double S = gamma_int(D, rng) * std::pow(r0, -alpha);
  return I > 0 ? S / I : std::numeric_limits<double>::infinity();
}

RealizationTrace trace_realization(const NetworkParams& net, const ContentConfig& content,
                                   const CachingPolicy& policy, const SimConfig& sim,
                                   std::uint64_t index) {
  SimConfig s = sim;
  s.theta_only = true;
  auto sc = make_scenario(net, content, policy, s, {});
  RealizationRecord rec;
  RealizationTrace tr;
  run_realization(sc, index, &rec, &tr);
  return tr;
}

SimEstimate estimate(const NetworkParams& net, const ContentConfig& content,
                     const CachingPolicy& policy, const SimConfig& sim,
                     std::span<const double> taus) {
  net.validate();
  content.validate();
  policy.validate(content);
  sim.validate();
  auto sc = make_scenario(net, content, policy, sim, taus);
  const int G = sc.groups, nt = static_cast<int>(sc.taus.size());
  const long R = sim.n_realizations;

  std::vector<RealizationRecord> recs(R);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long r; (r = next.fetch_add(1)) < R;) {
      auto& rec = recs[r];
      rec.trials.assign(G, 0);
      rec.successes.assign(static_cast<std::size_t>(G) * nt, 0);
      run_realization(sc, static_cast<std::uint64_t>(r), &rec, nullptr);
    }
  };
  if (sim.jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < sim.jobs; ++j) pool.emplace_back(worker);
  }

  SimEstimate est;
  std::map<int, long> hist;
  std::vector<long> trials(G, 0), succ(static_cast<std::size_t>(G) * nt, 0);
  for (const auto& rec : recs) {
    est.dropped += rec.dropped;
    for (int th : rec.theta_obs) ++hist[th];
    est.theta_samples += static_cast<long>(rec.theta_obs.size());
    for (int g = 0; g < G; ++g) trials[g] += rec.trials[g];
    for (std::size_t k = 0; k < succ.size(); ++k) succ[k] += rec.successes[k];
  }
  for (auto [th, c] : hist) est.theta_hist[th] = static_cast<double>(c) / est.theta_samples;
  for (long t : trials) est.n_effective += t;
  if (sim.theta_only) return est;

  for (int t = 0; t < nt; ++t) {
    std::vector<double> p(G, 0.0);
    for (int g = 0; g < G; ++g)
      if (trials[g] > 0) p[g] = static_cast<double>(succ[g * nt + t]) / trials[g];
    double q1v = sc.group_weight[0] * p[0] + sc.group_weight[1] * p[1];
    double q2v = 0.0;
    for (int g = 2; g < G; ++g) q2v += sc.group_weight[g] * p[g];
    // Ratio estimators; variance from realization-level linearized residuals.
    double v1 = 0, v2 = 0, v12 = 0;
    for (const auto& rec : recs) {
      double e1 = 0, e2 = 0;
      for (int g = 0; g < G; ++g) {
        if (trials[g] == 0) continue;
        double e = sc.group_weight[g] * (rec.successes[g * nt + t] - p[g] * rec.trials[g]) / trials[g];
        (g < 2 ? e1 : e2) += e;
      }
      v1 += e1 * e1;
      v2 += e2 * e2;
      v12 += e1 * e2;
    }
    const double z = 1.96;
    double tau = sc.taus[t];
    double c1 = std::log2(1 + tau) * net.lambda1 * net.U1, c2 = std::log2(1 + tau) * net.lambda2 * net.U2;
    SimPoint pt;
    pt.tau = tau;
    pt.q1 = {q1v, z * std::sqrt(v1)};
    pt.q2 = {q2v, z * std::sqrt(v2)};
    pt.q = {q1v + q2v, z * std::sqrt(std::max(0.0, v1 + v2 + 2 * v12))};
    pt.ase = {c1 * q1v + c2 * q2v,
              z * std::sqrt(std::max(0.0, c1 * c1 * v1 + c2 * c2 * v2 + 2 * c1 * c2 * v12))};
    est.points.push_back(pt);
  }
  return est;
}

}  // namespace hetcache::sim
