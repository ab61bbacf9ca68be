#include "hetcache/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hetcache/analytics.hpp"
#include "hetcache/error.hpp"

namespace hetcache::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

// Walks one JSON object, remembers which keys were read and rejects the rest,
// so a typo in a key is an error instead of a silently ignored default.
class Section {
 public:
  Section(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) config_error(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_ && j_->contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &(*j_)[key] : nullptr;
  }

  double number(const std::string& key, double def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number()) config_error(at(key), "expected a number");
    double x = v->get<double>();
    if (!std::isfinite(x)) config_error(at(key), "must be finite");
    return x;
  }

  long integer(const std::string& key, long def) {
    const json* v = raw(key);
    if (!v) return def;
    if (v->is_number_integer()) return v->get<long>();
    if (v->is_number_float()) {
      double x = v->get<double>();
      if (x == std::floor(x) && std::fabs(x) < 9e15) return static_cast<long>(x);
    }
    config_error(at(key), "expected an integer");
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_boolean()) config_error(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_string()) config_error(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) config_error(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number()) config_error(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) config_error(at(it.key()), "unknown key");
  }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a library validator and reports its complaint against a config path.
template <class F>
void validated(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    config_error(path, e.what());
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool is_integer_axis(const std::string& p) { return p == "Cb" || p == "C2" || p == "U2"; }

bool axis_allowed(Mode m, const std::string& p) {
  static const std::set<std::string> all = {"tau", "tau_db", "mu", "zipf_gamma",
                                            "Cb", "C2", "U2", "lambda_u"};
  if (!all.count(p)) return false;
  // mu is a decision variable of the optimizer.
  if ((m == Mode::Optimize || m == Mode::Sweep) && p == "mu") return false;
  return true;
}

NetworkParams parse_net(Section s) {
  NetworkParams n;
  n.lambda1 = s.number("lambda1", n.lambda1);
  n.lambda2 = s.number("lambda2", n.lambda2);
  n.lambda_u = s.number("lambda_u", n.lambda_u);
  n.M1 = static_cast<int>(s.integer("M1", n.M1));
  n.M2 = static_cast<int>(s.integer("M2", n.M2));
  n.U1 = static_cast<int>(s.integer("U1", n.U1));
  n.U2 = static_cast<int>(s.integer("U2", n.U2));
  n.P1_dbm = s.number("P1_dbm", n.P1_dbm);
  n.P2_dbm = s.number("P2_dbm", n.P2_dbm);
  n.alpha1 = s.number("alpha1", n.alpha1);
  n.alpha2 = s.number("alpha2", n.alpha2);
  if (s.has("tau") && s.has("tau_db")) config_error(s.at("tau_db"), "give either tau or tau_db");
  n.tau = s.has("tau_db") ? db_to_linear(s.number("tau_db", 0.0)) : s.number("tau", db_to_linear(0.0));
  s.finish();
  return n;
}

ContentConfig parse_content(Section s) {
  ContentConfig c;
  long N = s.integer("N", 50);
  long N1 = s.integer("N1", 20);
  long C2 = s.integer("C2", 10);
  long Cb = s.integer("Cb", 3);
  if (s.has("popularity") && s.has("zipf_gamma"))
    config_error(s.at("popularity"), "give either popularity or zipf_gamma");
  if (N < 1) config_error(s.at("N"), "must be >= 1");
  if (s.has("popularity")) {
    c.N = static_cast<int>(N);
    c.popularity = s.numbers("popularity");
    if (static_cast<long>(c.popularity.size()) != N)
      config_error(s.at("popularity"), "needs exactly N entries");
  } else {
    c = ContentConfig::zipf(static_cast<int>(N), s.number("zipf_gamma", 0.4), 0, 1, 0);
  }
  c.N1 = static_cast<int>(N1);
  c.C2 = static_cast<int>(C2);
  c.Cb = static_cast<int>(Cb);
  s.finish();
  return c;
}

CachingPolicy parse_policy(Section s, const ContentConfig& content) {
  CachingPolicy p;
  const json* nc = s.raw("nc_set");
  if (!nc) config_error(s.at("nc_set"), "required");
  if (!nc->is_array()) config_error(s.at("nc_set"), "expected an array of file ids");
  for (std::size_t i = 0; i < nc->size(); ++i) {
    const json& e = (*nc)[i];
    if (!e.is_number_integer()) config_error(s.at("nc_set") + "[" + std::to_string(i) + "]", "expected an integer");
    p.nc_set.push_back(e.get<int>());
  }
  const json* T = s.raw("T");
  if (!T) config_error(s.at("T"), "required");
  if (T->is_string()) {
    if (T->get<std::string>() != "uniform") config_error(s.at("T"), "the only named policy is \"uniform\"");
    if (p.nc_set.empty()) config_error(s.at("nc_set"), "must not be empty");
    p.T.assign(p.nc_set.size(), double(content.C2) / double(p.nc_set.size()));
  } else {
    p.T = s.numbers("T");
  }
  p.mu = s.number("mu", 1.0);
  s.finish();
  return p;
}

sim::SimConfig parse_sim(Section s) {
  sim::SimConfig c;
  c.window_side = s.number("window_side", c.window_side);
  c.n_realizations = s.integer("n_realizations", c.n_realizations);
  c.seed = static_cast<std::uint64_t>(s.integer("seed", static_cast<long>(c.seed)));
  c.observation_margin = s.number("observation_margin", c.observation_margin);
  c.user_buffer = s.number("user_buffer", c.user_buffer);
  c.typical_users = static_cast<int>(s.integer("typical_users", c.typical_users));
  c.theta_only = s.boolean("theta_only", c.theta_only);
  s.finish();
  return c;
}

opt::OptimizerConfig parse_opt(Section s) {
  opt::OptimizerConfig c;
  c.bisect_tol = s.number("bisect_tol", c.bisect_tol);
  c.mu_grid = static_cast<int>(s.integer("mu_grid", c.mu_grid));
  c.mu_tol = s.number("mu_tol", c.mu_tol);
  c.alt_max_iters = static_cast<int>(s.integer("alt_max_iters", c.alt_max_iters));
  c.alt_tol = s.number("alt_tol", c.alt_tol);
  c.ccp_max_iters = static_cast<int>(s.integer("ccp_max_iters", c.ccp_max_iters));
  c.ccp_tol = s.number("ccp_tol", c.ccp_tol);
  c.ccp_restarts = static_cast<int>(s.integer("ccp_restarts", c.ccp_restarts));
  c.ccp_extrapolate = s.boolean("ccp_extrapolate", c.ccp_extrapolate);
  c.seed = static_cast<std::uint64_t>(s.integer("seed", static_cast<long>(c.seed)));
  s.finish();
  return c;
}

SweepAxis parse_axis(Section s, Mode mode) {
  SweepAxis a;
  a.param = s.string("param", "");
  if (!axis_allowed(mode, a.param))
    config_error(s.at("param"), "unsupported axis '" + a.param + "' for mode " + to_string(mode));
  a.values = s.numbers("values");
  if (a.values.empty()) config_error(s.at("values"), "must not be empty");
  bool up = true, down = true;
  for (std::size_t i = 1; i < a.values.size(); ++i) {
    up = up && a.values[i] > a.values[i - 1];
    down = down && a.values[i] < a.values[i - 1];
  }
  if (!up && !down) config_error(s.at("values"), "must be strictly monotone");
  if (is_integer_axis(a.param))
    for (std::size_t i = 0; i < a.values.size(); ++i)
      if (a.values[i] != std::floor(a.values[i]))
        config_error(s.at("values") + "[" + std::to_string(i) + "]", "must be an integer");
  s.finish();
  return a;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string join(const std::vector<std::string>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

template <class V>
std::string join_numbers(const V& xs) {
  std::vector<std::string> s;
  for (auto x : xs) s.push_back(fmt(static_cast<double>(x)));
  return join(s, ' ');
}

template <class F>
void parallel_points(std::size_t n, int jobs, F&& f) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) f(i);
  };
  int k = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (k == 1) return worker();
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex m;
  for (int t = 0; t < k; ++t)
    pool.emplace_back([&] {
      try {
        worker();
      } catch (...) {
        std::lock_guard lk(m);
        if (!err) err = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct Point {
  double value = NAN;
  NetworkParams net;
  ContentConfig content;
  std::optional<CachingPolicy> policy;
};

std::vector<Point> sweep_points(const ExperimentSpec& spec) {
  if (!spec.sweep_axis) return {{NAN, spec.net, spec.content, spec.policy}};
  std::vector<Point> out;
  for (double v : spec.sweep_axis->values) {
    Point p{v, spec.net, spec.content, spec.policy};
    apply_axis(spec.sweep_axis->param, v, p.net, p.content, p.policy);
    out.push_back(std::move(p));
  }
  return out;
}

std::string axis_name(const ExperimentSpec& spec) { return spec.sweep_axis ? spec.sweep_axis->param : "none"; }

std::string axis_value(double v) { return std::isnan(v) ? "" : fmt(v); }

Table analyze_table(const ExperimentSpec& spec, const std::string& hash) {
  Table t{"analyze",
          {"config_hash", "axis", "value", "tau", "mu", "nc", "q1", "q2", "q2_lower", "q2_upper", "q",
           "ase_lower", "ase", "ase_upper", "theta_bar", "epsilon", "psi1"},
          {}};
  for (const auto& p : sweep_points(spec)) {
    auto r = analytics::analyze(p.net, p.content, *p.policy);
    t.rows.push_back({hash, axis_name(spec), axis_value(p.value), fmt(p.net.tau), fmt(p.policy->mu),
                      std::to_string(p.policy->Nc()), fmt(r.q1), fmt(r.q2), fmt(r.q2_lower),
                      fmt(r.q2_upper), fmt(r.q1 + r.q2), fmt(r.ase_lower), fmt(r.ase), fmt(r.ase_upper),
                      fmt(r.theta_bar), fmt(r.epsilon), fmt(r.psi1)});
  }
  return t;
}

std::vector<Table> simulate_tables(const ExperimentSpec& spec, const std::string& hash) {
  Table res{"simulate",
            {"config_hash", "axis", "value", "tau", "mu", "q1_sim", "q1_hw", "q2_sim", "q2_hw", "q_sim",
             "q_hw", "ase_sim", "ase_hw", "q1_ana", "q2_ana", "q_ana", "ase_ana", "ase_lower_ana",
             "ase_upper_ana", "n_effective", "dropped"},
            {}};
  Table hist{"theta_hist", {"config_hash", "axis", "value", "theta", "freq_sim", "pmf_poisson"}, {}};

  auto emit = [&](double axis_v, const Point& p, const sim::SimPoint& sp, const sim::SimEstimate& est) {
    NetworkParams net = p.net;
    net.tau = sp.tau;
    auto r = analytics::analyze(net, p.content, *p.policy);
    res.rows.push_back({hash, axis_name(spec), axis_value(axis_v), fmt(sp.tau), fmt(p.policy->mu),
                        fmt(sp.q1.value), fmt(sp.q1.half_width), fmt(sp.q2.value), fmt(sp.q2.half_width),
                        fmt(sp.q.value), fmt(sp.q.half_width), fmt(sp.ase.value), fmt(sp.ase.half_width),
                        fmt(r.q1), fmt(r.q2), fmt(r.q1 + r.q2), fmt(r.ase), fmt(r.ase_lower),
                        fmt(r.ase_upper), std::to_string(est.n_effective), std::to_string(est.dropped)});
  };
  auto emit_hist = [&](double axis_v, const Point& p, const sim::SimEstimate& est) {
    double tb = analytics::mean_theta(p.policy->Nc(), p.content.C2, p.net.U2, p.policy->mu);
    int top = est.theta_hist.empty() ? 0 : est.theta_hist.rbegin()->first;
    for (int th = 0; th <= top; ++th) {
      auto it = est.theta_hist.find(th);
      double f = it == est.theta_hist.end() ? 0.0 : it->second;
      hist.rows.push_back({hash, axis_name(spec), axis_value(axis_v), std::to_string(th), fmt(f),
                           fmt(analytics::theta_pmf(th, tb))});
    }
  };

  sim::SimConfig sc = spec.sim;
  bool tau_axis = spec.sweep_axis && (spec.sweep_axis->param == "tau" || spec.sweep_axis->param == "tau_db");
  if (tau_axis) {
    // One pass of the simulator serves every tau: Theta does not depend on it.
    auto pts = sweep_points(spec);
    std::vector<double> taus;
    for (const auto& p : pts) taus.push_back(p.net.tau);
    auto est = sim::estimate(spec.net, spec.content, *spec.policy, sc, taus);
    if (!sc.theta_only)
      for (std::size_t i = 0; i < pts.size(); ++i) emit(pts[i].value, pts[i], est.points[i], est);
    emit_hist(NAN, pts.front(), est);
  } else {
    for (const auto& p : sweep_points(spec)) {
      auto est = sim::estimate(p.net, p.content, *p.policy, sc);
      if (!sc.theta_only) emit(p.value, p, est.points.front(), est);
      emit_hist(p.value, p, est);
    }
  }
  std::vector<Table> out;
  if (!sc.theta_only) out.push_back(std::move(res));
  out.push_back(std::move(hist));
  return out;
}

std::vector<opt::Solution> all_methods(const NetworkParams& net, const ContentConfig& content,
                                       const opt::OptimizerConfig& cfg) {
  std::vector<opt::Solution> s;
  s.push_back(opt::alternate(net, content, cfg));
  s.push_back(opt::baseline_mpc(net, content, cfg));
  s.push_back(opt::baseline_udc(net, content, cfg));
  s.push_back(opt::ccp_upper(net, content, cfg));
  for (auto& x : s) opt::annotate(x, net, content);
  return s;
}

const char* method_label(std::size_t i) {
  static const char* names[] = {"proposed", "mpc", "udc", "upper"};
  return names[i];
}

std::vector<Table> optimize_tables(const ExperimentSpec& spec, const std::string& hash) {
  Table sol{"optimize",
            {"config_hash", "method", "tau", "mu", "nc", "nb", "objective", "ase_exact", "ase_lower",
             "ase_upper", "iterations", "nc_set", "T"},
            {}};
  Table tr{"traces", {"config_hash", "method", "iteration", "objective"}, {}};
  auto sols = all_methods(spec.net, spec.content, spec.opt);
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const auto& s = sols[i];
    int nb = spec.content.N2() - s.policy.Nc();
    sol.rows.push_back({hash, method_label(i), fmt(spec.net.tau), fmt(s.policy.mu),
                        std::to_string(s.policy.Nc()), std::to_string(nb), fmt(s.objective),
                        fmt(s.ase_exact), fmt(s.ase_lower), fmt(s.ase_upper), std::to_string(s.iterations),
                        join_numbers(s.policy.nc_set), join_numbers(s.policy.T)});
    for (std::size_t k = 0; k < s.trace.size(); ++k)
      tr.rows.push_back({hash, method_label(i), std::to_string(k), fmt(s.trace[k])});
  }
  return {sol, tr};
}

Table sweep_table(const ExperimentSpec& spec, const std::string& hash) {
  auto pts = sweep_points(spec);
  std::vector<std::vector<opt::Solution>> results(pts.size());
  // Points run in parallel; each point then runs single-threaded.
  opt::OptimizerConfig cfg = spec.opt;
  int pool = std::min<int>(cfg.jobs, static_cast<int>(pts.size()));
  if (pool > 1) cfg.jobs = 1;
  parallel_points(pts.size(), pool, [&](std::size_t i) {
    results[i] = all_methods(pts[i].net, pts[i].content, cfg);
  });
  Table t{"sweep",
          {"config_hash", "axis", "value", "method", "tau", "mu", "nc", "nb", "objective", "ase_exact",
           "ase_lower", "ase_upper", "iterations"},
          {}};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t m = 0; m < results[i].size(); ++m) {
      const auto& s = results[i][m];
      t.rows.push_back({hash, axis_name(spec), axis_value(pts[i].value), method_label(m),
                        fmt(pts[i].net.tau), fmt(s.policy.mu), std::to_string(s.policy.Nc()),
                        std::to_string(pts[i].content.N2() - s.policy.Nc()), fmt(s.objective),
                        fmt(s.ase_exact), fmt(s.ase_lower), fmt(s.ase_upper), std::to_string(s.iterations)});
    }
  return t;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Analyze: return "analyze";
    case Mode::Simulate: return "simulate";
    case Mode::Optimize: return "optimize";
    case Mode::Sweep: return "sweep";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::Analyze, Mode::Simulate, Mode::Optimize, Mode::Sweep})
    if (s == to_string(m)) return m;
  config_error("mode", "expected analyze, simulate, optimize or sweep, got '" + s + "'");
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void apply_axis(const std::string& param, double v, NetworkParams& net, ContentConfig& content,
                std::optional<CachingPolicy>& policy) {
  if (param == "tau") net.tau = v;
  else if (param == "tau_db") net.tau = db_to_linear(v);
  else if (param == "lambda_u") net.lambda_u = v;
  else if (param == "U2") net.U2 = static_cast<int>(v);
  else if (param == "Cb") content.Cb = static_cast<int>(v);
  else if (param == "C2") content.C2 = static_cast<int>(v);
  else if (param == "zipf_gamma") {
    auto z = ContentConfig::zipf(content.N, v, content.N1, content.C2, content.Cb);
    content = z;
  } else if (param == "mu") {
    if (policy) policy->mu = v;
  } else {
    config_error("sweep_axis.param", "unsupported axis '" + param + "'");
  }
}

ExperimentSpec parse_spec(const std::string& text, const Overrides& ov) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("<document>", e.what());
  }
  Section top(&root, "");
  ExperimentSpec spec;

  std::string mode = top.string("mode", "");
  if (!mode.empty()) spec.mode = parse_mode(mode);
  if (ov.mode) {
    if (!mode.empty() && *ov.mode != spec.mode)
      config_error("mode", "config says " + mode + " but the command is " + to_string(*ov.mode));
    spec.mode = *ov.mode;
  } else if (mode.empty()) {
    config_error("mode", "required");
  }

  spec.net = parse_net(Section(top.raw("net"), "net"));
  spec.content = parse_content(Section(top.raw("content"), "content"));
  validated("net", [&] { spec.net.validate(); });
  validated("content", [&] { spec.content.validate(); });

  if (top.has("policy")) {
    spec.policy = parse_policy(Section(top.raw("policy"), "policy"), spec.content);
    validated("policy", [&] { spec.policy->validate(spec.content); });
  } else {
    top.raw("policy");
  }
  if ((spec.mode == Mode::Analyze || spec.mode == Mode::Simulate) && !spec.policy)
    config_error("policy", std::string("required for ") + to_string(spec.mode));

  spec.sim = parse_sim(Section(top.raw("sim"), "sim"));
  spec.opt = parse_opt(Section(top.raw("opt"), "opt"));

  if (top.has("sweep_axis")) spec.sweep_axis = parse_axis(Section(top.raw("sweep_axis"), "sweep_axis"), spec.mode);
  else top.raw("sweep_axis");
  if (spec.mode == Mode::Sweep && !spec.sweep_axis) config_error("sweep_axis", "required for sweep");

  spec.output_path = top.string("output_path", spec.output_path.string());
  top.finish();

  if (ov.seed) spec.sim.seed = spec.opt.seed = *ov.seed;
  if (ov.jobs) {
    if (*ov.jobs < 1) config_error("--jobs", "must be >= 1");
    spec.sim.jobs = spec.opt.jobs = *ov.jobs;
  }
  if (ov.out) spec.output_path = *ov.out;

  validated("sim", [&] { spec.sim.validate(); });
  validated("opt", [&] { spec.opt.validate(); });

  // Every sweep point has to be a valid configuration on its own.
  if (spec.sweep_axis)
    for (std::size_t i = 0; i < spec.sweep_axis->values.size(); ++i) {
      std::string path = "sweep_axis.values[" + std::to_string(i) + "]";
      NetworkParams net = spec.net;
      ContentConfig content = spec.content;
      auto policy = spec.policy;
      validated(path, [&] {
        apply_axis(spec.sweep_axis->param, spec.sweep_axis->values[i], net, content, policy);
        net.validate();
        content.validate();
        if (policy) policy->validate(content);
      });
    }
  return spec;
}

ExperimentSpec load_spec(const fs::path& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) config_error("--config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), ov);
}

std::string resolved_config(const ExperimentSpec& s) {
  json j;
  j["mode"] = to_string(s.mode);
  const auto& n = s.net;
  j["net"] = {{"lambda1", n.lambda1}, {"lambda2", n.lambda2}, {"lambda_u", n.lambda_u},
              {"M1", n.M1}, {"M2", n.M2}, {"U1", n.U1}, {"U2", n.U2},
              {"P1_dbm", n.P1_dbm}, {"P2_dbm", n.P2_dbm}, {"alpha1", n.alpha1}, {"alpha2", n.alpha2},
              {"tau", n.tau}};
  const auto& c = s.content;
  j["content"] = {{"N", c.N}, {"N1", c.N1}, {"C2", c.C2}, {"Cb", c.Cb}, {"popularity", c.popularity}};
  if (c.zipf_gamma) j["content"]["zipf_gamma"] = *c.zipf_gamma;
  if (s.policy) j["policy"] = {{"nc_set", s.policy->nc_set}, {"T", s.policy->T}, {"mu", s.policy->mu}};
  const auto& m = s.sim;
  j["sim"] = {{"window_side", m.window_side}, {"n_realizations", m.n_realizations}, {"seed", m.seed},
              {"observation_margin", m.observation_margin}, {"user_buffer", m.user_buffer},
              {"typical_users", m.typical_users}, {"theta_only", m.theta_only}};
  const auto& o = s.opt;
  j["opt"] = {{"bisect_tol", o.bisect_tol}, {"mu_grid", o.mu_grid}, {"mu_tol", o.mu_tol},
              {"alt_max_iters", o.alt_max_iters}, {"alt_tol", o.alt_tol},
              {"ccp_max_iters", o.ccp_max_iters}, {"ccp_tol", o.ccp_tol},
              {"ccp_restarts", o.ccp_restarts}, {"ccp_extrapolate", o.ccp_extrapolate}, {"seed", o.seed}};
  if (s.sweep_axis) j["sweep_axis"] = {{"param", s.sweep_axis->param}, {"values", s.sweep_axis->values}};
  return j.dump();
}

std::string config_hash(const ExperimentSpec& spec) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(resolved_config(spec))));
  return buf;
}

std::vector<Table> compute(const ExperimentSpec& spec) {
  std::string hash = config_hash(spec);
  switch (spec.mode) {
    case Mode::Analyze: return {analyze_table(spec, hash)};
    case Mode::Simulate: return simulate_tables(spec, hash);
    case Mode::Optimize: return optimize_tables(spec, hash);
    case Mode::Sweep: return {sweep_table(spec, hash)};
  }
  return {};
}

std::vector<fs::path> run(const ExperimentSpec& spec) {
  auto tables = compute(spec);
  fs::create_directories(spec.output_path);
  std::string hash = config_hash(spec);
  json config = json::parse(resolved_config(spec));
  std::vector<fs::path> written;
  for (const auto& t : tables) {
    fs::path csv = spec.output_path / (t.name + ".csv");
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    out << join(t.columns, ',') << '\n';
    for (const auto& r : t.rows) out << join(r, ',') << '\n';
    if (!out) throw std::runtime_error("failed writing " + csv.string());
    written.push_back(csv);

    json meta = {{"schema_version", kSchemaVersion},
                 {"config_hash", hash},
                 {"mode", to_string(spec.mode)},
                 {"seed", spec.mode == Mode::Simulate ? spec.sim.seed : spec.opt.seed},
                 {"file", csv.filename().string()},
                 {"columns", t.columns},
                 {"rows", t.rows.size()},
                 {"config", config},
                 {"generated_at", utc_now()}};
    fs::path side = spec.output_path / (t.name + ".meta.json");
    std::ofstream mo(side, std::ios::binary | std::ios::trunc);
    mo << meta.dump(2) << '\n';
    if (!mo) throw std::runtime_error("failed writing " + side.string());
    written.push_back(side);
  }
  return written;
}

}  // namespace hetcache::cli
