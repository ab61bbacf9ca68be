#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "hetcache/params.hpp"

namespace hetcache::sim {

using Rng = std::mt19937_64;

struct Point {
  double x, y;
};

struct Window {
  double x0, y0, x1, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(Point p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
};

struct SimConfig {
  double window_side = 2000.0;  // m
  long n_realizations = 50000;
  std::uint64_t seed = 1;
  double observation_margin = 500.0;  // m, excluded from statistics on each side
  // Users are only dropped within this distance of the observation region;
  // beyond it they cannot reach an observed SBS with an IN request in practice.
  double user_buffer = 300.0;
  int typical_users = 8;    // per tier and realization
  bool theta_only = false;  // skip MBS tier and SIR, only collect the Theta histogram
  int jobs = 1;

  void validate() const;
  Window window() const { return {0, 0, window_side, window_side}; }
  Window observation() const;
};

struct Interval {
  double value = 0.0;
  double half_width = 0.0;
};

struct SimPoint {
  double tau = 0.0;
  Interval q1, q2, q, ase;
};

struct SimEstimate {
  std::vector<SimPoint> points;    // one per requested tau
  std::map<int, double> theta_hist;  // Theta -> relative frequency
  long theta_samples = 0;
  long n_effective = 0;  // typical-user SIR trials
  long dropped = 0;      // requests with no caching SBS in the window
};

std::vector<Point> sample_ppp(double density, const Window& w, Rng& rng);

/// C2 distinct files per SBS, stored flat (sbs * C2 + slot) as indices into
/// policy.nc_set. Interval method over a per-SBS random file order: file n is
/// kept with probability exactly T_n.
struct CacheRealization {
  int C2 = 0;
  std::vector<int> slots;
  std::span<const int> of(int sbs) const { return {slots.data() + sbs * C2, std::size_t(C2)}; }
};
CacheRealization realize_caches(int sbs_count, const CachingPolicy& policy, int C2, Rng& rng);

struct CombinationProbabilities {
  std::vector<std::vector<int>> combos;  // positions into nc_set, lexicographic
  std::vector<double> p;
  double residual = 0.0;  // sum_n (sum_{i contains n} p_i - T_n)^2
};
CombinationProbabilities solve_pi_least_squares(const CachingPolicy& policy, int C2,
                                                long max_combos = 10000);

/// SIR of one link: desired gain Gamma(D,1) at distance r0, each interferer
/// Gamma(U,1) at its distance.
double draw_sir(int D, double r0, std::span<const double> interferer_dist, int U, double alpha,
                Rng& rng);

/// Integer-shape Gamma(k, 1).
double gamma_int(int k, Rng& rng);

// Per-realization internals, exposed for protocol property tests.
struct SbsUserTrace {
  Point pos;
  int serving = -1;
  double z2 = 0.0;
  std::vector<int> requested;  // SBS ids that received this user's IN request
  std::vector<int> granted;
};
struct RealizationTrace {
  std::vector<Point> sbs;
  std::vector<int> theta;  // requests received per SBS
  std::vector<int> grants; // nulls granted per SBS
  std::vector<SbsUserTrace> served_sbs_users;
};

/// Runs the association and IN protocol of one realization and returns the trace.
RealizationTrace trace_realization(const NetworkParams& net, const ContentConfig& content,
                                   const CachingPolicy& policy, const SimConfig& sim,
                                   std::uint64_t index);

SimEstimate estimate(const NetworkParams& net, const ContentConfig& content,
                     const CachingPolicy& policy, const SimConfig& sim,
                     std::span<const double> taus = {});

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hetcache::sim
