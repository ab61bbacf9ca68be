#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance run. None of these go through the library's fast paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/optimizer.hpp"

namespace hetcache::oracle {

// The lower-triangular Toeplitz matrix with diagonal T + w0 and -w[k-1] on the
// k-th subdiagonal.
inline Eigen::MatrixXd toeplitz_matrix(double T, double w0, const std::vector<double>& w, int D) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(D, D);
  for (int r = 0; r < D; ++r) {
    W(r, r) = T + w0;
    for (int c = 0; c < r; ++c) W(r, c) = -w[r - c - 1];
  }
  return W;
}

// T times the first column of W^{-1}, by explicit inversion.
inline std::vector<double> dense_coeffs(double T, double w0, const std::vector<double>& w, int D) {
  Eigen::MatrixXd inv = toeplitz_matrix(T, w0, w, D).inverse();
  std::vector<double> q(D);
  for (int i = 0; i < D; ++i) q[i] = T * inv(i, 0);
  return q;
}

// T * L1 norm of W^{-1} by explicit inversion.
inline double dense_l1(double T, double w0, const std::vector<double>& w, int D) {
  Eigen::MatrixXd inv = toeplitz_matrix(T, w0, w, D).inverse();
  return T * inv.cwiseAbs().colwise().sum().maxCoeff();
}

inline std::vector<double> popularity_of(const ContentConfig& c, const std::vector<int>& nc) {
  std::vector<double> a;
  for (int n : nc) a.push_back(c.a(n));
  return a;
}

// Strictly decreasing random popularity over N1 + N2 files.
inline ContentConfig random_content(std::mt19937_64& rng, int N1, int N2, int C2, int Cb) {
  std::exponential_distribution<double> e(1.0);
  ContentConfig c;
  c.N = N1 + N2;
  c.N1 = N1;
  c.C2 = C2;
  c.Cb = Cb;
  c.popularity.resize(c.N);
  for (double& a : c.popularity) a = e(rng) + 1e-3;
  std::sort(c.popularity.begin(), c.popularity.end(), std::greater<>());
  double s = std::accumulate(c.popularity.begin(), c.popularity.end(), 0.0);
  for (double& a : c.popularity) a /= s;
  c.popularity[0] += 1.0 - std::accumulate(c.popularity.begin(), c.popularity.end(), 0.0);
  return c;
}

inline NetworkParams random_net(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  NetworkParams n;
  n.M2 = std::uniform_int_distribution<int>(2, 8)(rng);
  n.U2 = std::uniform_int_distribution<int>(1, n.M2 - 1)(rng);
  n.alpha2 = 3.0 + 1.5 * u(rng);
  n.tau = std::pow(10.0, -0.5 + u(rng));
  return n;
}

struct SubsetBest {
  std::vector<int> nc_set;
  double objective = -1.0;
};

// Every subset of N2 with at least C2 files (and mu inside its admissible
// range), each solved by KKT on the lower bound. Ties go to the
// lexicographically smaller set.
inline SubsetBest exhaustive_subsets(double mu, const NetworkParams& net, const ContentConfig& c) {
  using analytics::SbsTierModel;
  int N2 = c.N2(), N1 = c.N1, C2 = c.C2;
  SubsetBest best;
  for (unsigned mask = 1; mask < (1u << N2); ++mask) {
    std::vector<int> nc;
    for (int i = 0; i < N2; ++i)
      if (mask >> i & 1u) nc.push_back(N1 + 1 + i);
    int Nc = static_cast<int>(nc.size());
    if (Nc < C2 || mu > opt::mu_max(net, Nc, C2) + 1e-12) continue;
    SbsTierModel m(net, Nc, C2, mu, false);
    auto T = opt::kkt_continuous(m, popularity_of(c, nc), C2);
    double v = opt::objective(net, c, nc, T, m, analytics::Variant::Lower);
    double slack = 1e-12 * std::fabs(best.objective);
    if (best.objective < 0 || v > best.objective + slack ||
        (std::fabs(v - best.objective) <= slack && nc < best.nc_set)) {
      best.objective = v;
      best.nc_set = nc;
    }
  }
  return best;
}

}  // namespace hetcache::oracle
