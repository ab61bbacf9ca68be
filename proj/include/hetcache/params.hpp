#pragma once

#include <optional>
#include <vector>

namespace hetcache {

struct NetworkParams {
  double lambda1 = 1e-4;   // MBS density, m^-2
  double lambda2 = 5e-4;   // SBS density, m^-2
  double lambda_u = 1e-2;  // user density, m^-2
  int M1 = 32, M2 = 16;
  int U1 = 32, U2 = 4;
  // Transmit powers are carried for completeness; they cancel in the
  // interference-limited SIR.
  double P1_dbm = 46.0, P2_dbm = 23.0;
  double alpha1 = 4.0, alpha2 = 4.0;
  double tau = 1.0;  // linear

  void validate() const;
  int in_capacity() const { return M2 - U2; }
  double rho() const { return lambda_u / (lambda2 * U2); }
};

// Files are 1-based and ranked by popularity: 1..N1 sit at every MBS,
// N1+1..N form the SBS-tier candidate set.
struct ContentConfig {
  int N = 50;
  std::vector<double> popularity;  // a_1..a_N stored at index 0..N-1
  int N1 = 20;
  int C2 = 10;
  int Cb = 3;
  std::optional<double> zipf_gamma;

  static ContentConfig zipf(int N, double gamma, int N1, int C2, int Cb);

  void validate() const;
  int N2() const { return N - N1; }
  double a(int file) const { return popularity[file - 1]; }
};

struct CachingPolicy {
  std::vector<int> nc_set;  // ascending file ids
  std::vector<double> T;    // parallel to nc_set
  double mu = 1.0;

  void validate(const ContentConfig& content) const;
  int Nc() const { return static_cast<int>(nc_set.size()); }
};

/// Files of the SBS candidate range that are not cached at SBSs.
std::vector<int> backhaul_files(const ContentConfig& content, const std::vector<int>& nc_set);

}  // namespace hetcache
