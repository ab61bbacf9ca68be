#include "hetcache/params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hetcache/error.hpp"

namespace hetcache {

void NetworkParams::validate() const {
  auto bad = [](const std::string& w) { throw Error(ErrorCode::InvalidParam, w); };
  if (!(lambda1 > 0 && lambda2 > 0 && lambda_u > 0)) bad("densities must be positive");
  if (!(lambda1 < lambda2)) bad("lambda1 must be below lambda2");
  if (U1 < 1 || U1 > M1 || U2 < 1 || U2 > M2) bad("need 1 <= U_k <= M_k");
  // The MBS-tier coverage term assumes every MBS antenna serves a user.
  if (U1 != M1) bad("U1 must equal M1");
  if (!(alpha1 > 2 && alpha2 > 2)) bad("path-loss exponents must exceed 2");
  if (!(tau > 0) || !std::isfinite(tau)) bad("tau must be positive");
}

ContentConfig ContentConfig::zipf(int N, double gamma, int N1, int C2, int Cb) {
  require(N >= 1, ErrorCode::InvalidParam, "N must be >= 1");
  ContentConfig c;
  c.N = N;
  c.N1 = N1;
  c.C2 = C2;
  c.Cb = Cb;
  c.zipf_gamma = gamma;
  c.popularity.resize(N);
  for (int n = 1; n <= N; ++n) c.popularity[n - 1] = std::pow(n, -gamma);
  double s = std::accumulate(c.popularity.begin(), c.popularity.end(), 0.0);
  for (double& a : c.popularity) a /= s;
  return c;
}

void ContentConfig::validate() const {
  auto bad = [](const std::string& w) { throw Error(ErrorCode::InvalidParam, w); };
  if (N < 1 || static_cast<int>(popularity.size()) != N) bad("popularity must have N entries");
  double s = std::accumulate(popularity.begin(), popularity.end(), 0.0);
  if (std::fabs(s - 1.0) > 1e-12) bad("popularity must sum to 1");
  for (int i = 1; i < N; ++i)
    if (!(popularity[i] < popularity[i - 1])) bad("popularity must be strictly decreasing");
  if (popularity.back() <= 0) bad("popularity must be positive");
  if (N1 < 0 || C2 < 1 || N1 + C2 > N) bad("need N1 >= 0, C2 >= 1 and N1 + C2 <= N");
  if (Cb < 0) bad("Cb must be >= 0");
}

void CachingPolicy::validate(const ContentConfig& content) const {
  auto bad = [](const std::string& w) { throw Error(ErrorCode::InvalidParam, w); };
  if (nc_set.size() != T.size()) bad("nc_set and T must have equal length");
  if (Nc() < content.C2) bad("need |nc_set| >= C2");
  for (std::size_t i = 0; i < nc_set.size(); ++i) {
    if (nc_set[i] <= content.N1 || nc_set[i] > content.N) bad("nc_set entries must lie in N1+1..N");
    if (i > 0 && nc_set[i] <= nc_set[i - 1]) bad("nc_set must be strictly ascending");
    // T_n = 0 is tolerated: the KKT solution may switch a candidate off while
    // the candidate set (and hence N_c) stays fixed.
    if (!(T[i] >= 0.0 && T[i] <= 1.0 + 1e-12)) bad("caching probabilities must lie in [0, 1]");
  }
  double s = std::accumulate(T.begin(), T.end(), 0.0);
  if (std::fabs(s - content.C2) > 1e-8) bad("caching probabilities must sum to C2");
  if (!(mu >= 0.0) || !std::isfinite(mu)) bad("mu must be nonnegative");
}

std::vector<int> backhaul_files(const ContentConfig& content, const std::vector<int>& nc_set) {
  std::vector<int> out;
  for (int n = content.N1 + 1; n <= content.N; ++n)
    if (!std::binary_search(nc_set.begin(), nc_set.end(), n)) out.push_back(n);
  return out;
}

}  // namespace hetcache
