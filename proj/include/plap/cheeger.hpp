#pragma once

#include <optional>
#include <vector>

#include "plap/eigensolver.hpp"
#include "plap/graph.hpp"
#include "plap/p_operator.hpp"

namespace plap {

/// w(E(A, complement of A)) / mu(A). Throws on an empty subset.
double cut_ratio(const Graph& g, const VertexSubset& a);

/// Largest n for which multiway_cheeger runs the exact search.
inline constexpr int kExactCheegerMaxN = 14;

struct CheegerResult {
  double h = 0.0;
  /// k pairwise disjoint nonempty subsets, each sorted, family sorted
  /// lexicographically.
  std::vector<VertexSubset> family;
  bool exact = true;
  /// Search nodes visited (exact search only).
  long long nodes = 0;
};

/// h_k = min over k pairwise disjoint nonempty subsets of the largest cut
/// ratio, by branch and bound over assignments V -> {unassigned, 1..k} with
/// blocks labeled in order of first use. Ties resolve to the lexicographically
/// smallest family. Throws std::invalid_argument for k outside 1..n and for
/// n > kExactCheegerMaxN unless `allow_approx` is set, in which case a
/// heuristic family (an upper bound, flagged exact = false) is returned.
CheegerResult multiway_cheeger(const Graph& g, int k, bool allow_approx = false);

/// h_1..h_{k_max}; entry i is h_{i+1}.
std::vector<CheegerResult> cheeger_constants(const Graph& g, int k_max, bool allow_approx = false);

/// Heuristic k-way family built from sweep cuts inside the strong nodal
/// domains of the p = 2 eigenvectors, falling back to singletons.
CheegerResult approximate_multiway_cheeger(const Graph& g, int k);

struct SweepResult {
  VertexSubset set;
  double ratio = 0.0;
  /// p R_p(f)^(1/p) (tau/2)^(1/q), the guaranteed ceiling on `ratio`.
  double bound = 0.0;
  bool within_bound() const;
};

/// Best threshold set {u : |f(u)|^p > t} over t in {0} and the values |f(u)|^p.
SweepResult sweep_cut(const Graph& g, const VertexFunction& f, double p);

struct CheegerCertificate {
  double p = 2.0;
  int k = 1;
  double lambda_k = 0.0;
  int m = 1;  // strong nodal domains of the k-th eigenfunction
  double h_k = 0.0;
  double h_m = 0.0;
  double tau = 1.0;
  double lower = 0.0;  // (2/tau)^(p-1) (h_m/p)^p
  double upper = 0.0;  // 2^(p-1) h_k
  double tol = 0.0;    // 1e-9 + 1e-6 lambda_k
  bool lower_ok = true;
  bool upper_ok = true;
  bool pass() const { return lower_ok && upper_ok; }
};

/// Both bounds for every pair of a p > 1 spectrum. Needs n <= kExactCheegerMaxN.
std::vector<CheegerCertificate> certify_cheeger(const Graph& g, const Spectrum& spectrum,
                                                double zero_tol = -1.0);

/// Same, reusing precomputed h_1..h_n (entry i is h_{i+1}).
std::vector<CheegerCertificate> certify_cheeger(const Graph& g, const Spectrum& spectrum,
                                                const std::vector<CheegerResult>& constants,
                                                double zero_tol = -1.0);

}  // namespace plap
