#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plap/eigensolver.hpp"
#include "plap/graph.hpp"
#include "plap/p_operator.hpp"

namespace plap {

enum class NodalKind { strong, weak };

std::string to_string(NodalKind kind);

struct NodalDomain {
  VertexSubset vertices;
  /// +1 for a component of {f > 0} / {f >= 0}, -1 for {f < 0} / {f <= 0}.
  int sign = 1;
};

struct NodalDecomposition {
  NodalKind kind = NodalKind::strong;
  std::vector<NodalDomain> domains;
  VertexSubset zero_set;

  std::size_t count() const { return domains.size(); }
};

/// 1e-9 * max|f|, the default threshold below which f(u) counts as zero.
double default_zero_tol(const VertexFunction& f);

/// Connected components of {f > tol} and {f < -tol}.
NodalDecomposition strong_nodal_domains(const Graph& g, const VertexFunction& f,
                                        double zero_tol);

/// Connected components of {f >= -tol} and {f <= tol}. A component on which f
/// vanishes entirely is maximal for both sign sets and is reported once (sign +1).
NodalDecomposition weak_nodal_domains(const Graph& g, const VertexFunction& f,
                                      double zero_tol);

/// Left endpoints a (0-based) of the generalized zeros (a, a+1] of f on a path:
/// f(a) != 0 and f(a) f(a+1) <= 0. Throws if g is not a path.
std::vector<int> generalized_zeros(const Graph& g, const VertexFunction& f, double zero_tol);

/// Largest R_p over the nodal space spanned by f restricted to each domain,
/// sampled over random unit coefficient vectors plus every +-1 pattern when
/// the domain count is at most 12.
double nodal_space_max_rq(const Graph& g, const EigenPair& pair, NodalKind kind,
                          int sample_count, std::uint64_t seed, double zero_tol = -1.0);

struct NodalPairCheck {
  int k = 0;                // 1-based index in the spectrum
  int first_index = 0;      // first index of the eigenvalue group containing k
  int multiplicity = 1;     // r
  double lambda = 0.0;
  int strong = 0;
  int weak = 0;
  int strong_bound = 0;     // first_index + r - 1
  int weak_bound = 0;       // first_index (p > 1) or first_index + r - 1 (p = 1)
  bool strong_ok = true;
  bool weak_ok = true;
  /// Exactly two weak domains for the lambda_2 pair (p > 1 only).
  bool second_pair_checked = false;
  bool second_pair_ok = true;
  bool pass() const { return strong_ok && weak_ok && second_pair_ok; }
};

struct NodalReport {
  double p = 2.0;
  std::vector<NodalPairCheck> pairs;
  bool all_pass() const;
};

/// Checks one eigenfunction against the nodal bounds for index k and
/// multiplicity r (first_index is the first index of its eigenvalue group).
NodalPairCheck certify_nodal_pair(const Graph& g, double p, const VertexFunction& f,
                                  double lambda, int k, int first_index, int multiplicity,
                                  double zero_tol = -1.0);

/// Groups eigenvalues within multiplicity_tol (relative) and checks each pair:
/// strong <= k+r-1; weak <= k for p > 1 and <= k+r-1 for p = 1; exactly two
/// weak domains at k = 2 when p > 1.
NodalReport certify_nodal_bounds(const Graph& g, const Spectrum& spectrum,
                                 double multiplicity_tol = 1e-7, double zero_tol = -1.0);

}  // namespace plap
