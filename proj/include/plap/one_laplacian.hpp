#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "plap/graph.hpp"

namespace plap {

using Rational = mpq_class;

/// Set-valued sign: {-1} for x < 0, {+1} for x > 0, [-1, 1] for x = 0.
enum class SignSet { minus_one, plus_one, interval };

SignSet sign_set(const Rational& x);
bool contains(SignSet set, const Rational& value);

struct RationalEdge {
  int u = 0;  // u < v
  int v = 0;
  Rational w;
};

/// Graph with exact rational weights and measure.
struct RationalGraph {
  int n = 0;
  std::vector<RationalEdge> edges;
  std::vector<Rational> mu;
};

/// Exact conversion (every finite double is a dyadic rational).
RationalGraph to_rational(const Graph& g);

/// Parses "3", "-1/2", "0.25" exactly. Throws std::invalid_argument otherwise.
Rational parse_rational(const std::string& text);

/// Witness for 0 in (Delta_1 f)(u) - lambda mu(u) Sign(f(u)).
struct OneLapCertificate {
  bool feasible = false;
  /// z(uv) per edge in RationalGraph::edges order, oriented u -> v (z(vu) = -z(uv)).
  std::vector<Rational> z;
  /// s(u) in Sign(f(u)) per vertex.
  std::vector<Rational> s;
};

/// Decides by exact phase-1 simplex whether (lambda, f) is a 1-Laplacian
/// eigenpair and returns the witness when it is.
OneLapCertificate verify_1lap_eigenpair(const RationalGraph& g, const std::vector<Rational>& f,
                                        const Rational& lambda);

/// Re-checks a feasible certificate by substitution into both inclusions.
bool check_certificate(const RationalGraph& g, const std::vector<Rational>& f,
                       const Rational& lambda, const OneLapCertificate& cert);

/// Closed interval [lo, hi]; hi empty means unbounded above.
struct LambdaInterval {
  Rational lo;
  std::optional<Rational> hi;
  bool is_point() const { return hi && *hi == lo; }
};

struct OrderingEigenvalues {
  /// Weak order of f with designated zero level: 0 where f vanishes,
  /// 1, 2, ... for increasing positive values, -1, -2, ... for decreasing
  /// negative values. The levels themselves form a representative f.
  std::vector<int> levels;
  LambdaInterval lambdas;
  bool constant = false;
};

struct OneLapEnumeration {
  std::vector<OrderingEigenvalues> feasible;  // orderings admitting some lambda
  std::vector<LambdaInterval> all;            // union over every ordering
  std::vector<LambdaInterval> nonconstant;    // union over non-constant orderings
  std::size_t orderings_checked = 0;
};

inline constexpr int kOneLapMaxVertices = 6;

/// Enumerates every weak ordering of vertex values (up to f -> -f) and solves
/// the parametric feasibility problem in (z, s, lambda) for each, returning the
/// feasible eigenvalue set. n <= kOneLapMaxVertices.
OneLapEnumeration enumerate_1lap_eigenvalues(const RationalGraph& g);

std::string to_string(const LambdaInterval& interval);

}  // namespace plap
