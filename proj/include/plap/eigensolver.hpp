#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "plap/graph.hpp"
#include "plap/p_operator.hpp"

namespace plap {

enum class SpectrumMethod { dense_p2, continuation, path_shooting };

std::string to_string(SpectrumMethod method);

struct PairDiagnostics {
  /// Newton iterations summed over all continuation steps (0 for direct solves).
  int newton_iterations = 0;
  /// Accepted continuation steps / bisection iterations.
  int steps = 0;
  int step_halvings = 0;
  /// Times the pair continued on a different branch (tie/zero crossing or a
  /// replacement after its branch ended).
  int branch_switches = 0;
  /// The p = 2 seed sat in a degenerate eigenspace; the branch followed is one
  /// of several possible ones.
  bool branch_ambiguous = false;
  /// 2^(p-1) h_k when it was computed (negative otherwise).
  double upper_bound = -1.0;
  /// lambda_k exceeded 2^(p-1) h_k + tol: continuation left the variational branch.
  bool upper_bound_violated = false;
  /// The pair was accepted on its converged mixed-formulation residual while
  /// the eigen residual of f stayed above accept_residual (rounding floor).
  bool precision_limited = false;
  /// continue_spectrum could not follow this branch to the target exponent.
  bool branch_ended = false;
  std::string note;
};

/// Eigenpairs of Delta_p sorted by ascending eigenvalue; pairs[k-1] is the
/// candidate for the k-th variational eigenvalue.
struct Spectrum {
  double p = 2.0;
  SpectrumMethod method = SpectrumMethod::dense_p2;
  std::vector<EigenPair> pairs;
  std::vector<PairDiagnostics> diagnostics;
  std::vector<std::string> warnings;
};

/// Raised when Newton continuation cannot reach the requested exponent.
class ContinuationError : public std::runtime_error {
 public:
  ContinuationError(const std::string& what, EigenPair last, double reached_p)
      : std::runtime_error(what), last_(std::move(last)), reached_p_(reached_p) {}
  const EigenPair& last_iterate() const { return last_; }
  double reached_p() const { return reached_p_; }

 private:
  EigenPair last_;
  double reached_p_;
};

/// Raised by the path solver when bracketing fails or zero counts are not
/// monotone in lambda.
class ShootingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All n generalized eigenpairs of L f = lambda M f, f normalized in l^2(mu).
/// Disconnected graphs produce a warning in Spectrum::warnings.
Spectrum solve_p2_spectrum(const Graph& g);

struct ContinuationOptions {
  /// Initial number of geometric steps between p0 and the target.
  int steps = 16;
  int max_newton_iterations = 60;
  /// How many times a failing step may be halved in log(p).
  int max_halvings = 14;
  /// Newton stops once the residual is at or below this.
  double target_residual = 1e-12;
  /// Residual a step must reach to be accepted.
  double accept_residual = 1e-9;
  /// Sign patterns tried per Cheeger family when searching for eigenpairs
  /// that continuation from p = 2 cannot reach (0 disables the search).
  int search_patterns = 64;
  /// Lowest exponent reachable without override.
  double min_p = 1.05;
  /// Relative change in lambda or f above which a Newton step is treated as a
  /// jump to a different branch.
  double branch_jump_tol = 0.25;
};

/// Follows an eigenpair from seed.p to p_target along a geometric grid in p,
/// solving {Delta_p f - lambda mu Phi_p(f) = 0, ||f||_p = 1} by damped Newton
/// at each grid point.
EigenPair continue_in_p(const Graph& g, const EigenPair& seed, double p_target,
                        const ContinuationOptions& options = {},
                        PairDiagnostics* diagnostics = nullptr);

/// Continues all seeds (same exponent) together. Pairs are matched step by
/// step; when a branch ends at a fold or merges into another one, its slot is
/// refilled with the nearest new eigenpair found from crossing points and
/// combinations with neighbouring eigenfunctions. A slot that cannot be
/// refilled is dropped (diagnostics branch_ended) and its entry holds the last
/// iterate, at an exponent other than p_target. Output order matches seeds.
std::vector<EigenPair> continue_spectrum(const Graph& g, const std::vector<EigenPair>& seeds,
                                         double p_target, const ContinuationOptions& options = {},
                                         std::vector<PairDiagnostics>* diagnostics = nullptr);

/// Newton at exponent p from every start; returns the converged nonconstant
/// eigenpairs that differ from `known` and from each other (f up to sign).
std::vector<EigenPair> search_eigenpairs(const Graph& g, double p,
                                         const std::vector<VertexFunction>& starts,
                                         const std::vector<EigenPair>& known,
                                         const ContinuationOptions& options = {});

/// Damped Newton on the eigen system at a fixed exponent, starting at `guess`.
/// Returns the refined pair; check its residual.
EigenPair newton_polish(const Graph& g, const EigenPair& guess,
                        const ContinuationOptions& options = {}, int* iterations = nullptr);

/// Largest Cheeger-family size for which variational_spectrum checks the
/// 2^(p-1) h_k upper bound.
inline constexpr int kUpperBoundCheckMaxN = 12;

struct CheegerResult;

/// Dense p = 2 spectrum continued to p, merged with eigenpairs found by Newton
/// from signed combinations of the indicators of minimizing Cheeger families
/// (branches born at folds are not connected to p = 2). The n smallest
/// distinct eigenvalues are kept, ascending, and each is checked against the
/// certified upper bound 2^(p-1) h_k. `cheeger` holds h_1..h_n with their
/// families when already known; otherwise they are computed for
/// n <= kUpperBoundCheckMaxN, and above that the search and the check are
/// skipped.
Spectrum variational_spectrum(const Graph& g, double p,
                              const ContinuationOptions& options = {},
                              const std::vector<CheegerResult>* cheeger = nullptr);

/// 2^(p-1) max_i c(A_i) for k pairwise disjoint nonempty subsets; an upper
/// bound on lambda_k because the span of their indicators is k-dimensional.
double indicator_span_upper_bound(const Graph& g, double p,
                                  const std::vector<VertexSubset>& subsets);

struct ShootingTrace {
  double lambda = 0.0;
  VertexFunction f;
  int zero_count = 0;
  double boundary_defect = 0.0;
};

/// Solves the eigen equation on the unit path P_n forward from f(1) = 1 using
/// the reflected extension f(0) = f(1); boundary_defect is the signed defect of
/// the equation at the last vertex (f(n+1) = f(n)).
ShootingTrace path_shoot(int n, double p, double lambda);

struct PathSpectrumOptions {
  double lambda_tol = 1e-12;
  int max_bisections = 200;
};

/// All n eigenpairs of Delta_p on the unit path, bracketed by generalized-zero
/// counts and refined by bisection on the boundary defect.
Spectrum path_spectrum(int n, double p, const PathSpectrumOptions& options = {});

}  // namespace plap
