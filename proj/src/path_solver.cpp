#include <cmath>
#include <string>

#include "plap/eigensolver.hpp"

namespace plap {

namespace {

// Phi_q with 1/p + 1/q = 1 inverts Phi_p.
Real phi_inverse(double p, Real y) {
  if (y == 0.0) return 0.0;
  return copysign(pow(abs(y), 1 / (Real(p) - 1)), y);
}

int count_generalized_zeros(const VertexFunction& f) {
  int count = 0;
  for (Eigen::Index a = 0; a + 1 < f.size(); ++a)
    if (f[a] != 0.0 && f[a] * f[a + 1] <= 0.0) ++count;
  return count;
}

struct Bracket {
  double below;  // predicate false
  double above;  // predicate true
};

}  // namespace

ShootingTrace path_shoot(int n, double p, double lambda) {
  if (n < 2) throw std::invalid_argument("path_shoot needs n >= 2");
  if (!(p > 1.0)) throw std::invalid_argument("path_shoot needs p > 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("path_shoot needs lambda >= 0");

  VertexFunction f(n);
  f[0] = 1.0;
  Real prev = f[0];  // reflected extension f(0) = f(1)
  for (int i = 0; i + 1 < n; ++i) {
    // Phi_p(f_i - f_{i-1}) + Phi_p(f_i - f_{i+1}) = lambda Phi_p(f_i)
    Real rhs = lambda * phi(p, f[i]) - phi(p, f[i] - prev);
    f[i + 1] = f[i] - phi_inverse(p, rhs);
    prev = f[i];
    // The recurrence is 1-homogeneous; rescale to keep entries bounded.
    Real big = abs(f[i + 1]);
    if (big > 1e100) {
      f.head(i + 2) /= big;
      prev /= big;
    }
  }
  Real last = f[n - 1];
  Real defect = phi(p, last - f[n - 2]) - lambda * phi(p, last);

  ShootingTrace trace;
  trace.lambda = lambda;
  trace.zero_count = count_generalized_zeros(f);
  trace.boundary_defect = static_cast<double>(
      defect / std::max(Real(1), Real(pow(f.cwiseAbs().maxCoeff(), Real(p) - 1))));
  trace.f = std::move(f);
  return trace;
}

Spectrum path_spectrum(int n, double p, const PathSpectrumOptions& options) {
  if (n < 2) throw std::invalid_argument("path_spectrum needs n >= 2");
  if (!(p > 1.0)) throw std::invalid_argument("path_spectrum needs p > 1");
  const Graph g = path_graph(n, MuMode::unit);

  // lambda_n <= 2^(p-1) h_n <= 2^(p-1) * 2 on the unit path.
  const double top = std::pow(2.0, p) + 1.0;
  if (path_shoot(n, p, top).zero_count < n - 1)
    throw ShootingError("upper bracket " + std::to_string(top) + " holds fewer than n-1 zeros");

  // transitions[j] brackets inf{lambda : zero_count(lambda) >= j}.
  std::vector<Bracket> transitions(n);
  transitions[0] = {0.0, 0.0};
  for (int j = 1; j < n; ++j) {
    Bracket b{0.0, top};
    for (int it = 0; it < options.max_bisections && b.above - b.below > options.lambda_tol;
         ++it) {
      double mid = 0.5 * (b.below + b.above);
      if (path_shoot(n, p, mid).zero_count >= j)
        b.above = mid;
      else
        b.below = mid;
    }
    transitions[j] = b;
    if (j > 1 && transitions[j].above < transitions[j - 1].above)
      throw ShootingError("zero count is not monotone in lambda");
  }

  Spectrum spectrum;
  spectrum.p = p;
  spectrum.method = SpectrumMethod::path_shooting;

  {
    EigenPair first;
    first.p = p;
    first.lambda = 0.0;
    first.f = normalize_lp(g, VertexFunction::Ones(n), p);
    first.normalized = true;
    first.residual = eigen_residual(g, first.f, 0.0, p);
    spectrum.pairs.push_back(std::move(first));
    spectrum.diagnostics.emplace_back();
  }

  for (int k = 2; k <= n; ++k) {
    double lo = transitions[k - 1].above;
    double hi = k < n ? transitions[k].below : top;
    ShootingTrace at_lo = path_shoot(n, p, lo);
    ShootingTrace at_hi = path_shoot(n, p, hi);
    if (at_lo.zero_count != k - 1 || at_hi.zero_count != k - 1)
      throw ShootingError("bracket for lambda_" + std::to_string(k) +
                          " does not have k-1 generalized zeros");
    double sign_lo = at_lo.boundary_defect;
    if (sign_lo == 0.0 || at_hi.boundary_defect == 0.0 ||
        (sign_lo > 0) == (at_hi.boundary_defect > 0)) {
      if (sign_lo == 0.0) hi = lo;
      else if (at_hi.boundary_defect == 0.0) lo = hi;
      else
        throw ShootingError("boundary defect does not change sign in the bracket for lambda_" +
                            std::to_string(k));
    }

    int iterations = 0;
    while (hi - lo > options.lambda_tol && iterations < options.max_bisections) {
      double mid = 0.5 * (lo + hi);
      double d = path_shoot(n, p, mid).boundary_defect;
      if (d == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((d > 0) == (sign_lo > 0))
        lo = mid;
      else
        hi = mid;
      ++iterations;
    }
    double lambda = 0.5 * (lo + hi);
    ShootingTrace trace = path_shoot(n, p, lambda);
    if (trace.zero_count != k - 1)
      throw ShootingError("eigenfunction " + std::to_string(k) + " has " +
                          std::to_string(trace.zero_count) + " generalized zeros");

    EigenPair pair;
    pair.p = p;
    pair.lambda = lambda;
    pair.f = normalize_lp(g, trace.f, p);
    pair.normalized = true;
    pair.residual = eigen_residual(g, pair.f, lambda, p);

    PairDiagnostics diag;
    diag.steps = iterations;
    if (pair.residual > 1e-10) {
      // Bisection stalls when the defect is very flat or steep in lambda;
      // finish with Newton at fixed p and keep it only if it stays on the branch.
      ContinuationOptions polish;
      EigenPair refined = newton_polish(g, pair, polish, &diag.newton_iterations);
      ShootingTrace check = path_shoot(n, p, refined.lambda);
      if (refined.residual < pair.residual && check.zero_count == k - 1) {
        pair = std::move(refined);
        diag.note = "refined by Newton after bisection";
      }
    }
    if (spectrum.pairs.back().lambda >= pair.lambda)
      throw ShootingError("path eigenvalues not strictly increasing at k=" + std::to_string(k));
    spectrum.pairs.push_back(std::move(pair));
    spectrum.diagnostics.push_back(std::move(diag));
  }
  return spectrum;
}

}  // namespace plap
