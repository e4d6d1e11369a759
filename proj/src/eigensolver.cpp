#include "plap/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "plap/cheeger.hpp"

namespace plap {

std::string to_string(SpectrumMethod method) {
  switch (method) {
    case SpectrumMethod::dense_p2:
      return "dense_p2";
    case SpectrumMethod::continuation:
      return "continuation";
    case SpectrumMethod::path_shooting:
      return "path_shooting";
  }
  return "unknown";
}

namespace {

// Deterministic sign: first entry that is not negligible is positive.
void fix_sign(VertexFunction& f) {
  Real scale = f.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (abs(f[i]) > 1e-8 * scale) {
      if (f[i] < 0) f = -f;
      return;
    }
  }
}

}  // namespace

Spectrum solve_p2_spectrum(const Graph& g) {
  const int n = g.n();
  using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix lap = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    lap(e.u, e.u) += e.w;
    lap(e.v, e.v) += e.w;
    lap(e.u, e.v) -= e.w;
    lap(e.v, e.u) -= e.w;
  }
  Eigen::Matrix<long double, Eigen::Dynamic, 1> inv_sqrt_mu(n);
  for (int u = 0; u < n; ++u) inv_sqrt_mu[u] = 1 / std::sqrt(static_cast<long double>(g.mu(u)));
  Matrix sym = inv_sqrt_mu.asDiagonal() * lap * inv_sqrt_mu.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense symmetric eigensolve failed");

  Spectrum spectrum;
  spectrum.p = 2.0;
  spectrum.method = SpectrumMethod::dense_p2;
  if (!is_connected(g)) spectrum.warnings.push_back("graph disconnected");
  for (int k = 0; k < n; ++k) {
    EigenPair pair;
    pair.p = 2.0;
    pair.lambda = std::max(0.0, static_cast<double>(solver.eigenvalues()[k]));
    VertexFunction f = (inv_sqrt_mu.asDiagonal() * solver.eigenvectors().col(k)).cast<Real>();
    fix_sign(f);
    pair.f = normalize_lp(g, f, 2.0);
    pair.normalized = true;
    pair.residual = eigen_residual(g, pair.f, pair.lambda, 2.0);
    spectrum.pairs.push_back(std::move(pair));
    spectrum.diagnostics.emplace_back();
  }
  return spectrum;
}

double indicator_span_upper_bound(const Graph& g, double p,
                                  const std::vector<VertexSubset>& subsets) {
  std::vector<char> used(g.n(), 0);
  double worst = 0.0;
  for (const auto& a : subsets) {
    if (a.empty()) throw std::invalid_argument("empty subset in indicator span");
    for (int u : a.vertices()) {
      if (u < 0 || u >= g.n()) throw std::invalid_argument("subset vertex out of range");
      if (used[u]) throw std::invalid_argument("subsets overlap");
      used[u] = 1;
    }
    worst = std::max(worst, cut_ratio(g, a));
  }
  return std::pow(2.0, p - 1.0) * worst;
}

namespace {

// Signed combinations sum_i s_i mu(A_i)^(-1/p) 1_{A_i} of the indicators of
// each minimizing family, s_1 = +1; at most `patterns` sign vectors per family.
std::vector<VertexFunction> family_starts(const Graph& g, double p,
                                          const std::vector<CheegerResult>& cheeger,
                                          int patterns) {
  std::vector<VertexFunction> out;
  for (const auto& c : cheeger) {
    const int k = static_cast<int>(c.family.size());
    if (k < 2) continue;
    std::vector<Real> amplitude;
    for (const auto& a : c.family) {
      Real mass = 0;
      for (int v : a.vertices()) mass += g.mu(v);
      amplitude.push_back(pow(mass, -1 / Real(p)));
    }
    const std::uint64_t all = k - 1 >= 63 ? ~0ULL : (1ULL << (k - 1));
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    for (int t = 0; t < patterns && static_cast<std::uint64_t>(t) < all; ++t) {
      std::uint64_t bits = all <= static_cast<std::uint64_t>(patterns) ? t : rng() % all;
      VertexFunction f = VertexFunction::Zero(g.n());
      for (int i = 0; i < k; ++i) {
        Real s = (i > 0 && ((bits >> (i - 1)) & 1)) ? -1 : 1;
        for (int v : c.family[i].vertices()) f[v] = s * amplitude[i];
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace

Spectrum variational_spectrum(const Graph& g, double p, const ContinuationOptions& options,
                              const std::vector<CheegerResult>* cheeger) {
  if (!(p > 1.0)) throw std::invalid_argument("variational_spectrum needs p > 1");
  Spectrum base = solve_p2_spectrum(g);
  if (p == 2.0) return base;

  const int n = g.n();
  Spectrum out;
  out.p = p;
  out.method = SpectrumMethod::continuation;
  out.warnings = base.warnings;

  std::vector<CheegerResult> computed;
  if (!cheeger && n <= kUpperBoundCheckMaxN) {
    computed = cheeger_constants(g, n);
    cheeger = &computed;
  }
  const bool have_cheeger = cheeger && static_cast<int>(cheeger->size()) >= n;

  // Ties at p = 2: each basis vector of the eigenspace is followed separately.
  std::vector<bool> ambiguous(n, false);
  for (int k = 0; k + 1 < n; ++k) {
    double a = base.pairs[k].lambda;
    double b = base.pairs[k + 1].lambda;
    if (std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(b)))
      ambiguous[k] = ambiguous[k + 1] = true;
  }

  std::vector<PairDiagnostics> diags(n);
  for (int k = 0; k < n; ++k) {
    diags[k].branch_ambiguous = ambiguous[k];
    if (ambiguous[k]) diags[k].note = "degenerate p=2 eigenspace; branch may be ambiguous";
  }
  std::vector<EigenPair> continued = continue_spectrum(g, base.pairs, p, options, &diags);
  std::vector<EigenPair> pairs;
  std::vector<VertexFunction> starts;
  {
    std::vector<PairDiagnostics> kept;
    for (int k = 0; k < n; ++k) {
      if (diags[k].branch_ended) {
        starts.push_back(continued[k].f);
        out.warnings.push_back("continuation of pair " + std::to_string(k + 1) + ": " +
                               diags[k].note);
        continue;
      }
      pairs.push_back(std::move(continued[k]));
      kept.push_back(std::move(diags[k]));
    }
    diags = std::move(kept);
  }

  if (have_cheeger && options.search_patterns > 0) {
    auto more = family_starts(g, p, *cheeger, options.search_patterns);
    starts.insert(starts.end(), more.begin(), more.end());
  }
  if (!starts.empty()) {
    for (auto& pair : search_eigenpairs(g, p, starts, pairs, options)) {
      PairDiagnostics d;
      d.precision_limited = pair.residual > options.accept_residual;
      d.note = "found by Newton from a Cheeger family start or an ended branch";
      pairs.push_back(std::move(pair));
      diags.push_back(std::move(d));
    }
  }

  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return pairs[a].lambda < pairs[b].lambda; });
  if (static_cast<int>(pairs.size()) < n) {
    EigenPair last = pairs.empty() ? EigenPair{} : pairs[order.back()];
    throw ContinuationError("found " + std::to_string(pairs.size()) + " of " + std::to_string(n) +
                                " eigenpairs at p=" + std::to_string(p),
                            last, p);
  }
  for (int k = 0; k < n; ++k) {
    EigenPair pair = std::move(pairs[order[k]]);
    PairDiagnostics d = std::move(diags[order[k]]);
    if (pair.residual > options.target_residual) {
      EigenPair polished = newton_polish(g, pair, options, &d.newton_iterations);
      if (polished.residual < pair.residual && std::abs(polished.lambda - pair.lambda) <= 1e-9)
        pair = std::move(polished);
      d.precision_limited = pair.residual > options.accept_residual;
    }
    out.pairs.push_back(std::move(pair));
    out.diagnostics.push_back(std::move(d));
  }

  if (have_cheeger) {
    for (int k = 1; k <= n; ++k) {
      double bound = std::pow(2.0, p - 1.0) * (*cheeger)[k - 1].h;
      auto& diag = out.diagnostics[k - 1];
      diag.upper_bound = bound;
      double lambda = out.pairs[k - 1].lambda;
      if (lambda > bound + 1e-9 + 1e-6 * lambda) {
        diag.upper_bound_violated = true;
        diag.note += (diag.note.empty() ? "" : "; ");
        diag.note += "continuation left the variational branch";
        out.warnings.push_back("pair " + std::to_string(k) +
                               " exceeds 2^(p-1) h_k: continuation left the variational branch");
      }
    }
  }
  return out;
}

}  // namespace plap
