#include "plap/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

namespace plap {

std::string to_string(NodalKind kind) { return kind == NodalKind::strong ? "strong" : "weak"; }

double default_zero_tol(const VertexFunction& f) {
  return f.size() == 0 ? 0.0 : 1e-9 * static_cast<double>(f.cwiseAbs().maxCoeff());
}

namespace {

double resolve_tol(const VertexFunction& f, double zero_tol) {
  return zero_tol < 0.0 ? default_zero_tol(f) : zero_tol;
}

// Connected components of the subgraph induced by `member`, in order of their
// smallest vertex.
std::vector<VertexSubset> components(const Graph& g, const std::vector<char>& member) {
  std::vector<VertexSubset> out;
  std::vector<char> seen(g.n(), 0);
  for (int s = 0; s < g.n(); ++s) {
    if (!member[s] || seen[s]) continue;
    std::vector<int> comp{s};
    seen[s] = 1;
    std::queue<int> queue;
    queue.push(s);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop();
      for (const auto& nb : g.neighbors(u)) {
        if (member[nb.v] && !seen[nb.v]) {
          seen[nb.v] = 1;
          comp.push_back(nb.v);
          queue.push(nb.v);
        }
      }
    }
    out.emplace_back(std::move(comp));
  }
  return out;
}

VertexSubset zero_set_of(const VertexFunction& f, double tol) {
  std::vector<int> z;
  for (Eigen::Index u = 0; u < f.size(); ++u)
    if (abs(f[u]) <= tol) z.push_back(static_cast<int>(u));
  return VertexSubset(std::move(z));
}

void sort_domains(std::vector<NodalDomain>& domains) {
  std::sort(domains.begin(), domains.end(), [](const NodalDomain& a, const NodalDomain& b) {
    return a.vertices < b.vertices;
  });
}

}  // namespace

NodalDecomposition strong_nodal_domains(const Graph& g, const VertexFunction& f,
                                        double zero_tol) {
  if (f.size() != g.n()) throw std::invalid_argument("vertex function length mismatch");
  double tol = resolve_tol(f, zero_tol);
  NodalDecomposition out;
  out.kind = NodalKind::strong;
  out.zero_set = zero_set_of(f, tol);
  for (int sign : {1, -1}) {
    std::vector<char> member(g.n());
    for (int u = 0; u < g.n(); ++u) member[u] = sign * f[u] > tol;
    for (auto& c : components(g, member)) out.domains.push_back({std::move(c), sign});
  }
  sort_domains(out.domains);
  return out;
}

NodalDecomposition weak_nodal_domains(const Graph& g, const VertexFunction& f,
                                      double zero_tol) {
  if (f.size() != g.n()) throw std::invalid_argument("vertex function length mismatch");
  double tol = resolve_tol(f, zero_tol);
  NodalDecomposition out;
  out.kind = NodalKind::weak;
  out.zero_set = zero_set_of(f, tol);
  std::vector<VertexSubset> positive;
  for (int sign : {1, -1}) {
    std::vector<char> member(g.n());
    for (int u = 0; u < g.n(); ++u) member[u] = sign * f[u] >= -tol;
    for (auto& c : components(g, member)) {
      // f vanishes on the whole component: it is maximal for both sign sets.
      if (sign < 0 && std::find(positive.begin(), positive.end(), c) != positive.end())
        continue;
      if (sign > 0) positive.push_back(c);
      out.domains.push_back({std::move(c), sign});
    }
  }
  sort_domains(out.domains);
  return out;
}

std::vector<int> generalized_zeros(const Graph& g, const VertexFunction& f, double zero_tol) {
  if (!is_path(g)) throw std::invalid_argument("generalized zeros are defined on paths only");
  if (f.size() != g.n()) throw std::invalid_argument("vertex function length mismatch");
  double tol = resolve_tol(f, zero_tol);
  auto sgn = [&](const Real& x) { return abs(x) <= tol ? 0 : (x > 0 ? 1 : -1); };
  std::vector<int> out;
  for (int a = 0; a + 1 < g.n(); ++a)
    if (sgn(f[a]) != 0 && sgn(f[a]) * sgn(f[a + 1]) <= 0) out.push_back(a);
  return out;
}

double nodal_space_max_rq(const Graph& g, const EigenPair& pair, NodalKind kind,
                          int sample_count, std::uint64_t seed, double zero_tol) {
  if (pair.p > 1.0 && pair.residual > 1e-8)
    throw std::invalid_argument("nodal_space_max_rq needs an eigenpair with residual <= 1e-8");
  double tol = resolve_tol(pair.f, zero_tol);
  NodalDecomposition dec = kind == NodalKind::strong ? strong_nodal_domains(g, pair.f, tol)
                                                     : weak_nodal_domains(g, pair.f, tol);

  // Restrict to the nonzero part of each domain; weak domains then become disjoint.
  std::vector<VertexFunction> basis;
  for (const auto& d : dec.domains) {
    VertexFunction b = VertexFunction::Zero(g.n());
    for (int u : d.vertices.vertices())
      if (abs(pair.f[u]) > tol) b[u] = pair.f[u];
    if (b.cwiseAbs().maxCoeff() > 0.0) basis.push_back(std::move(b));
  }
  if (basis.empty()) throw std::invalid_argument("empty nodal decomposition");
  const int m = static_cast<int>(basis.size());

  double best = -std::numeric_limits<double>::infinity();
  auto evaluate = [&](const Eigen::VectorXd& alpha) {
    VertexFunction h = VertexFunction::Zero(g.n());
    for (int i = 0; i < m; ++i) h += alpha[i] * basis[i];
    if (h.cwiseAbs().maxCoeff() == 0.0) return;
    best = std::max(best, rayleigh_quotient(g, h, pair.p));
  };

  for (int i = 0; i < m; ++i) evaluate(Eigen::VectorXd::Unit(m, i));
  if (m <= 12) {
    // R_p is even, so fixing the first sign covers every pattern.
    for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
      Eigen::VectorXd alpha = Eigen::VectorXd::Ones(m);
      for (int i = 1; i < m; ++i)
        if (mask & (1u << (i - 1))) alpha[i] = -1.0;
      evaluate(alpha);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd alpha(m);
    for (int i = 0; i < m; ++i) alpha[i] = normal(rng);
    double norm = alpha.norm();
    if (norm == 0.0) continue;
    evaluate(alpha / norm);
  }
  return best;
}

bool NodalReport::all_pass() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const auto& c) { return c.pass(); });
}

NodalPairCheck certify_nodal_pair(const Graph& g, double p, const VertexFunction& f,
                                  double lambda, int k, int first_index, int multiplicity,
                                  double zero_tol) {
  double tol = resolve_tol(f, zero_tol);
  NodalPairCheck c;
  c.k = k;
  c.first_index = first_index;
  c.multiplicity = multiplicity;
  c.lambda = lambda;
  c.strong = static_cast<int>(strong_nodal_domains(g, f, tol).count());
  c.weak = static_cast<int>(weak_nodal_domains(g, f, tol).count());
  c.strong_bound = first_index + multiplicity - 1;
  c.weak_bound = p > 1.0 ? first_index : first_index + multiplicity - 1;
  c.strong_ok = c.strong <= c.strong_bound;
  c.weak_ok = c.weak <= c.weak_bound;
  if (p > 1.0 && first_index == 2) {
    c.second_pair_checked = true;
    c.second_pair_ok = c.weak == 2;
  }
  return c;
}

NodalReport certify_nodal_bounds(const Graph& g, const Spectrum& spectrum,
                                 double multiplicity_tol, double zero_tol) {
  NodalReport report;
  report.p = spectrum.p;
  const int count = static_cast<int>(spectrum.pairs.size());
  int group_start = 0;
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      double a = spectrum.pairs[i - 1].lambda;
      double b = spectrum.pairs[i].lambda;
      if (std::abs(b - a) > multiplicity_tol * std::max({std::abs(a), std::abs(b), 1e-300}))
        group_start = i;
    }
    int group_end = group_start;
    while (group_end + 1 < count) {
      double a = spectrum.pairs[group_end].lambda;
      double b = spectrum.pairs[group_end + 1].lambda;
      if (std::abs(b - a) > multiplicity_tol * std::max({std::abs(a), std::abs(b), 1e-300}))
        break;
      ++group_end;
    }
    const auto& pair = spectrum.pairs[i];
    report.pairs.push_back(certify_nodal_pair(g, spectrum.p, pair.f, pair.lambda, i + 1,
                                              group_start + 1, group_end - group_start + 1,
                                              zero_tol));
  }
  return report;
}

}  // namespace plap
