#include "plap/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "plap/nodal.hpp"

namespace plap {

double cut_ratio(const Graph& g, const VertexSubset& a) {
  if (a.empty()) throw std::invalid_argument("cut ratio of the empty set");
  std::vector<char> in(g.n(), 0);
  double measure = 0.0;
  for (int u : a.vertices()) {
    if (u < 0 || u >= g.n()) throw std::invalid_argument("subset vertex out of range");
    in[u] = 1;
    measure += g.mu(u);
  }
  double boundary = 0.0;
  for (const auto& e : g.edges())
    if (in[e.u] != in[e.v]) boundary += e.w;
  return boundary / measure;
}

namespace {

using Family = std::vector<VertexSubset>;

Family canonical(Family family) {
  std::sort(family.begin(), family.end());
  return family;
}

double family_value(const Graph& g, const Family& family) {
  double worst = 0.0;
  for (const auto& a : family) worst = std::max(worst, cut_ratio(g, a));
  return worst;
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

class BranchAndBound {
 public:
  BranchAndBound(const Graph& g, int k) : g_(g), k_(k) {
    label_.assign(g.n(), -1);
    mu_.assign(k + 1, 0.0);
    boundary_.assign(k + 1, 0.0);
    undecided_mu_ = std::accumulate(g.mu().begin(), g.mu().end(), 0.0);
  }

  void seed(Family family, double value) {
    best_family_ = canonical(std::move(family));
    best_ = value;
  }

  CheegerResult run() {
    descend(0, 0);
    CheegerResult out;
    out.h = best_;
    out.family = best_family_;
    out.nodes = nodes_;
    return out;
  }

 private:
  void descend(int u, int opened) {
    ++nodes_;
    const int n = g_.n();
    if (u == n) {
      if (opened < k_) return;
      double value = 0.0;
      for (int b = 1; b <= k_; ++b) value = std::max(value, boundary_[b] / mu_[b]);
      if (value < best_ && !same_value(value, best_)) {
        best_ = value;
        best_family_ = current_family();
      } else if (same_value(value, best_)) {
        Family family = current_family();
        if (family < best_family_) best_family_ = std::move(family);
      }
      return;
    }
    if (n - u < k_ - opened) return;

    const int max_label = std::min(opened + 1, k_);
    for (int label = 0; label <= max_label; ++label) {
      assign(u, label);
      int now_open = std::max(opened, label);
      if (!prunable(now_open)) descend(u + 1, now_open);
      unassign(u, label);
    }
  }

  bool prunable(int opened) const {
    for (int b = 1; b <= opened; ++b) {
      double lower = boundary_[b] / (mu_[b] + undecided_mu_);
      if (lower > best_ && !same_value(lower, best_)) return true;
    }
    return false;
  }

  void assign(int u, int label) {
    label_[u] = label;
    mu_[label] += g_.mu(u);
    undecided_mu_ -= g_.mu(u);
    for (const auto& nb : g_.neighbors(u)) {
      int other = label_[nb.v];
      if (other < 0 || other == label) continue;
      if (label > 0) boundary_[label] += nb.w;
      if (other > 0) boundary_[other] += nb.w;
    }
  }

  void unassign(int u, int label) {
    for (const auto& nb : g_.neighbors(u)) {
      int other = label_[nb.v];
      if (other < 0 || other == label) continue;
      if (label > 0) boundary_[label] -= nb.w;
      if (other > 0) boundary_[other] -= nb.w;
    }
    mu_[label] -= g_.mu(u);
    undecided_mu_ += g_.mu(u);
    label_[u] = -1;
  }

  Family current_family() const {
    std::vector<std::vector<int>> blocks(k_);
    for (int u = 0; u < g_.n(); ++u)
      if (label_[u] > 0) blocks[label_[u] - 1].push_back(u);
    Family family;
    for (auto& b : blocks) family.emplace_back(std::move(b));
    return canonical(std::move(family));
  }

  const Graph& g_;
  int k_;
  std::vector<int> label_;
  std::vector<double> mu_;
  std::vector<double> boundary_;
  double undecided_mu_ = 0.0;
  double best_ = std::numeric_limits<double>::infinity();
  Family best_family_;
  long long nodes_ = 0;
};

// k singletons with the smallest cut ratios.
Family singleton_family(const Graph& g, int k) {
  std::vector<int> order(g.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return g.degree(a) / g.mu(a) < g.degree(b) / g.mu(b);
  });
  Family family;
  for (int i = 0; i < k; ++i) family.emplace_back(std::vector<int>{order[i]});
  return family;
}

}  // namespace

CheegerResult approximate_multiway_cheeger(const Graph& g, int k) {
  if (k < 1 || k > g.n()) throw std::invalid_argument("k must satisfy 1 <= k <= n");
  CheegerResult out;
  out.exact = false;
  if (k == 1) {
    std::vector<int> all(g.n());
    std::iota(all.begin(), all.end(), 0);
    out.family = {VertexSubset(all)};
    out.h = cut_ratio(g, out.family[0]);
    return out;
  }

  struct Candidate {
    VertexSubset set;
    double ratio;
  };
  std::vector<Candidate> candidates;
  Spectrum spectrum = solve_p2_spectrum(g);
  for (std::size_t j = 1; j < spectrum.pairs.size(); ++j) {
    const auto& f = spectrum.pairs[j].f;
    for (const auto& d : strong_nodal_domains(g, f, default_zero_tol(f)).domains) {
      VertexFunction restricted = VertexFunction::Zero(g.n());
      for (int u : d.vertices.vertices()) restricted[u] = f[u];
      SweepResult sweep = sweep_cut(g, restricted, 2.0);
      candidates.push_back({sweep.set, sweep.ratio});
      candidates.push_back({d.vertices, cut_ratio(g, d.vertices)});
    }
  }
  for (int u = 0; u < g.n(); ++u) {
    VertexSubset single(std::vector<int>{u});
    candidates.push_back({single, cut_ratio(g, single)});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });

  std::vector<char> used(g.n(), 0);
  int free_count = g.n();
  Family family;
  for (const auto& c : candidates) {
    if (static_cast<int>(family.size()) == k) break;
    bool disjoint = std::none_of(c.set.vertices().begin(), c.set.vertices().end(),
                                 [&](int u) { return used[u]; });
    int remaining_needed = k - static_cast<int>(family.size()) - 1;
    if (!disjoint || free_count - static_cast<int>(c.set.size()) < remaining_needed) continue;
    for (int u : c.set.vertices()) used[u] = 1;
    free_count -= static_cast<int>(c.set.size());
    family.push_back(c.set);
  }
  out.family = canonical(std::move(family));
  out.h = family_value(g, out.family);
  return out;
}

CheegerResult multiway_cheeger(const Graph& g, int k, bool allow_approx) {
  if (k < 1 || k > g.n()) throw std::invalid_argument("k must satisfy 1 <= k <= n");
  if (g.n() > kExactCheegerMaxN) {
    if (!allow_approx)
      throw std::invalid_argument("exact h_k is limited to n <= " +
                                  std::to_string(kExactCheegerMaxN) + " (use approximation)");
    return approximate_multiway_cheeger(g, k);
  }
  BranchAndBound search(g, k);
  Family seed = singleton_family(g, k);
  double seed_value = family_value(g, seed);
  search.seed(std::move(seed), seed_value);
  return search.run();
}

std::vector<CheegerResult> cheeger_constants(const Graph& g, int k_max, bool allow_approx) {
  std::vector<CheegerResult> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(multiway_cheeger(g, k, allow_approx));
  return out;
}

bool SweepResult::within_bound() const { return ratio <= bound * (1.0 + 1e-12) + 1e-12; }

SweepResult sweep_cut(const Graph& g, const VertexFunction& f, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("sweep_cut needs p > 1");
  if (f.size() != g.n()) throw std::invalid_argument("vertex function length mismatch");
  std::vector<double> level(g.n());
  for (int u = 0; u < g.n(); ++u) level[u] = static_cast<double>(pow(abs(f[u]), Real(p)));
  double top = *std::max_element(level.begin(), level.end());
  if (!(top > 0.0)) throw std::invalid_argument("sweep cut of the zero function");

  std::vector<double> thresholds(level);
  thresholds.push_back(0.0);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  SweepResult best;
  best.ratio = std::numeric_limits<double>::infinity();
  for (double t : thresholds) {
    if (t >= top) break;
    std::vector<int> members;
    for (int u = 0; u < g.n(); ++u)
      if (level[u] > t) members.push_back(u);
    VertexSubset a(std::move(members));
    double c = cut_ratio(g, a);
    if (c < best.ratio) {
      best.ratio = c;
      best.set = std::move(a);
    }
  }
  best.bound = p * std::pow(rayleigh_quotient(g, f, p), 1.0 / p) *
               std::pow(tau(g) / 2.0, 1.0 / conjugate_exponent(p));
  return best;
}

std::vector<CheegerCertificate> certify_cheeger(const Graph& g, const Spectrum& spectrum,
                                                double zero_tol) {
  return certify_cheeger(g, spectrum, cheeger_constants(g, g.n()), zero_tol);
}

std::vector<CheegerCertificate> certify_cheeger(const Graph& g, const Spectrum& spectrum,
                                                const std::vector<CheegerResult>& constants,
                                                double zero_tol) {
  const double p = spectrum.p;
  if (!(p > 1.0)) throw std::invalid_argument("Cheeger certification needs p > 1");
  for (const auto& pair : spectrum.pairs)
    if (pair.residual > 1e-8)
      throw std::invalid_argument("Cheeger certification needs residuals <= 1e-8");
  const double t = tau(g);
  std::vector<CheegerCertificate> out;
  for (std::size_t i = 0; i < spectrum.pairs.size(); ++i) {
    const auto& pair = spectrum.pairs[i];
    CheegerCertificate c;
    c.p = p;
    c.k = static_cast<int>(i) + 1;
    c.lambda_k = pair.lambda;
    double tol = zero_tol < 0.0 ? default_zero_tol(pair.f) : zero_tol;
    c.m = static_cast<int>(strong_nodal_domains(g, pair.f, tol).count());
    if (c.k > static_cast<int>(constants.size()) || c.m > static_cast<int>(constants.size()))
      throw std::invalid_argument("missing Cheeger constants for certification");
    c.h_k = constants[c.k - 1].h;
    c.h_m = constants[c.m - 1].h;
    c.tau = t;
    c.lower = std::pow(2.0 / t, p - 1.0) * std::pow(c.h_m / p, p);
    c.upper = std::pow(2.0, p - 1.0) * c.h_k;
    c.tol = 1e-9 + 1e-6 * std::abs(c.lambda_k);
    c.lower_ok = c.lower - c.tol <= c.lambda_k;
    c.upper_ok = c.lambda_k <= c.upper + c.tol;
    out.push_back(c);
  }
  return out;
}

}  // namespace plap
