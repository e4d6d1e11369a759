#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>

#include "plap/eigensolver.hpp"

namespace plap {

namespace {

// Newton runs in long double; accepted pairs are refined in Real.
using Work = long double;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using WorkVector = Vec<Work>;

template <typename T>
T phi_t(double p, const T& x) {
  using std::abs;
  using std::copysign;
  using std::pow;
  if (x == 0) return T(0);
  if (p == 2.0) return x;
  return copysign(pow(abs(x), T(p - 1.0)), x);
}

// d/dx Phi_p(x) = (p-1)|x|^(p-2), floored at |x| = 1e-10 for p < 2.
template <typename T>
T phi_derivative(double p, const T& x) {
  using std::abs;
  using std::pow;
  if (p == 2.0) return T(1);
  T ax = abs(x);
  if (p < 2.0 && ax < T(1e-10)) ax = T(1e-10);
  return T(p - 1.0) * pow(ax, T(p - 2.0));
}

template <typename T>
T max_abs(const Vec<T>& v) {
  T m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    using std::abs;
    T a = abs(v[i]);
    if (a > m) m = a;
  }
  return m;
}

template <typename T>
T euclid(const Vec<T>& v) {
  using std::sqrt;
  return sqrt(v.squaredNorm());
}

// Eigen equation in f and lambda, used for p >= 2.
template <typename T>
struct System {
  const Graph& g;
  double p;

  Vec<T> residual(const Vec<T>& x) const {
    using std::abs;
    using std::pow;
    const int n = g.n();
    const T lambda = x[n];
    Vec<T> out = Vec<T>::Zero(n + 1);
    for (const auto& e : g.edges()) {
      T flux = T(e.w) * phi_t(p, T(x[e.u] - x[e.v]));
      out[e.u] += flux;
      out[e.v] -= flux;
    }
    T norm_p = 0;
    for (int u = 0; u < n; ++u) {
      out[u] -= lambda * T(g.mu(u)) * phi_t(p, x[u]);
      norm_p += T(g.mu(u)) * pow(abs(x[u]), T(p));
    }
    out[n] = (norm_p - 1) / T(p);
    return out;
  }

  Mat<T> jacobian(const Vec<T>& x) const {
    const int n = g.n();
    const T lambda = x[n];
    Mat<T> jac = Mat<T>::Zero(n + 1, n + 1);
    for (const auto& e : g.edges()) {
      T d = T(e.w) * phi_derivative(p, T(x[e.u] - x[e.v]));
      jac(e.u, e.u) += d;
      jac(e.v, e.v) += d;
      jac(e.u, e.v) -= d;
      jac(e.v, e.u) -= d;
    }
    for (int u = 0; u < n; ++u) {
      jac(u, u) -= lambda * T(g.mu(u)) * phi_derivative(p, x[u]);
      T ph = T(g.mu(u)) * phi_t(p, x[u]);
      jac(u, n) = -ph;
      jac(n, u) = ph;
    }
    return jac;
  }
};

// For p < 2, Phi_p is not Lipschitz at 0 and Newton in f stalls near zeros
// and ties. The mixed system in (f, y, z, lambda) with y = Phi_p(f) and
// z_e = Phi_p(f(u) - f(v)) is written as f = Phi_q(y), f(u) - f(v) = Phi_q(z),
// and Phi_q is C^1 because q > 2.
template <typename T>
struct MixedSystem {
  const Graph& g;
  double p;
  double q;

  int size() const { return 2 * g.n() + static_cast<int>(g.edges().size()) + 1; }

  Vec<T> pack(const Vec<T>& f, const T& lambda) const {
    const int n = g.n();
    Vec<T> x(size());
    x.head(n) = f;
    for (int u = 0; u < n; ++u) x[n + u] = phi_t(p, f[u]);
    int i = 2 * n;
    for (const auto& e : g.edges()) x[i++] = phi_t(p, T(f[e.u] - f[e.v]));
    x[size() - 1] = lambda;
    return x;
  }

  Vec<T> residual(const Vec<T>& x) const {
    const int n = g.n();
    const T lambda = x[size() - 1];
    Vec<T> r = Vec<T>::Zero(size());
    int i = 2 * n;
    for (const auto& e : g.edges()) {
      T z = x[i];
      r[e.u] += T(e.w) * z;
      r[e.v] -= T(e.w) * z;
      r[i] = x[e.u] - x[e.v] - phi_t(q, z);
      ++i;
    }
    T norm_p = 0;
    for (int u = 0; u < n; ++u) {
      r[u] -= lambda * T(g.mu(u)) * x[n + u];
      r[n + u] = x[u] - phi_t(q, x[n + u]);
      norm_p += T(g.mu(u)) * x[u] * x[n + u];
    }
    r[size() - 1] = (norm_p - 1) / T(p);
    return r;
  }

  Mat<T> jacobian(const Vec<T>& x) const {
    const int n = g.n();
    const int last = size() - 1;
    const T lambda = x[last];
    Mat<T> jac = Mat<T>::Zero(size(), size());
    int i = 2 * n;
    for (const auto& e : g.edges()) {
      jac(e.u, i) += T(e.w);
      jac(e.v, i) -= T(e.w);
      jac(i, e.u) = 1;
      jac(i, e.v) = -1;
      jac(i, i) = -phi_derivative(q, x[i]);
      ++i;
    }
    for (int u = 0; u < n; ++u) {
      jac(u, n + u) = -lambda * T(g.mu(u));
      jac(u, last) = -T(g.mu(u)) * x[n + u];
      jac(n + u, u) = 1;
      jac(n + u, n + u) = -phi_derivative(q, x[n + u]);
      jac(last, u) = T(g.mu(u)) * x[n + u] / T(p);
      jac(last, n + u) = T(g.mu(u)) * x[u] / T(p);
    }
    return jac;
  }
};

bool is_constant_pair(const EigenPair& pair) {
  Real scale = max_abs(pair.f);
  return std::abs(pair.lambda) <= 1e-10 && pair.f.maxCoeff() - pair.f.minCoeff() <= 1e-8 * scale;
}

// Damped Newton with Armijo backtracking on the Euclidean residual norm.
template <typename T, typename Sys>
int damped_newton(Vec<T>& x, const Sys& sys, int max_iterations, double stop) {
  Vec<T> res = sys.residual(x);
  T merit = euclid(res);
  int it = 0;
  for (; it < max_iterations && merit > T(stop); ++it) {
    Vec<T> delta = sys.jacobian(x).colPivHouseholderQr().solve(-res);
    if (!delta.allFinite()) break;
    T t = 1;
    bool improved = false;
    while (t >= T(1e-10)) {
      Vec<T> x_try = x + t * delta;
      Vec<T> res_try = sys.residual(x_try);
      T merit_try = euclid(res_try);
      if (merit_try <= (1 - T(1e-4) * t) * merit) {
        x = std::move(x_try);
        res = std::move(res_try);
        merit = merit_try;
        improved = true;
        break;
      }
      t /= 2;
    }
    if (!improved) break;
  }
  return it;
}

// Newton in double until it stalls or reaches the double floor, then in long
// double from there.
template <template <typename> class Sys, typename... Args>
int staged_newton(WorkVector& x, int max_iterations, double stop, Args&&... args) {
  Sys<double> fast{args...};
  Vec<double> xd = x.cast<double>();
  int it = damped_newton(xd, fast, max_iterations, std::max(stop, 1e-12));
  if (xd.allFinite()) x = xd.cast<Work>();
  Sys<Work> exact{args...};
  return it + damped_newton(x, exact, 12, stop);
}

EigenPair make_pair(const Graph& g, double p, const VertexFunction& f, double lambda) {
  EigenPair out;
  out.p = p;
  out.lambda = lambda;
  out.f = normalize_lp(g, f, p);
  out.normalized = true;
  out.residual = eigen_residual(g, out.f, out.lambda, p);
  return out;
}

// Newton in long double; `backward` receives the max-norm residual of the
// mixed system for p < 2 (infinity for p >= 2) and `solution` the final Newton
// vector. `start` overrides the initial Newton vector (mixed variables for
// p < 2, (f, lambda) otherwise).
EigenPair polish(const Graph& g, const EigenPair& guess, const ContinuationOptions& options,
                 int* iterations, Work* backward, WorkVector* solution,
                 const WorkVector* start = nullptr) {
  const int n = g.n();
  const double p = guess.p;
  WorkVector f = normalize_lp(g, guess.f, p).cast<Work>();
  Work lambda = guess.lambda;
  const double stop = 0.01 * options.target_residual;
  int it = 0;
  if (p < 2.0) {
    MixedSystem<Work> sys{g, p, conjugate_exponent(p)};
    WorkVector x = start ? *start : sys.pack(f, lambda);
    it = staged_newton<MixedSystem>(x, options.max_newton_iterations, stop, g, p, sys.q);
    f = x.head(n);
    lambda = x[sys.size() - 1];
    if (backward) *backward = max_abs(WorkVector(sys.residual(x)));
    if (solution) *solution = x;
  } else {
    if (backward) *backward = std::numeric_limits<Work>::infinity();
    WorkVector x(n + 1);
    x.head(n) = f;
    x[n] = lambda;
    if (start) x = *start;
    it = staged_newton<System>(x, options.max_newton_iterations, stop, g, p);
    f = x.head(n);
    lambda = x[n];
    if (solution) *solution = x;
  }
  if (iterations) *iterations += it;
  if (!f.allFinite() || !(max_abs(f) > 0)) {
    EigenPair out = guess;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  return make_pair(g, p, f.cast<Real>(), static_cast<double>(lambda));
}

// Near-zero entries become exactly 0 and near-equal neighbours exactly equal.
// Eigenfunctions of multiple eigenvalues often have exact zeros that Newton
// only approaches.
VertexFunction snap(const Graph& g, const VertexFunction& f, double threshold) {
  const int n = g.n();
  const Real scale = max_abs(f);
  std::vector<int> parent(n);
  for (int u = 0; u < n; ++u) parent[u] = u;
  auto find = [&](int u) {
    while (parent[u] != u) u = parent[u] = parent[parent[u]];
    return u;
  };
  for (const auto& e : g.edges())
    if (abs(Real(f[e.u] - f[e.v])) <= threshold * scale) parent[find(e.u)] = find(e.v);
  std::vector<Real> sum(n, 0), weight(n, 0);
  std::vector<char> zero(n, 0);
  for (int u = 0; u < n; ++u) {
    int r = find(u);
    sum[r] += g.mu(u) * f[u];
    weight[r] += g.mu(u);
    if (abs(f[u]) <= threshold * scale) zero[r] = 1;
  }
  VertexFunction out(n);
  for (int u = 0; u < n; ++u) {
    int r = find(u);
    out[u] = zero[r] ? Real(0) : sum[r] / weight[r];
  }
  return out;
}

// Gauss-Newton in Real with the zero set and the tied groups of f frozen:
// the unknowns are one value per nonzero group and lambda, the equations the
// full eigen system.
template <typename T>
struct PatternSystem {
  const Graph& g;
  double p;
  std::vector<int> group;  // -1 for vertices held at zero
  int groups = 0;

  PatternSystem(const Graph& graph, double p_, const Vec<T>& f) : g(graph), p(p_) {
    const int n = g.n();
    std::vector<int> parent(n);
    for (int u = 0; u < n; ++u) parent[u] = u;
    auto find = [&](int u) {
      while (parent[u] != u) u = parent[u] = parent[parent[u]];
      return u;
    };
    for (const auto& e : g.edges())
      if (f[e.u] == f[e.v]) parent[find(e.u)] = find(e.v);
    std::vector<int> id(n, -1);
    group.assign(n, -1);
    for (int u = 0; u < n; ++u) {
      if (f[u] == 0) continue;
      int r = find(u);
      if (id[r] < 0) id[r] = groups++;
      group[u] = id[r];
    }
  }

  Vec<T> pack(const Vec<T>& f, T lambda) const {
    Vec<T> x(groups + 1);
    for (int u = 0; u < g.n(); ++u)
      if (group[u] >= 0) x[group[u]] = f[u];
    x[groups] = lambda;
    return x;
  }

  Vec<T> unpack(const Vec<T>& x) const {
    Vec<T> f = Vec<T>::Zero(g.n());
    for (int u = 0; u < g.n(); ++u)
      if (group[u] >= 0) f[u] = x[group[u]];
    return f;
  }

  Vec<T> residual(const Vec<T>& x) const {
    const int n = g.n();
    Vec<T> f = unpack(x);
    Vec<T> r = Vec<T>::Zero(n + 1);
    for (const auto& e : g.edges()) {
      T flux = T(e.w) * phi_t(p, T(f[e.u] - f[e.v]));
      r[e.u] += flux;
      r[e.v] -= flux;
    }
    T norm_p = 0;
    for (int u = 0; u < n; ++u) {
      using std::abs;
      using std::pow;
      r[u] -= x[groups] * T(g.mu(u)) * phi_t(p, f[u]);
      norm_p += T(g.mu(u)) * pow(abs(f[u]), T(p));
    }
    r[n] = (norm_p - 1) / T(p);
    return r;
  }

  Mat<T> jacobian(const Vec<T>& x) const {
    const int n = g.n();
    Vec<T> f = unpack(x);
    Mat<T> jac = Mat<T>::Zero(n + 1, groups + 1);
    for (const auto& e : g.edges()) {
      if (f[e.u] == f[e.v]) continue;
      T d = T(e.w) * phi_derivative(p, T(f[e.u] - f[e.v]));
      if (group[e.u] >= 0) {
        jac(e.u, group[e.u]) += d;
        jac(e.v, group[e.u]) -= d;
      }
      if (group[e.v] >= 0) {
        jac(e.u, group[e.v]) -= d;
        jac(e.v, group[e.v]) += d;
      }
    }
    for (int u = 0; u < n; ++u) {
      jac(u, groups) = -T(g.mu(u)) * phi_t(p, f[u]);
      if (group[u] < 0) continue;
      jac(u, group[u]) -= x[groups] * T(g.mu(u)) * phi_derivative(p, f[u]);
      jac(n, group[u]) += T(g.mu(u)) * phi_t(p, f[u]);
    }
    return jac;
  }
};

template <typename T>
EigenPair solve_on_pattern(const Graph& g, const EigenPair& pair) {
  Vec<T> f0 = pair.f.template cast<T>();
  PatternSystem<T> sys(g, pair.p, f0);
  if (sys.groups == 0) return pair;
  Vec<T> x = sys.pack(f0, T(pair.lambda));
  damped_newton(x, sys, 20, std::is_same_v<T, Real> ? 1e-32 : 1e-18);
  Vec<T> f = sys.unpack(x);
  if (!f.allFinite() || !(max_abs(f) > 0)) return pair;
  return make_pair(g, pair.p, f.template cast<Real>(), static_cast<double>(x[sys.groups]));
}

// Snapped candidates of `pair` re-solved on their zero and tie pattern.
template <typename T>
EigenPair snap_and_solve(const Graph& g, const EigenPair& pair, const ContinuationOptions& options) {
  EigenPair best = pair;
  const VertexFunction base = pair.f;
  for (double threshold : {1e-24, 1e-18, 1e-14, 1e-10, 1e-7}) {
    VertexFunction c = snap(g, base, threshold);
    if (!(max_abs(c) > 0)) continue;
    EigenPair out = make_pair(g, pair.p, c, pair.lambda);
    if (out.residual > options.target_residual) {
      EigenPair solved = solve_on_pattern<T>(g, out);
      if (solved.residual < out.residual) out = std::move(solved);
    }
    if (out.residual < best.residual) best = std::move(out);
    if (best.residual <= options.target_residual) break;
  }
  return best;
}

// A few Newton iterations in Real on the same system from the long double
// Newton vector `start` (rebuilt from the pair when null or stale), keeping
// the result only if the eigen residual drops.
EigenPair refine(const Graph& g, const EigenPair& pair, const ContinuationOptions& options,
                 const WorkVector* start = nullptr) {
  if (pair.residual <= options.target_residual || !pair.f.allFinite()) return pair;
  const int n = g.n();
  const double p = pair.p;
  Vec<Real> x;
  Real lambda = pair.lambda;
  VertexFunction f;
  if (p < 2.0) {
    MixedSystem<Real> sys{g, p, conjugate_exponent(p)};
    if (start && start->size() == sys.size()) x = start->cast<Real>();
    else x = sys.pack(pair.f, Real(pair.lambda));
    damped_newton(x, sys, 8, 1e-30);
    lambda = x[sys.size() - 1];
  } else {
    System<Real> sys{g, p};
    if (start && start->size() == n + 1) {
      x = start->cast<Real>();
    } else {
      x.resize(n + 1);
      x.head(n) = pair.f;
      x[n] = pair.lambda;
    }
    damped_newton(x, sys, 8, 1e-30);
    lambda = x[n];
  }
  f = x.head(n);
  EigenPair best = pair;
  if (f.allFinite() && max_abs(f) > 0) {
    EigenPair out = make_pair(g, p, f, static_cast<double>(lambda));
    if (out.residual < best.residual) best = std::move(out);
  }
  if (p < 2.0 && best.residual > options.target_residual)
    best = snap_and_solve<Real>(g, best, options);
  return best;
}

}  // namespace

EigenPair newton_polish(const Graph& g, const EigenPair& guess,
                        const ContinuationOptions& options, int* iterations) {
  WorkVector x;
  EigenPair out = polish(g, guess, options, iterations, nullptr, &x);
  return refine(g, out, options, &x);
}

namespace {

void check_continuation_request(const EigenPair& seed, double p_target,
                                const ContinuationOptions& options) {
  if (!(p_target > 1.0)) throw std::invalid_argument("continuation target must exceed 1");
  if (p_target < options.min_p)
    throw std::invalid_argument("continuation target below the configured minimum p");
  if (seed.residual > 1e-8)
    throw std::invalid_argument("continuation seed residual above 1e-8");
}

EigenPair constant_pair(const Graph& g, double p) {
  return make_pair(g, p, VertexFunction::Ones(g.n()), 0.0);
}

// Newton variables at p: (f, Phi_p(f), edge fluxes, lambda) for p < 2 and
// (f, lambda) otherwise. Zeros and ties of f are smooth points in the former.
WorkVector newton_variables(const Graph& g, const EigenPair& pair, double p) {
  const int n = g.n();
  WorkVector f = pair.f.cast<Work>();
  if (p < 2.0) {
    MixedSystem<Work> sys{g, pair.p, 0.0};
    return sys.pack(f, pair.lambda);
  }
  WorkVector x(n + 1);
  x.head(n) = f;
  x[n] = pair.lambda;
  return x;
}

// Secant extrapolation in log p through the last two accepted points.
WorkVector predict(const Graph& g, const EigenPair& prev, const EigenPair& cur, double p_next) {
  Work ratio = (std::log(p_next) - std::log(cur.p)) / (std::log(cur.p) - std::log(prev.p));
  WorkVector a = newton_variables(g, prev, p_next);
  WorkVector b = newton_variables(g, cur, p_next);
  return b + ratio * (b - a);
}

struct Attempt {
  EigenPair pair;
  WorkVector x;
  double f_change = 0.0;
  double lambda_change = 0.0;
  bool converged = false;
  bool same_branch = false;
};

// Mixed-system residual below which a pair is accepted whatever its eigen
// residual in long double; refinement in Real recovers the latter.
constexpr Work kBackwardAccept = 1e-14L;

// Newton at p from `start`, measured against the previous iterate `from`.
// `predicted` (Newton variables) replaces the start when given.
Attempt attempt(const Graph& g, const EigenPair& from, const VertexFunction& start, double p,
                const ContinuationOptions& options, int* newton,
                const WorkVector* predicted = nullptr) {
  EigenPair guess;
  guess.p = p;
  guess.f = normalize_lp(g, start, p);
  guess.lambda = rayleigh_quotient(g, guess.f, p);
  Attempt a;
  Work backward = 0;
  a.pair = polish(g, guess, options, newton, &backward, &a.x, predicted);
  VertexFunction previous = normalize_lp(g, from.f, p);
  a.f_change = static_cast<double>(max_abs(VertexFunction(a.pair.f - previous)) /
                                   std::max(max_abs(previous), Real(1e-300)));
  a.lambda_change =
      std::abs(a.pair.lambda - from.lambda) / std::max(std::abs(from.lambda), 1e-3);
  a.converged = a.pair.f.allFinite() &&
                (a.pair.residual <= options.accept_residual || backward <= kBackwardAccept);
  if (!a.converged && p < 2.0 && backward <= 1e-8 && a.f_change <= options.branch_jump_tol) {
    EigenPair snapped = snap_and_solve<Work>(g, a.pair, options);
    if (snapped.residual <= options.accept_residual &&
        std::abs(snapped.lambda - a.pair.lambda) <= 1e-6 * std::max(1.0, a.pair.lambda)) {
      a.pair = std::move(snapped);
      a.x = newton_variables(g, a.pair, p);
      a.converged = true;
    }
  }
  a.same_branch = a.converged && a.f_change <= options.branch_jump_tol &&
                  a.lambda_change <= options.branch_jump_tol;
  return a;
}

// Continuation step: secant predictor when two points are known, then the
// previous point itself if the predictor lands elsewhere.
Attempt step(const Graph& g, const std::optional<EigenPair>& previous, const EigenPair& current,
             double p, const ContinuationOptions& options, int* newton) {
  if (previous) {
    WorkVector x = predict(g, *previous, current, p);
    if (x.allFinite()) {
      Attempt a = attempt(g, current, current.f, p, options, newton, &x);
      if (a.same_branch) return a;
    }
  }
  return attempt(g, current, current.f, p, options, newton);
}

// Starting points on the far side of a tie f(u) = f(v) or a zero f(u) = 0,
// where the branch has a kink that plain continuation cannot step over.
std::vector<VertexFunction> crossing_candidates(const Graph& g, const VertexFunction& f) {
  const Real scale = max_abs(f);
  std::vector<std::pair<Real, int>> ties;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    Real gap = abs(Real(f[e.u] - f[e.v])) / scale;
    if (gap <= 0.2) ties.push_back({gap, static_cast<int>(i)});
  }
  std::vector<std::pair<Real, int>> zeros;
  for (int u = 0; u < g.n(); ++u)
    if (abs(f[u]) <= 0.2 * scale) zeros.push_back({abs(f[u]) / scale, u});
  std::sort(ties.begin(), ties.end());
  std::sort(zeros.begin(), zeros.end());

  std::vector<VertexFunction> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, ties.size()); ++i) {
    const auto& e = g.edges()[ties[i].second];
    VertexFunction swapped = f;
    std::swap(swapped[e.u], swapped[e.v]);
    out.push_back(swapped);
    VertexFunction merged = f;
    merged[e.u] = merged[e.v] = (f[e.u] + f[e.v]) / 2;
    out.push_back(merged);
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(3, zeros.size()); ++i) {
    int u = zeros[i].second;
    VertexFunction flipped = f;
    flipped[u] = -f[u];
    out.push_back(flipped);
    VertexFunction zeroed = f;
    zeroed[u] = 0;
    out.push_back(zeroed);
  }
  return out;
}

bool same_pair(const EigenPair& a, const EigenPair& b) {
  if (std::abs(a.lambda - b.lambda) > 1e-7 * std::max(1.0, std::abs(b.lambda))) return false;
  Real plus = max_abs(VertexFunction(a.f - b.f));
  Real minus = max_abs(VertexFunction(a.f + b.f));
  return std::min(plus, minus) <= 1e-6 * std::max(Real(1), max_abs(b.f));
}

// Steps shorter than this many halvings of the initial step try to cross the
// obstruction instead of shrinking further.
constexpr int kCrossAfterHalvings = 4;

// A branch that needs more switches than this is stuck at a singular point.
constexpr int kMaxSwitches = 4;

struct Grid {
  double log_target;
  double log_p;
  double h0;
  double h;
  int halvings = 0;
  int halvings_total = 0;
  int accepted = 0;

  Grid(double p0, double p_target, int steps)
      : log_target(std::log(p_target)),
        log_p(std::log(p0)),
        h0((log_target - log_p) / std::max(1, steps)),
        h(h0) {}

  bool last() const { return std::abs(h) >= std::abs(log_target - log_p); }
  double next_p(double p_target) const { return last() ? p_target : std::exp(log_p + h); }

  void accept() {
    log_p = last() ? log_target : log_p + h;
    ++accepted;
    halvings = 0;
    if (std::abs(h) < std::abs(h0)) h = std::abs(h * 1.5) < std::abs(h0) ? h * 1.5 : h0;
  }

  void restart() {
    halvings = 0;
    h = h0;
  }

  // False once the halving budget is spent.
  bool reject(const ContinuationOptions& options) {
    h *= 0.5;
    ++halvings;
    ++halvings_total;
    return halvings <= options.max_halvings && halvings_total <= 40 * options.max_halvings;
  }
};

void record(PairDiagnostics* diagnostics, const Grid& grid, int newton) {
  if (!diagnostics) return;
  diagnostics->newton_iterations += newton;
  diagnostics->steps += grid.accepted;
  diagnostics->step_halvings += grid.halvings_total;
}

}  // namespace

EigenPair continue_in_p(const Graph& g, const EigenPair& seed, double p_target,
                        const ContinuationOptions& options, PairDiagnostics* diagnostics) {
  check_continuation_request(seed, p_target, options);
  if (p_target == seed.p) return seed;
  if (is_constant_pair(seed)) return constant_pair(g, p_target);

  Grid grid(seed.p, p_target, options.steps);
  int newton = 0;
  EigenPair current = seed;
  current.f = normalize_lp(g, seed.f, seed.p);
  std::optional<EigenPair> previous;
  WorkVector current_x;
  int switches = 0;

  while (current.p != p_target) {
    const double p_next = grid.next_p(p_target);
    Attempt a = step(g, previous, current, p_next, options, &newton);
    bool switched = false;

    if (!a.same_branch && grid.halvings >= kCrossAfterHalvings && switches < kMaxSwitches) {
      std::optional<Attempt> best;
      for (const auto& start : crossing_candidates(g, current.f)) {
        Attempt c = attempt(g, current, start, p_next, options, &newton);
        if (c.converged && c.lambda_change <= options.branch_jump_tol &&
            (!best || c.lambda_change < best->lambda_change))
          best = std::move(c);
      }
      if (best) {
        a = std::move(*best);
        a.same_branch = true;
        switched = true;
        ++switches;
        if (diagnostics) {
          ++diagnostics->branch_switches;
          diagnostics->note += (diagnostics->note.empty() ? "" : "; ");
          diagnostics->note += "crossed a tie or zero near p=" + std::to_string(p_next);
        }
      }
    }

    if (a.same_branch) {
      if (switched) previous.reset();
      else previous = current;
      current = std::move(a.pair);
      current_x = std::move(a.x);
      grid.accept();
    } else if (!grid.reject(options)) {
      record(diagnostics, grid, newton);
      std::ostringstream msg;
      msg << "continuation step halving exhausted at p=" << current.p << " toward p="
          << p_target << " (last residual " << a.pair.residual << ", f change " << a.f_change
          << ", lambda change " << a.lambda_change << ")";
      throw ContinuationError(msg.str(), current, current.p);
    }
  }
  record(diagnostics, grid, newton);
  current = refine(g, current, options, &current_x);
  if (diagnostics) diagnostics->precision_limited = current.residual > options.accept_residual;
  return current;
}

std::vector<EigenPair> continue_spectrum(const Graph& g, const std::vector<EigenPair>& seeds,
                                         double p_target, const ContinuationOptions& options,
                                         std::vector<PairDiagnostics>* diagnostics) {
  const std::size_t count = seeds.size();
  if (count == 0) return {};
  const double p0 = seeds.front().p;
  for (const auto& s : seeds) {
    check_continuation_request(s, p_target, options);
    if (s.p != p0) throw std::invalid_argument("spectrum seeds must share one exponent");
  }
  std::vector<PairDiagnostics> local(count);
  std::vector<PairDiagnostics>& diag = diagnostics ? *diagnostics : local;
  diag.resize(count);
  if (p_target == p0) return seeds;

  std::vector<EigenPair> current = seeds;
  std::vector<bool> constant(count);
  std::vector<bool> alive(count, true);
  for (std::size_t i = 0; i < count; ++i) {
    constant[i] = is_constant_pair(seeds[i]);
    current[i].f = normalize_lp(g, seeds[i].f, p0);
  }

  Grid grid(p0, p_target, options.steps);
  std::vector<int> newton(count, 0);
  std::vector<std::optional<EigenPair>> previous(count);
  std::vector<WorkVector> current_x(count);
  auto end_branch = [&](std::size_t i, const std::string& why) {
    alive[i] = false;
    diag[i].branch_ended = true;
    diag[i].note += (diag[i].note.empty() ? "" : "; ") + why;
  };
  auto any_alive = [&] { return std::find(alive.begin(), alive.end(), true) != alive.end(); };
  double p_now = p0;
  while (p_now != p_target) {
    const double p_next = grid.next_p(p_target);
    std::vector<std::optional<EigenPair>> next(count);
    std::vector<WorkVector> next_x(count);
    std::vector<Attempt> tries(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!alive[i]) continue;
      if (constant[i]) {
        next[i] = constant_pair(g, p_next);
        continue;
      }
      tries[i] = step(g, previous[i], current[i], p_next, options, &newton[i]);
      if (!tries[i].same_branch) continue;
      bool duplicate = false;
      for (std::size_t j = 0; j < i; ++j) duplicate |= next[j] && same_pair(*next[j], tries[i].pair);
      if (!duplicate) {
        next[i] = tries[i].pair;
        next_x[i] = tries[i].x;
      }
    }

    std::vector<std::size_t> lost;
    std::vector<bool> switched(count, false);
    for (std::size_t i = 0; i < count; ++i)
      if (alive[i] && !next[i]) lost.push_back(i);

    if (!lost.empty() && grid.halvings >= kCrossAfterHalvings) {
      // A branch ended (fold or merge) or reached a tie: refill its slot with
      // the nearest eigenpair reachable from crossing points or from
      // combinations with neighbouring eigenfunctions.
      for (std::size_t i : lost) {
        if (diag[i].branch_switches >= kMaxSwitches) {
          end_branch(i, "branch ended at p=" + std::to_string(current[i].p) +
                            " after repeated branch switches");
          continue;
        }
        std::vector<VertexFunction> starts = crossing_candidates(g, current[i].f);
        for (std::size_t j = 0; j < count; ++j) {
          if (j == i || !alive[j] || constant[j] || (j > i ? j - i : i - j) > 2) continue;
          starts.push_back(current[i].f + current[j].f);
          starts.push_back(current[i].f - current[j].f);
        }
        std::optional<Attempt> best;
        for (const auto& start : starts) {
          if (!(max_abs(start) > Real(1e-8))) continue;
          Attempt c = attempt(g, current[i], start, p_next, options, &newton[i]);
          if (!c.converged || c.lambda_change > options.branch_jump_tol) continue;
          if (c.pair.f.maxCoeff() - c.pair.f.minCoeff() <= Real(1e-8)) continue;
          bool duplicate = false;
          for (std::size_t j = 0; j < count; ++j) duplicate |= next[j] && same_pair(*next[j], c.pair);
          if (duplicate) continue;
          if (!best || c.lambda_change < best->lambda_change) best = std::move(c);
        }
        if (best) {
          next[i] = best->pair;
          next_x[i] = best->x;
          switched[i] = true;
          ++diag[i].branch_switches;
          diag[i].note += (diag[i].note.empty() ? "" : "; ");
          diag[i].note += "branch switched near p=" + std::to_string(p_next);
        }
      }
      lost.clear();
      for (std::size_t i = 0; i < count; ++i)
        if (alive[i] && !next[i]) lost.push_back(i);
      if (lost.empty() && !any_alive()) break;
    }

    if (lost.empty()) {
      for (std::size_t i = 0; i < count; ++i) {
        if (!alive[i]) continue;
        if (switched[i] || constant[i]) previous[i].reset();
        else previous[i] = current[i];
        current[i] = std::move(*next[i]);
        current_x[i] = std::move(next_x[i]);
      }
      grid.accept();
      p_now = p_next;
      continue;
    }
    if (!grid.reject(options)) {
      // The remaining branches go on without the ones that cannot be followed.
      for (std::size_t i : lost) {
        std::ostringstream msg;
        msg << "branch ended at p=" << current[i].p << " (residual " << tries[i].pair.residual
            << ", f change " << tries[i].f_change << ", lambda change " << tries[i].lambda_change
            << ")";
        end_branch(i, msg.str());
      }
      grid.restart();
      if (!any_alive()) break;
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (alive[i]) current[i] = refine(g, current[i], options, &current_x[i]);
    diag[i].newton_iterations += newton[i];
    diag[i].steps += grid.accepted;
    diag[i].step_halvings += grid.halvings_total;
    diag[i].precision_limited = alive[i] && current[i].residual > options.accept_residual;
  }
  return current;
}

std::vector<EigenPair> search_eigenpairs(const Graph& g, double p,
                                         const std::vector<VertexFunction>& starts,
                                         const std::vector<EigenPair>& known,
                                         const ContinuationOptions& options) {
  std::vector<EigenPair> found;
  auto seen = [&](const EigenPair& pair) {
    for (const auto& k : known)
      if (same_pair(k, pair)) return true;
    for (const auto& k : found)
      if (same_pair(k, pair)) return true;
    return false;
  };
  for (const auto& start : starts) {
    if (!(max_abs(start) > 0)) continue;
    int newton = 0;
    EigenPair from;
    from.p = p;
    from.f = normalize_lp(g, start, p);
    from.lambda = rayleigh_quotient(g, from.f, p);
    Attempt a = attempt(g, from, start, p, options, &newton);
    if (!a.converged || is_constant_pair(a.pair)) continue;
    if (a.pair.f.maxCoeff() - a.pair.f.minCoeff() <= Real(1e-8)) continue;
    if (!seen(a.pair)) found.push_back(refine(g, a.pair, options, &a.x));
  }
  return found;
}

}  // namespace plap
