#include "plap/p_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace plap {

namespace {

void check_exponent(double p, double min_p) {
  if (!(p >= min_p) || !std::isfinite(p))
    throw std::invalid_argument("exponent p out of range");
}

void check_length(const Graph& g, const VertexFunction& f) {
  if (f.size() != g.n()) throw std::invalid_argument("vertex function length mismatch");
}

Real weighted_power_sum(const Graph& g, const VertexFunction& f, double p) {
  Real s = 0.0;
  for (int u = 0; u < g.n(); ++u) s += g.mu(u) * pow(abs(f[u]), Real(p));
  return s;
}

Real energy(const Graph& g, const VertexFunction& f, double p) {
  Real s = 0.0;
  for (const auto& e : g.edges())
    s += e.w * pow(abs(f[e.u] - f[e.v]), Real(p));
  return s;
}

}  // namespace

double phi(double p, double x) {
  check_exponent(p, 1.0);
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x;
  return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

Real phi(double p, Real x) {
  check_exponent(p, 1.0);
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x;
  return copysign(pow(abs(x), Real(p) - 1), x);
}

double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("conjugate exponent needs p > 1");
  return p / (p - 1.0);
}

VertexFunction apply_p_laplacian(const Graph& g, const VertexFunction& f, double p) {
  check_exponent(p, 1.0);
  if (p == 1.0)
    throw std::invalid_argument("the 1-Laplacian is set-valued; see one_laplacian.hpp");
  check_length(g, f);
  VertexFunction out = VertexFunction::Zero(g.n());
  for (const auto& e : g.edges()) {
    Real flux = e.w * phi(p, f[e.u] - f[e.v]);
    out[e.u] += flux;
    out[e.v] -= flux;
  }
  return out;
}

double p_dirichlet_energy(const Graph& g, const VertexFunction& f, double p) {
  check_exponent(p, 1.0);
  check_length(g, f);
  return static_cast<double>(energy(g, f, p));
}

double lp_norm(const Graph& g, const VertexFunction& f, double p) {
  check_exponent(p, 1.0);
  check_length(g, f);
  return static_cast<double>(pow(weighted_power_sum(g, f, p), 1 / Real(p)));
}

VertexFunction normalize_lp(const Graph& g, const VertexFunction& f, double p) {
  // Rescale by the max entry first so tiny or huge inputs do not underflow.
  check_length(g, f);
  Real scale = f.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw std::invalid_argument("function is identically zero");
  VertexFunction h = f / scale;
  return h / pow(weighted_power_sum(g, h, p), 1 / Real(p));
}

double rayleigh_quotient(const Graph& g, const VertexFunction& f, double p) {
  check_exponent(p, 1.0);
  check_length(g, f);
  Real scale = f.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw std::invalid_argument("Rayleigh quotient of the zero function");
  VertexFunction h = f / scale;
  return static_cast<double>(energy(g, h, p) / weighted_power_sum(g, h, p));
}

VertexFunction rq_gradient(const Graph& g, const VertexFunction& f, double p) {
  check_exponent(p, 1.0);
  if (p == 1.0) throw std::invalid_argument("R_1 is not differentiable");
  check_length(g, f);
  Real denom = weighted_power_sum(g, f, p);
  if (!(denom > 0.0)) throw std::invalid_argument("gradient at the zero function");
  Real r = energy(g, f, p) / denom;
  VertexFunction grad = apply_p_laplacian(g, f, p);
  for (int u = 0; u < g.n(); ++u) grad[u] -= r * g.mu(u) * phi(p, f[u]);
  return (Real(p) / denom) * grad;
}

double eigen_residual(const Graph& g, const VertexFunction& f, double lambda, double p) {
  VertexFunction h = normalize_lp(g, f, p);
  VertexFunction lap = apply_p_laplacian(g, h, p);
  Real worst = 0.0;
  for (int u = 0; u < g.n(); ++u)
    worst = std::max(worst, Real(abs(lap[u] - Real(lambda) * g.mu(u) * phi(p, h[u]))));
  return static_cast<double>(worst);
}

double ax_by_gap(double p, double a, double b, double x, double y) {
  check_exponent(p, 1.0);
  if (x * y > 0.0) throw std::invalid_argument("ax_by_gap requires xy <= 0");
  double lhs = std::pow(std::abs(a * x - b * y), p);
  double rhs = (std::pow(std::abs(a), p) * std::abs(x) + std::pow(std::abs(b), p) * std::abs(y)) *
               std::pow(std::abs(x - y), p - 1.0);
  return lhs - rhs;
}

}  // namespace plap
