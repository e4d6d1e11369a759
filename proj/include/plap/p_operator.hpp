#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "plap/graph.hpp"

namespace plap {

/// Scalar for vertex functions (IEEE quadruple precision). Near p = 1
/// eigenfunctions have edge differences many orders of magnitude below their
/// values; Phi_p amplifies the rounding of those differences, and 113 bits keep
/// the eigen residual well below 1e-9 down to p = 1.1.
using Real = boost::multiprecision::float128;

/// Real value per vertex, indexed like Graph (0-based).
using VertexFunction = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Solution (or candidate solution) of
///   (Delta_p f)(u) = lambda * mu(u) * Phi_p(f(u))   for every vertex u.
struct EigenPair {
  double p = 2.0;
  double lambda = 0.0;
  VertexFunction f;
  /// Max-norm eigen-equation defect after l^p(mu) normalization.
  double residual = 0.0;
  bool normalized = false;
};

/// Phi_p(x) = |x|^(p-2) x, with Phi_p(0) = 0 for every p >= 1.
double phi(double p, double x);
Real phi(double p, Real x);

/// Hoelder conjugate q with 1/p + 1/q = 1 (p > 1).
double conjugate_exponent(double p);

/// (Delta_p f)(u) = sum_v w(uv) Phi_p(f(u) - f(v)).  Requires p > 1.
VertexFunction apply_p_laplacian(const Graph& g, const VertexFunction& f, double p);

/// Sum over unordered edges of w(uv)|f(u)-f(v)|^p.
double p_dirichlet_energy(const Graph& g, const VertexFunction& f, double p);

/// (sum_u mu(u)|f(u)|^p)^(1/p).
double lp_norm(const Graph& g, const VertexFunction& f, double p);

/// f scaled to unit l^p(mu) norm. Throws if f is identically zero.
VertexFunction normalize_lp(const Graph& g, const VertexFunction& f, double p);

/// Energy over unordered edges divided by sum_u mu(u)|f(u)|^p (p >= 1).
/// Equals f'Lf / f'Mf at p = 2.
double rayleigh_quotient(const Graph& g, const VertexFunction& f, double p);

/// Gradient of rayleigh_quotient with respect to f (p > 1):
///   p / D * (Delta_p f - R * mu * Phi_p(f)),  D = sum_u mu(u)|f(u)|^p.
VertexFunction rq_gradient(const Graph& g, const VertexFunction& f, double p);

/// max_u |(Delta_p f)(u) - lambda mu(u) Phi_p(f(u))| with f first scaled to
/// unit l^p(mu) norm.
double eigen_residual(const Graph& g, const VertexFunction& f, double lambda, double p);

/// |ax - by|^p - (|a|^p|x| + |b|^p|y|)|x - y|^(p-1), which is never positive
/// when xy <= 0.  Throws std::invalid_argument if xy > 0 or p < 1.
double ax_by_gap(double p, double a, double b, double x, double y);

}  // namespace plap
