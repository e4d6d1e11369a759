#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plap/p_operator.hpp"

using namespace plap;
using oracle::vf;

namespace {

VertexFunction random_function(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return vf(v);
}

}  // namespace

TEST_CASE("phi") {
  CHECK(phi(2.0, -3.0) == -3.0);
  CHECK(phi(3.0, -2.0) == -4.0);
  CHECK(phi(1.5, 0.0) == 0.0);
  CHECK(phi(1.0, -0.3) == -1.0);
  CHECK(phi(2.5, 4.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(phi(0.5, 1.0), std::invalid_argument);
  for (double p : {1.2, 2.0, 3.7})
    for (double x : {-2.5, -0.1, 0.7, 3.0}) {
      CHECK(phi(p, -x) == doctest::Approx(-phi(p, x)));
      CHECK(std::abs(phi(p, x)) == doctest::Approx(std::pow(std::abs(x), p - 1)));
    }
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(1.5) == doctest::Approx(3.0));
}

TEST_CASE("p-Laplacian on P3") {
  Graph p3 = path_graph(3, MuMode::unit);
  VertexFunction out = apply_p_laplacian(p3, vf({1, 0, -1}), 2.0);
  CHECK(static_cast<double>(out[0]) == doctest::Approx(1.0));
  CHECK(static_cast<double>(out[1]) == doctest::Approx(0.0));
  CHECK(static_cast<double>(out[2]) == doctest::Approx(-1.0));

  VertexFunction zero = apply_p_laplacian(p3, vf({2, 2, 2}), 1.7);
  for (int i = 0; i < 3; ++i) CHECK(zero[i] == 0);
  CHECK_THROWS_AS(apply_p_laplacian(p3, vf({1, 2}), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_p_laplacian(p3, vf({1, 2, 3}), 1.0), std::invalid_argument);
}

TEST_CASE("p-Laplacian sums to zero") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    Graph g = oracle::random_connected_graph(rng, 2 + i % 10, MuMode::explicit_values);
    VertexFunction f = random_function(rng, g.n());
    double p = 1.1 + 0.06 * i;
    VertexFunction out = apply_p_laplacian(g, f, p);
    double sum = 0.0, scale = 0.0;
    for (int u = 0; u < g.n(); ++u) {
      sum += static_cast<double>(out[u]);
      scale += std::abs(static_cast<double>(out[u]));
    }
    CHECK(std::abs(sum) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("Rayleigh quotient") {
  Graph p3 = path_graph(3, MuMode::unit);
  CHECK(rayleigh_quotient(p3, vf({3, 3, 3}), 2.0) == 0.0);
  CHECK(rayleigh_quotient(p3, vf({1, 0, -1}), 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rayleigh_quotient(p3, vf({0, 0, 0}), 2.0), std::invalid_argument);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    Graph g = oracle::random_connected_graph(rng, 2 + i % 9, MuMode::explicit_values);
    VertexFunction f = random_function(rng, g.n());
    double p = 1.0 + 0.08 * i;
    double r = rayleigh_quotient(g, f, p);
    VertexFunction scaled = f * Real(-2.5);
    CHECK(std::abs(rayleigh_quotient(g, scaled, p) - r) <= 1e-12 * r);
    CHECK(r == doctest::Approx(oracle::rayleigh(g, oracle::to_double(f), p)).epsilon(1e-12));
  }
}

TEST_CASE("Rayleigh quotient at p=2 is the generalized quadratic form") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    Graph g = oracle::random_connected_graph(rng, 3 + i % 7, MuMode::explicit_values);
    VertexFunction f = random_function(rng, g.n());
    VertexFunction lf = apply_p_laplacian(g, f, 2.0);
    double num = 0.0, den = 0.0;
    for (int u = 0; u < g.n(); ++u) {
      num += static_cast<double>(f[u] * lf[u]);
      den += g.mu(u) * static_cast<double>(f[u] * f[u]);
    }
    CHECK(rayleigh_quotient(g, f, 2.0) == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("gradient") {
  Graph p3 = path_graph(3, MuMode::unit);
  VertexFunction zero = rq_gradient(p3, vf({1, 1, 1}), 2.5);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(zero[i])) < 1e-15);
  VertexFunction crit = rq_gradient(p3, vf({1, 0, -1}), 2.0);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(crit[i])) < 1e-12);
  CHECK_THROWS_AS(rq_gradient(p3, vf({0, 0, 0}), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(rq_gradient(p3, vf({1, 0, 0}), 1.0), std::invalid_argument);

  std::mt19937_64 rng(27);
  for (int i = 0; i < 20; ++i) {
    Graph g = oracle::random_connected_graph(rng, 3 + i % 6, MuMode::unit);
    std::vector<double> f = oracle::to_double(random_function(rng, g.n()));
    VertexFunction grad = rq_gradient(g, vf(f), 2.7);
    std::vector<double> fd = oracle::fd_gradient(g, f, 2.7);
    double diff = 0.0, norm = 0.0;
    for (int u = 0; u < g.n(); ++u) {
      diff = std::max(diff, std::abs(static_cast<double>(grad[u]) - fd[u]));
      norm = std::max(norm, std::abs(fd[u]));
    }
    CHECK(diff <= 1e-5 * norm);
  }
}

TEST_CASE("eigen residual") {
  Graph p3 = path_graph(3, MuMode::unit);
  CHECK(eigen_residual(p3, vf({2, 2, 2}), 0.0, 1.5) == 0.0);
  CHECK(eigen_residual(p3, vf({1, 0, -1}), 1.0, 2.0) < 1e-15);
  CHECK(eigen_residual(p3, vf({1, 0, -1}), 2.0, 2.0) > 0.1);
  // f normalized to unit l2 norm is (1,0,-1)/sqrt2; the defect is |1-2|/sqrt2 at the ends.
  CHECK(eigen_residual(p3, vf({5, 0, -5}), 2.0, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(eigen_residual(p3, vf({0, 0, 0}), 1.0, 2.0), std::invalid_argument);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Graph g = oracle::random_connected_graph(rng, 3 + i % 6, MuMode::degree);
    VertexFunction f = random_function(rng, g.n());
    double p = 1.2 + 0.15 * i;
    CHECK(eigen_residual(g, f, rayleigh_quotient(g, f, p), p) >= 0.0);
  }
}

TEST_CASE("normalization") {
  std::mt19937_64 rng(12);
  Graph g = oracle::random_connected_graph(rng, 6, MuMode::explicit_values);
  VertexFunction f = random_function(rng, 6);
  for (double p : {1.1, 2.0, 3.5}) {
    VertexFunction h = normalize_lp(g, f, p);
    CHECK(std::abs(lp_norm(g, h, p) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(normalize_lp(g, VertexFunction::Zero(6), 2.0), std::invalid_argument);
  CHECK(p_dirichlet_energy(path_graph(3, MuMode::unit), vf({1, 0, -1}), 3.0) == doctest::Approx(2.0));
}

TEST_CASE("ax_by_gap") {
  CHECK(ax_by_gap(2.0, 1.0, 1.0, 1.0, -1.0) == doctest::Approx(0.0));
  CHECK(ax_by_gap(1.0, 2.0, 3.0, 1.0, -1.0) == doctest::Approx(0.0));
  CHECK(ax_by_gap(2.0, 1.0, 2.0, 1.0, -1.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(ax_by_gap(2.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ax_by_gap(0.5, 1.0, 1.0, 1.0, -1.0), std::invalid_argument);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> exp(1.0, 4.0), val(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    double p = exp(rng), a = val(rng), b = val(rng), x = std::abs(val(rng)), y = -std::abs(val(rng));
    if (i % 2) std::swap(x, y);
    double scale = std::pow(std::abs(a * x) + std::abs(b * y), p) +
                   (std::pow(std::abs(a), p) * std::abs(x) + std::pow(std::abs(b), p) * std::abs(y)) *
                       std::pow(std::abs(x - y), p - 1);
    CHECK(ax_by_gap(p, a, b, x, y) <= 1e-12 * std::max(1.0, scale));
  }
}
