#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plap/cheeger.hpp"
#include "plap/eigensolver.hpp"
#include "plap/nodal.hpp"

using namespace plap;
using oracle::vf;

namespace {

bool is_constant(const VertexFunction& f, double tol) {
  for (int i = 1; i < f.size(); ++i)
    if (std::abs(static_cast<double>(f[i] - f[0])) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("dense spectrum of P3 and P4") {
  Spectrum s3 = solve_p2_spectrum(path_graph(3, MuMode::unit));
  CHECK(s3.method == SpectrumMethod::dense_p2);
  REQUIRE(s3.pairs.size() == 3);
  CHECK(s3.pairs[0].lambda == doctest::Approx(0.0));
  CHECK(s3.pairs[1].lambda == doctest::Approx(1.0));
  CHECK(s3.pairs[2].lambda == doctest::Approx(3.0));

  Spectrum s4 = solve_p2_spectrum(path_graph(4, MuMode::unit));
  std::vector<double> roots = oracle::p4_roots();
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(s4.pairs[k].lambda - roots[k]) <= 1e-12);
    CHECK(std::abs(oracle::p4_characteristic(s4.pairs[k].lambda)) <= 1e-12);
  }
}

TEST_CASE("dense spectrum of random graphs") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    Graph g = oracle::random_connected_graph(rng, 2 + i % 10, MuMode::explicit_values);
    Spectrum s = solve_p2_spectrum(g);
    REQUIRE(static_cast<int>(s.pairs.size()) == g.n());
    CHECK(std::abs(s.pairs[0].lambda) <= 1e-10);
    CHECK(is_constant(s.pairs[0].f, 1e-10));
    CHECK(s.warnings.empty());
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      if (k) CHECK(s.pairs[k].lambda >= s.pairs[k - 1].lambda);
      CHECK(s.pairs[k].residual <= 1e-10);
      CHECK(eigen_residual(g, s.pairs[k].f, s.pairs[k].lambda, 2.0) <= 1e-10);
      CHECK(std::abs(lp_norm(g, s.pairs[k].f, 2.0) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("disconnected graph warns") {
  Spectrum s = solve_p2_spectrum(parse_graph("n 4\n1 2 1\n3 4 1\n", MuMode::unit));
  CHECK_FALSE(s.warnings.empty());
  CHECK(std::abs(s.pairs[1].lambda) <= 1e-10);
}

TEST_CASE("path shooting") {
  ShootingTrace flat = path_shoot(5, 1.7, 0.0);
  CHECK(flat.zero_count == 0);
  CHECK(flat.boundary_defect == doctest::Approx(0.0));
  for (int i = 0; i < 5; ++i) CHECK(static_cast<double>(flat.f[i]) == doctest::Approx(1.0));

  ShootingTrace one = path_shoot(3, 2.0, 1.0);
  CHECK(static_cast<double>(one.f[0]) == 1.0);
  CHECK(static_cast<double>(one.f[1]) == doctest::Approx(0.0));
  CHECK(static_cast<double>(one.f[2]) == doctest::Approx(-1.0));
  CHECK(one.zero_count == 1);
  CHECK(std::abs(one.boundary_defect) <= 1e-12);

  ShootingTrace three = path_shoot(3, 2.0, 3.0);
  CHECK(static_cast<double>(three.f[1]) == doctest::Approx(-2.0));
  CHECK(static_cast<double>(three.f[2]) == doctest::Approx(1.0));
  CHECK(three.zero_count == 2);
  CHECK(std::abs(three.boundary_defect) <= 1e-12);

  CHECK_THROWS_AS(path_shoot(1, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(path_shoot(3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("path spectrum") {
  Spectrum dense = solve_p2_spectrum(path_graph(4, MuMode::unit));
  Spectrum shot = path_spectrum(4, 2.0);
  CHECK(shot.method == SpectrumMethod::path_shooting);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(shot.pairs[k].lambda - dense.pairs[k].lambda) <= 1e-9);

  Graph p5 = path_graph(5, MuMode::unit);
  for (double p : {1.5, 3.0}) {
    Spectrum s = path_spectrum(5, p);
    for (int k = 1; k <= 5; ++k) {
      const EigenPair& pair = s.pairs[k - 1];
      double tol = default_zero_tol(pair.f);
      CHECK(static_cast<int>(strong_nodal_domains(p5, pair.f, tol).count()) == k);
      CHECK(static_cast<int>(weak_nodal_domains(p5, pair.f, tol).count()) == k);
      CHECK(static_cast<int>(generalized_zeros(p5, pair.f, tol).size()) == k - 1);
      CHECK(pair.residual <= 1e-10);
      CHECK(std::abs(rayleigh_quotient(p5, pair.f, p) - pair.lambda) <= 1e-9 * std::max(1.0, pair.lambda));
      CHECK(pair.f[0] != 0);
      CHECK(pair.f[4] != 0);
      if (k > 1) CHECK(pair.lambda > s.pairs[k - 2].lambda);
    }
  }
  CHECK_THROWS_AS(path_spectrum(1, 2.0), std::invalid_argument);
}

TEST_CASE("continuation from p=2") {
  Graph p4 = path_graph(4, MuMode::unit);
  Spectrum dense = solve_p2_spectrum(p4);

  EigenPair same = continue_in_p(p4, dense.pairs[1], 2.0);
  CHECK(same.lambda == dense.pairs[1].lambda);
  CHECK(same.f == dense.pairs[1].f);

  EigenPair constant = continue_in_p(p4, dense.pairs[0], 1.3);
  CHECK(constant.lambda == 0.0);
  CHECK(is_constant(constant.f, 1e-14));

  EigenPair second = continue_in_p(p4, dense.pairs[1], 1.5);
  CHECK(second.residual <= 1e-9);
  CHECK(second.lambda == doctest::Approx(path_spectrum(4, 1.5).pairs[1].lambda).epsilon(1e-9));
  Spectrum s = path_spectrum(4, 1.5);
  s.pairs[1] = second;
  auto certs = certify_cheeger(p4, s);
  CHECK(certs[1].pass());
}

TEST_CASE("variational spectrum") {
  Graph p3 = path_graph(3, MuMode::unit);
  Spectrum s2 = variational_spectrum(p3, 2.0);
  Spectrum dense = solve_p2_spectrum(p3);
  for (int k = 0; k < 3; ++k) CHECK(s2.pairs[k].lambda == doctest::Approx(dense.pairs[k].lambda));

  Spectrum s = variational_spectrum(p3, 1.5);
  const EigenPair& second = s.pairs[1];
  CHECK(weak_nodal_domains(p3, second.f, default_zero_tol(second.f)).count() == 2);

  Graph p5 = path_graph(5, MuMode::unit);
  Spectrum s5 = variational_spectrum(p5, 3.0);
  REQUIRE(s5.pairs.size() == 5);
  for (const auto& pair : s5.pairs) CHECK(eigen_residual(p5, pair.f, pair.lambda, 3.0) <= 1e-9);
}

TEST_CASE("continuation on random graphs stays below the indicator bound") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 6; ++i) {
    Graph g = oracle::random_connected_graph(rng, 4 + i % 3, MuMode::unit);
    auto constants = cheeger_constants(g, g.n());
    for (double p : {1.5, 2.5}) {
      Spectrum s = variational_spectrum(g, p, {}, &constants);
      REQUIRE(static_cast<int>(s.pairs.size()) == g.n());
      CHECK(std::abs(s.pairs[0].lambda) <= 1e-10);
      for (int k = 0; k < g.n(); ++k) {
        const EigenPair& pair = s.pairs[k];
        CHECK(pair.residual <= 1e-9);
        CHECK(std::abs(rayleigh_quotient(g, pair.f, p) - pair.lambda) <= 1e-9 * std::max(1.0, pair.lambda));
        double bound = indicator_span_upper_bound(g, p, constants[k].family);
        CHECK(pair.lambda <= bound + 1e-9 + 1e-6 * pair.lambda);
        if (k) CHECK(pair.lambda >= s.pairs[k - 1].lambda);
      }
    }
  }
}

TEST_CASE("refining the grid does not move the eigenvalues") {
  std::mt19937_64 rng(77);
  Graph g = oracle::random_connected_graph(rng, 5, MuMode::degree);
  ContinuationOptions coarse, fine;
  fine.steps = 2 * coarse.steps;
  Spectrum a = variational_spectrum(g, 1.7, coarse);
  Spectrum b = variational_spectrum(g, 1.7, fine);
  for (int k = 0; k < g.n(); ++k) CHECK(std::abs(a.pairs[k].lambda - b.pairs[k].lambda) <= 1e-8);
}

TEST_CASE("indicator span bound") {
  Graph p4 = path_graph(4, MuMode::unit);
  CHECK(indicator_span_upper_bound(p4, 2.0, {VertexSubset({0, 1}), VertexSubset({2, 3})}) ==
        doctest::Approx(1.0));
  CHECK(indicator_span_upper_bound(p4, 1.3, {VertexSubset({0, 1, 2, 3})}) == 0.0);
  Graph p3 = path_graph(3, MuMode::unit);
  CHECK(indicator_span_upper_bound(p3, 2.0, {VertexSubset({0}), VertexSubset({1}), VertexSubset({2})}) ==
        doctest::Approx(4.0));
  CHECK_THROWS_AS(indicator_span_upper_bound(p4, 2.0, {VertexSubset({0, 1}), VertexSubset({1, 2})}),
                  std::invalid_argument);
}

TEST_CASE("newton polish returns an eigenpair") {
  Graph p4 = path_graph(4, MuMode::unit);
  Spectrum dense = solve_p2_spectrum(p4);
  EigenPair guess = dense.pairs[2];
  guess.f[0] += Real(1e-3);
  guess.lambda += 1e-3;
  EigenPair out = newton_polish(p4, guess);
  CHECK(out.residual <= 1e-12);
  CHECK(out.lambda == doctest::Approx(2.0).epsilon(1e-12));
}
