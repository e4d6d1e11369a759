#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plap/cheeger.hpp"
#include "plap/one_laplacian.hpp"

using namespace plap;

namespace {

std::vector<Rational> rf(std::initializer_list<int> values) {
  std::vector<Rational> out;
  for (int v : values) out.emplace_back(v);
  return out;
}

bool contains_point(const std::vector<LambdaInterval>& set, const Rational& x) {
  for (const auto& i : set)
    if (i.lo <= x && (!i.hi || x <= *i.hi)) return true;
  return false;
}

}  // namespace

TEST_CASE("sign sets") {
  CHECK(sign_set(Rational(-3)) == SignSet::minus_one);
  CHECK(sign_set(Rational(1, 7)) == SignSet::plus_one);
  CHECK(sign_set(Rational(0)) == SignSet::interval);
  CHECK(contains(SignSet::interval, Rational(-1, 2)));
  CHECK_FALSE(contains(SignSet::interval, Rational(3, 2)));
  CHECK(contains(SignSet::plus_one, Rational(1)));
  CHECK_FALSE(contains(SignSet::plus_one, Rational(1, 2)));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("exact conversion of doubles") {
  Graph g = parse_graph("n 2\nmu 1 0.1\nmu 2 3\n1 2 0.3\n", MuMode::explicit_values);
  RationalGraph r = to_rational(g);
  CHECK(r.mu[0].get_d() == 0.1);
  CHECK(r.mu[0] != Rational(1, 10));
  CHECK(r.edges[0].w.get_d() == 0.3);
}

TEST_CASE("P3 eigenpair verification") {
  RationalGraph p3 = to_rational(path_graph(3, MuMode::degree));
  auto f = rf({1, -1, 1});
  OneLapCertificate yes = verify_1lap_eigenpair(p3, f, Rational(1));
  REQUIRE(yes.feasible);
  CHECK(check_certificate(p3, f, Rational(1), yes));
  for (const auto& z : yes.z) CHECK(abs(z) == 1);
  CHECK_FALSE(verify_1lap_eigenpair(p3, f, Rational(1, 2)).feasible);

  auto constant = rf({2, 2, 2});
  OneLapCertificate c = verify_1lap_eigenpair(p3, constant, Rational(0));
  CHECK(c.feasible);
  CHECK(check_certificate(p3, constant, Rational(0), c));
  CHECK_FALSE(verify_1lap_eigenpair(p3, constant, Rational(1)).feasible);

  OneLapCertificate forged = yes;
  forged.z[0] = -forged.z[0];
  CHECK_FALSE(check_certificate(p3, f, Rational(1), forged));
}

TEST_CASE("P3 eigenvalue enumeration") {
  RationalGraph p3 = to_rational(path_graph(3, MuMode::degree));
  OneLapEnumeration e = enumerate_1lap_eigenvalues(p3);
  REQUIRE(e.nonconstant.size() == 1);
  CHECK(e.nonconstant[0].is_point());
  CHECK(e.nonconstant[0].lo == 1);
  CHECK(contains_point(e.all, Rational(0)));
  CHECK(e.orderings_checked > 0);
  for (const auto& o : e.feasible) {
    std::vector<Rational> f(o.levels.begin(), o.levels.end());
    if (!o.lambdas.is_point()) continue;
    OneLapCertificate cert = verify_1lap_eigenpair(p3, f, o.lambdas.lo);
    CHECK(cert.feasible);
    CHECK(check_certificate(p3, f, o.lambdas.lo, cert));
  }
}

TEST_CASE("P2 nonconstant eigenvalue is h2") {
  Graph p2 = path_graph(2, MuMode::degree);
  OneLapEnumeration e = enumerate_1lap_eigenvalues(to_rational(p2));
  REQUIRE(e.nonconstant.size() == 1);
  CHECK(e.nonconstant[0].is_point());
  CHECK(e.nonconstant[0].lo == 1);
  CHECK(multiway_cheeger(p2, 2).h == 1.0);
}

TEST_CASE("h2 is among the p=1 eigenvalues") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 6; ++i) {
    Graph g = oracle::random_connected_graph(rng, 3 + i % 3, i % 2 ? MuMode::degree : MuMode::unit);
    RationalGraph r = to_rational(g);
    OneLapEnumeration e = enumerate_1lap_eigenvalues(r);
    CHECK(contains_point(e.all, Rational(0)));
    CheegerResult h2 = multiway_cheeger(g, 2);
    // h2 as an exact rational from the family with the largest ratio.
    Rational best(-1);
    for (const auto& a : h2.family) {
      Rational boundary(0), measure(0);
      for (const auto& edge : r.edges)
        if (a.contains(edge.u) != a.contains(edge.v)) boundary += edge.w;
      for (int u : a.vertices()) measure += r.mu[u];
      Rational c = boundary / measure;
      if (c > best) best = c;
    }
    CHECK(contains_point(e.nonconstant, best));
  }
}

TEST_CASE("enumeration size cap") {
  RationalGraph big = to_rational(path_graph(kOneLapMaxVertices + 1, MuMode::unit));
  CHECK_THROWS_AS(enumerate_1lap_eigenvalues(big), std::invalid_argument);
}
