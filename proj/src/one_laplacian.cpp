#include "plap/one_laplacian.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

#include "plap/rational_simplex.hpp"

namespace plap {

SignSet sign_set(const Rational& x) {
  int s = sgn(x);
  return s > 0 ? SignSet::plus_one : (s < 0 ? SignSet::minus_one : SignSet::interval);
}

bool contains(SignSet set, const Rational& value) {
  switch (set) {
    case SignSet::plus_one:
      return value == 1;
    case SignSet::minus_one:
      return value == -1;
    case SignSet::interval:
      return value >= -1 && value <= 1;
  }
  return false;
}

RationalGraph to_rational(const Graph& g) {
  RationalGraph out;
  out.n = g.n();
  for (const auto& e : g.edges()) out.edges.push_back({e.u, e.v, Rational(e.w)});
  for (int u = 0; u < g.n(); ++u) out.mu.emplace_back(g.mu(u));
  return out;
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: '" + text + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::size_t decimals = s.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+" ||
      !std::all_of(digits.begin() + (digits[0] == '-' || digits[0] == '+'), digits.end(),
                   [](unsigned char c) { return std::isdigit(c); }))
    throw std::invalid_argument("not a rational: '" + text + "'");
  if (digits[0] == '+') digits.erase(0, 1);
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, decimals);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

int orientation(const RationalEdge& e, int u) { return e.u == u ? 1 : -1; }

void check_sizes(const RationalGraph& g, std::size_t f_size) {
  if (static_cast<int>(f_size) != g.n) throw std::invalid_argument("vertex function length mismatch");
  if (static_cast<int>(g.mu.size()) != g.n) throw std::invalid_argument("measure length mismatch");
  for (const auto& m : g.mu)
    if (m <= 0) throw std::invalid_argument("measure must be positive");
  for (const auto& e : g.edges)
    if (e.w <= 0) throw std::invalid_argument("weight must be positive");
}

// Shared model: variables a_e (z_e = a_e - 1, free edges only), one bounded
// variable per zero vertex, their slacks, and optionally lambda.
struct Model {
  LinearProgram lp;
  std::vector<int> edge_var;    // -1 when z is fixed by the sign of f(u) - f(v)
  std::vector<int> vertex_var;  // -1 when f(u) != 0
  int lambda_var = -1;
};

// When `lambda` is set the problem is a pure feasibility check for that value;
// otherwise lambda is a variable and zero vertices carry t_u = lambda s(u),
// written as t_u = b_u - lambda with 0 <= b_u <= 2 lambda.
Model build_model(const RationalGraph& g, const std::vector<Rational>& f,
                  const std::optional<Rational>& lambda) {
  Model m;
  const int edges = static_cast<int>(g.edges.size());
  m.edge_var.assign(edges, -1);
  m.vertex_var.assign(g.n, -1);
  int vars = 0;
  for (int e = 0; e < edges; ++e)
    if (f[g.edges[e].u] == f[g.edges[e].v]) m.edge_var[e] = vars++;
  for (int u = 0; u < g.n; ++u)
    if (f[u] == 0) m.vertex_var[u] = vars++;
  const int first_slack = vars;
  int slack_count = 0;
  for (int v : m.edge_var) slack_count += v >= 0;
  for (int v : m.vertex_var) slack_count += v >= 0;
  vars += slack_count;
  if (!lambda) m.lambda_var = vars++;
  m.lp.num_vars = vars;
  m.lp.objective.assign(vars, 0);

  int slack = first_slack;
  for (int e = 0; e < edges; ++e) {
    if (m.edge_var[e] < 0) continue;
    std::vector<Rational> row(vars, 0);
    row[m.edge_var[e]] = 1;
    row[slack++] = 1;
    m.lp.add_equality(std::move(row), 2);
  }
  for (int u = 0; u < g.n; ++u) {
    if (m.vertex_var[u] < 0) continue;
    std::vector<Rational> row(vars, 0);
    row[m.vertex_var[u]] = 1;
    row[slack++] = 1;
    if (lambda) {
      m.lp.add_equality(std::move(row), 2);
    } else {
      row[m.lambda_var] = -2;
      m.lp.add_equality(std::move(row), 0);
    }
  }

  // Per vertex: sum_v w(uv) z(uv) - lambda mu(u) s(u) = 0.
  for (int u = 0; u < g.n; ++u) {
    std::vector<Rational> row(vars, 0);
    Rational constant = 0;
    for (int e = 0; e < edges; ++e) {
      const auto& edge = g.edges[e];
      if (edge.u != u && edge.v != u) continue;
      Rational coeff = edge.w * orientation(edge, u);
      if (m.edge_var[e] >= 0) {
        row[m.edge_var[e]] += coeff;
        constant -= coeff;
      } else {
        constant += coeff * sgn(f[edge.u] - f[edge.v]);
      }
    }
    if (m.vertex_var[u] >= 0) {
      if (lambda) {  // s = c - 1
        row[m.vertex_var[u]] -= *lambda * g.mu[u];
        constant += *lambda * g.mu[u];
      } else {  // lambda s = b - lambda
        row[m.vertex_var[u]] -= g.mu[u];
        row[m.lambda_var] += g.mu[u];
      }
    } else {
      int s = sgn(f[u]);
      if (lambda)
        constant -= *lambda * g.mu[u] * s;
      else
        row[m.lambda_var] -= g.mu[u] * s;
    }
    m.lp.add_equality(std::move(row), -constant);
  }
  return m;
}

}  // namespace

OneLapCertificate verify_1lap_eigenpair(const RationalGraph& g, const std::vector<Rational>& f,
                                        const Rational& lambda) {
  check_sizes(g, f.size());
  Model m = build_model(g, f, lambda);
  LpResult res = solve_lp(m.lp);
  OneLapCertificate cert;
  if (res.status != LpStatus::optimal) return cert;

  cert.feasible = true;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    cert.z.push_back(m.edge_var[e] >= 0 ? Rational(res.x[m.edge_var[e]] - 1)
                                        : Rational(sgn(f[edge.u] - f[edge.v])));
  }
  for (int u = 0; u < g.n; ++u)
    cert.s.push_back(m.vertex_var[u] >= 0 ? Rational(res.x[m.vertex_var[u]] - 1)
                                          : Rational(sgn(f[u])));
  return cert;
}

bool check_certificate(const RationalGraph& g, const std::vector<Rational>& f,
                       const Rational& lambda, const OneLapCertificate& cert) {
  if (!cert.feasible || cert.z.size() != g.edges.size() || static_cast<int>(cert.s.size()) != g.n)
    return false;
  std::vector<Rational> flux(g.n, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (!contains(sign_set(f[edge.u] - f[edge.v]), cert.z[e])) return false;
    flux[edge.u] += edge.w * cert.z[e];
    flux[edge.v] -= edge.w * cert.z[e];
  }
  for (int u = 0; u < g.n; ++u) {
    if (!contains(sign_set(f[u]), cert.s[u])) return false;
    if (flux[u] != lambda * g.mu[u] * cert.s[u]) return false;
  }
  return true;
}

namespace {

// Every surjection from `count` items onto {1..r} for some r, i.e. every weak
// ordering of the items.
void weak_orderings(int count, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> ranks(count, 1);
  if (count == 0) {
    visit(ranks);
    return;
  }
  while (true) {
    int top = *std::max_element(ranks.begin(), ranks.end());
    std::vector<char> hit(top + 1, 0);
    for (int r : ranks) hit[r] = 1;
    if (std::all_of(hit.begin() + 1, hit.end(), [](char c) { return c; })) visit(ranks);
    int i = 0;
    while (i < count && ranks[i] == count) ranks[i++] = 1;
    if (i == count) return;
    ++ranks[i];
  }
}

std::vector<LambdaInterval> merge(std::vector<LambdaInterval> items) {
  std::sort(items.begin(), items.end(),
            [](const LambdaInterval& a, const LambdaInterval& b) { return a.lo < b.lo; });
  std::vector<LambdaInterval> out;
  for (auto& it : items) {
    if (!out.empty()) {
      auto& last = out.back();
      if (!last.hi || it.lo <= *last.hi) {
        if (last.hi && (!it.hi || *it.hi > *last.hi)) last.hi = it.hi;
        continue;
      }
    }
    out.push_back(std::move(it));
  }
  return out;
}

}  // namespace

OneLapEnumeration enumerate_1lap_eigenvalues(const RationalGraph& g) {
  if (g.n > kOneLapMaxVertices)
    throw std::invalid_argument("1-Laplacian enumeration is limited to n <= " +
                                std::to_string(kOneLapMaxVertices));
  check_sizes(g, g.n);
  OneLapEnumeration out;
  std::vector<LambdaInterval> all;
  std::vector<LambdaInterval> nonconstant;

  auto solve_ordering = [&](const std::vector<int>& levels) {
    ++out.orderings_checked;
    std::vector<Rational> f(levels.begin(), levels.end());
    Model m = build_model(g, f, std::nullopt);
    m.lp.objective[m.lambda_var] = 1;
    LpResult low = solve_lp(m.lp);
    if (low.status != LpStatus::optimal) return;
    m.lp.objective[m.lambda_var] = -1;
    LpResult high = solve_lp(m.lp);

    OrderingEigenvalues item;
    item.levels = levels;
    item.lambdas.lo = low.value;
    if (high.status == LpStatus::optimal) item.lambdas.hi = Rational(-high.value);
    item.constant = std::all_of(levels.begin(), levels.end(),
                                [&](int l) { return l == levels[0]; });
    all.push_back(item.lambdas);
    if (!item.constant) nonconstant.push_back(item.lambdas);
    out.feasible.push_back(std::move(item));
  };

  // Sign pattern in base 3: 0 -> zero, 1 -> positive, 2 -> negative.
  int patterns = 1;
  for (int i = 0; i < g.n; ++i) patterns *= 3;
  for (int code = 1; code < patterns; ++code) {
    std::vector<int> sign(g.n);
    for (int i = 0, c = code; i < g.n; ++i, c /= 3) sign[i] = c % 3 == 0 ? 0 : (c % 3 == 1 ? 1 : -1);
    // One representative of {f, -f}: first nonzero value positive.
    auto first = std::find_if(sign.begin(), sign.end(), [](int s) { return s != 0; });
    if (*first < 0) continue;

    std::vector<int> pos, neg;
    for (int i = 0; i < g.n; ++i) {
      if (sign[i] > 0) pos.push_back(i);
      if (sign[i] < 0) neg.push_back(i);
    }
    weak_orderings(static_cast<int>(pos.size()), [&](const std::vector<int>& pos_rank) {
      weak_orderings(static_cast<int>(neg.size()), [&](const std::vector<int>& neg_rank) {
        std::vector<int> levels(g.n, 0);
        for (std::size_t i = 0; i < pos.size(); ++i) levels[pos[i]] = pos_rank[i];
        for (std::size_t i = 0; i < neg.size(); ++i) levels[neg[i]] = -neg_rank[i];
        solve_ordering(levels);
      });
    });
  }
  out.all = merge(std::move(all));
  out.nonconstant = merge(std::move(nonconstant));
  return out;
}

std::string to_string(const LambdaInterval& interval) {
  if (interval.is_point()) return interval.lo.get_str();
  return "[" + interval.lo.get_str() + ", " + (interval.hi ? interval.hi->get_str() : "inf") + "]";
}

}  // namespace plap
