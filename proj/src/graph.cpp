#include "plap/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

namespace plap {

std::string to_string(MuMode mode) {
  switch (mode) {
    case MuMode::unit:
      return "unit";
    case MuMode::degree:
      return "degree";
    case MuMode::explicit_values:
      return "explicit";
  }
  return "unknown";
}

MuMode mu_mode_from_string(std::string_view name) {
  if (name == "unit") return MuMode::unit;
  if (name == "degree") return MuMode::degree;
  if (name == "explicit") return MuMode::explicit_values;
  throw std::invalid_argument("unknown mu mode '" + std::string(name) + "'");
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what),
      line_(line) {}

Graph::Graph(int n, std::vector<Edge> edges, MuMode mode, std::vector<double> mu)
    : n_(n), mode_(mode), edges_(std::move(edges)) {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");

  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw std::invalid_argument("nonpositive edge weight");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.emplace(e.u, e.v).second)
      throw std::invalid_argument("duplicate edge");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });

  degree_.assign(n_, 0.0);
  std::vector<std::size_t> count(n_, 0);
  for (const auto& e : edges_) {
    degree_[e.u] += e.w;
    degree_[e.v] += e.w;
    ++count[e.u];
    ++count[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (int u = 0; u < n_; ++u) offsets_[u + 1] = offsets_[u] + count[u];
  adjacency_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.u]++] = {e.v, e.w};
    adjacency_[fill[e.v]++] = {e.u, e.w};
  }

  switch (mode_) {
    case MuMode::unit:
      mu_.assign(n_, 1.0);
      break;
    case MuMode::degree:
      mu_ = degree_;
      break;
    case MuMode::explicit_values:
      if (static_cast<int>(mu.size()) != n_)
        throw std::invalid_argument("explicit measure needs one value per vertex");
      mu_ = std::move(mu);
      break;
  }
  for (double m : mu_) {
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument(
          "vertex measure must be positive (isolated vertex with degree measure?)");
  }
}

double Graph::weight(int u, int v) const {
  for (const auto& nb : neighbors(u))
    if (nb.v == v) return nb.w;
  return 0.0;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.n_ != b.n_ || a.mu_ != b.mu_ || a.edges_.size() != b.edges_.size())
    return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    const auto& x = a.edges_[i];
    const auto& y = b.edges_[i];
    if (x.u != y.u || x.v != y.v || x.w != y.w) return false;
  }
  return true;
}

VertexSubset::VertexSubset(std::vector<int> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
}

bool VertexSubset::contains(int u) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), u);
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long parse_int(std::string_view tok, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + std::string(tok) + "'");
  return value;
}

double parse_real(std::string_view tok, std::size_t line) {
  // from_chars for double is missing on older libstdc++; strtod is enough here.
  std::string s(tok);
  char* end = nullptr;
  double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(value))
    throw ParseError(line, "expected real number, got '" + s + "'");
  return value;
}

}  // namespace

Graph parse_graph(std::string_view text, MuMode mode) {
  int n = -1;
  std::size_t header_line = 0;
  std::vector<Edge> edges;
  std::map<int, double> mu_values;
  std::set<std::pair<int, int>> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tok = tokenize(line);
    if (tok.empty()) continue;

    if (tok[0] == "n") {
      if (n >= 0) throw ParseError(line_no, "duplicate header");
      if (tok.size() != 2) throw ParseError(line_no, "header must be 'n <count>'");
      long count = parse_int(tok[1], line_no);
      if (count < 1) throw ParseError(line_no, "vertex count must be positive");
      n = static_cast<int>(count);
      header_line = line_no;
      continue;
    }
    if (n < 0) throw ParseError(line_no, "missing 'n <count>' header before data");

    auto vertex = [&](std::string_view t) {
      long v = parse_int(t, line_no);
      if (v < 1 || v > n)
        throw ParseError(line_no, "vertex " + std::string(t) + " out of range 1.." +
                                      std::to_string(n));
      return static_cast<int>(v - 1);
    };

    if (tok[0] == "mu") {
      if (tok.size() != 3) throw ParseError(line_no, "mu line must be 'mu <vertex> <value>'");
      int u = vertex(tok[1]);
      double value = parse_real(tok[2], line_no);
      if (!(value > 0.0)) throw ParseError(line_no, "nonpositive measure");
      if (!mu_values.emplace(u, value).second)
        throw ParseError(line_no, "duplicate mu for vertex " + std::to_string(u + 1));
      continue;
    }

    if (tok.size() != 3) throw ParseError(line_no, "edge line must be '<u> <v> <w>'");
    int u = vertex(tok[0]);
    int v = vertex(tok[1]);
    double w = parse_real(tok[2], line_no);
    if (u == v) throw ParseError(line_no, "self-loop at vertex " + std::to_string(u + 1));
    if (!(w > 0.0)) throw ParseError(line_no, "nonpositive weight");
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second)
      throw ParseError(line_no, "duplicate edge " + std::to_string(u + 1) + "-" +
                                    std::to_string(v + 1));
    edges.push_back({u, v, w});
  }
  if (n < 0) throw ParseError(0, "missing 'n <count>' header");

  std::vector<double> mu;
  if (mode == MuMode::explicit_values) {
    mu.resize(n);
    for (int u = 0; u < n; ++u) {
      auto it = mu_values.find(u);
      if (it == mu_values.end())
        throw ParseError(header_line, "missing mu for vertex " + std::to_string(u + 1));
      mu[u] = it->second;
    }
  } else if (mode == MuMode::degree) {
    std::vector<int> deg(n, 0);
    for (const auto& e : edges) ++deg[e.u], ++deg[e.v];
    for (int u = 0; u < n; ++u)
      if (deg[u] == 0)
        throw ParseError(header_line, "vertex " + std::to_string(u + 1) +
                                          " is isolated; degree measure would be zero");
  }
  return Graph(n, std::move(edges), mode, std::move(mu));
}

Graph read_graph_file(const std::string& path, MuMode mode) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str(), mode);
}

std::string serialize(const Graph& g) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "n " << g.n() << '\n';
  for (int u = 0; u < g.n(); ++u) out << "mu " << u + 1 << ' ' << g.mu(u) << '\n';
  for (const auto& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
  return out.str();
}

Graph path_graph(int n, MuMode mode) {
  if (n < 2) throw std::invalid_argument("path graph needs n >= 2");
  if (mode == MuMode::explicit_values)
    throw std::invalid_argument("path graph supports unit or degree measure");
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph(n, std::move(edges), mode);
}

bool is_connected(const Graph& g) {
  std::vector<char> seen(g.n(), 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop();
    for (const auto& nb : g.neighbors(u)) {
      if (!seen[nb.v]) {
        seen[nb.v] = 1;
        ++reached;
        queue.push(nb.v);
      }
    }
  }
  return reached == g.n();
}

double tau(const Graph& g) {
  double best = 0.0;
  for (int u = 0; u < g.n(); ++u) best = std::max(best, g.degree(u) / g.mu(u));
  return best;
}

bool is_path(const Graph& g) {
  if (g.n() < 2 || static_cast<int>(g.edges().size()) != g.n() - 1) return false;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    if (e.u != static_cast<int>(i) || e.v != static_cast<int>(i) + 1 || e.w != 1.0)
      return false;
  }
  return true;
}

bool is_unit_path(const Graph& g) {
  if (!is_path(g)) return false;
  return std::all_of(g.mu().begin(), g.mu().end(), [](double m) { return m == 1.0; });
}

std::string graph_digest(const Graph& g) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(g)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

}  // namespace plap
