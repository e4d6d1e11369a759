#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plap {

/// How vertex measures are assigned when a graph is built.
enum class MuMode { unit, degree, explicit_values };

std::string to_string(MuMode mode);
MuMode mu_mode_from_string(std::string_view name);

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

struct Neighbor {
  int v = 0;
  double w = 0.0;
};

/// Thrown by the edge-list parser; carries the 1-based line number of the
/// offending line (0 when the problem is not tied to a single line).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Weighted undirected graph with positive vertex measure.
///
/// Vertices are stored 0-based internally; the edge-list format and every
/// report use 1-based labels. Each unordered edge is stored once in edges()
/// and twice in the adjacency lists. The object is immutable after
/// construction.
class Graph {
 public:
  /// Builds and validates a graph. For MuMode::explicit_values `mu` must have
  /// one entry per vertex; for the other modes `mu` is ignored and computed.
  Graph(int n, std::vector<Edge> edges, MuMode mode,
        std::vector<double> mu = {});

  int n() const { return n_; }
  MuMode mu_mode() const { return mode_; }
  double mu(int u) const { return mu_[u]; }
  std::span<const double> mu() const { return mu_; }
  double degree(int u) const { return degree_[u]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int u) const {
    return {adjacency_.data() + offsets_[u],
            adjacency_.data() + offsets_[u + 1]};
  }
  /// Weight of {u,v}, 0 when the edge is absent.
  double weight(int u, int v) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  int n_;
  MuMode mode_;
  std::vector<Edge> edges_;
  std::vector<double> mu_;
  std::vector<double> degree_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Sorted, duplicate-free list of 0-based vertex indices.
class VertexSubset {
 public:
  VertexSubset() = default;
  explicit VertexSubset(std::vector<int> vertices);

  std::span<const int> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  bool contains(int u) const;

  friend auto operator<=>(const VertexSubset&, const VertexSubset&) = default;

 private:
  std::vector<int> vertices_;
};

/// Parses the edge-list format: "n <count>", optional "mu <vertex> <value>"
/// lines, and "<u> <v> <w>" edge lines. '#' starts a comment.
Graph parse_graph(std::string_view text, MuMode mode);
Graph read_graph_file(const std::string& path, MuMode mode);

/// Inverse of parse_graph for MuMode::explicit_values: always writes the mu
/// lines, with enough digits to round-trip doubles exactly.
std::string serialize(const Graph& g);

Graph path_graph(int n, MuMode mode);

bool is_connected(const Graph& g);

/// max_u d(u)/mu(u).
double tau(const Graph& g);

/// True when g is 0-1-2-...-(n-1) with unit weights (any measure).
bool is_path(const Graph& g);

/// True when g is a path with unit weights and unit measure.
bool is_unit_path(const Graph& g);

/// FNV-1a digest of serialize(g), rendered as 16 hex digits.
std::string graph_digest(const Graph& g);

}  // namespace plap
