#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace otdag {

/// Square integer adjacency. Orientation convention used everywhere:
/// adj(i, j) == 1  <=>  X_j is a parent of X_i  (edge j -> i).
using AdjMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Observations, one column per variable (column-major, so a column is a
/// contiguous sample vector).
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  int samples() const { return static_cast<int>(values.rows()); }
  int variables() const { return static_cast<int>(values.cols()); }
};

struct Edge {
  int from = 0;
  int to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct TrueGraph {
  AdjMatrix adjacency;
  std::vector<int> topo_order;

  int nodes() const { return static_cast<int>(adjacency.rows()); }
};

struct LearnedGraph {
  AdjMatrix adjacency;

  int nodes() const { return static_cast<int>(adjacency.rows()); }
};

/// Undirected graph: symmetric, zero diagonal.
struct Skeleton {
  AdjMatrix adjacency;

  int nodes() const { return static_cast<int>(adjacency.rows()); }
};

/// Topological order over entries equal to 1, or nullopt when a directed
/// cycle exists. Kahn's algorithm with the smallest ready index first.
std::optional<std::vector<int>> topological_order(const AdjMatrix& adj);

bool is_acyclic(const AdjMatrix& adj);

/// Directed edges (entries equal to 1) in row-major (child, parent) order
/// of the matrix, reported as parent -> child.
std::vector<Edge> edges(const AdjMatrix& adj);

int edge_count(const AdjMatrix& adj);

/// parents(i) = { j : adj(i, j) == 1 }, ascending.
std::vector<int> parents(const AdjMatrix& adj, int node);

/// Boolean mask of nodes reachable from `node` along directed edges,
/// including `node` itself.
std::vector<bool> descendants(const AdjMatrix& adj, int node);

/// Builds a TrueGraph from an acyclic adjacency; throws InvalidInput on a
/// cycle, a nonzero diagonal, or an entry outside {0, 1}.
TrueGraph make_true_graph(AdjMatrix adjacency);

}  // namespace otdag
