#include "otdag/graph.hpp"

#include "otdag/error.hpp"

#include <queue>
#include <string>

namespace otdag {

std::optional<std::vector<int>> topological_order(const AdjMatrix& adj) {
  const int d = static_cast<int>(adj.rows());
  std::vector<int> indegree(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (adj(i, j) == 1) ++indegree[i];

  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < d; ++i)
    if (indegree[i] == 0) ready.push(i);

  std::vector<int> order;
  order.reserve(d);
  while (!ready.empty()) {
    const int j = ready.top();
    ready.pop();
    order.push_back(j);
    for (int i = 0; i < d; ++i) {
      if (adj(i, j) == 1 && --indegree[i] == 0) ready.push(i);
    }
  }
  if (static_cast<int>(order.size()) != d) return std::nullopt;
  return order;
}

bool is_acyclic(const AdjMatrix& adj) { return topological_order(adj).has_value(); }

std::vector<Edge> edges(const AdjMatrix& adj) {
  std::vector<Edge> out;
  for (int i = 0; i < adj.rows(); ++i)
    for (int j = 0; j < adj.cols(); ++j)
      if (adj(i, j) == 1) out.push_back({j, i});
  return out;
}

int edge_count(const AdjMatrix& adj) { return static_cast<int>((adj.array() == 1).count()); }

std::vector<int> parents(const AdjMatrix& adj, int node) {
  std::vector<int> out;
  for (int j = 0; j < adj.cols(); ++j)
    if (adj(node, j) == 1) out.push_back(j);
  return out;
}

std::vector<bool> descendants(const AdjMatrix& adj, int node) {
  const int d = static_cast<int>(adj.rows());
  std::vector<bool> seen(d, false);
  std::vector<int> stack{node};
  seen[node] = true;
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int i = 0; i < d; ++i) {
      if (adj(i, j) == 1 && !seen[i]) {
        seen[i] = true;
        stack.push_back(i);
      }
    }
  }
  return seen;
}

TrueGraph make_true_graph(AdjMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw InvalidInput("adjacency must be square");
  for (int i = 0; i < adjacency.rows(); ++i) {
    if (adjacency(i, i) != 0) throw InvalidInput("self-loop on node " + std::to_string(i));
    for (int j = 0; j < adjacency.cols(); ++j)
      if (adjacency(i, j) != 0 && adjacency(i, j) != 1)
        throw InvalidInput("adjacency entries must be 0 or 1");
  }
  auto order = topological_order(adjacency);
  if (!order) throw InvalidInput("graph contains a directed cycle");
  return TrueGraph{std::move(adjacency), std::move(*order)};
}

}  // namespace otdag
