#include "otdag/tuning.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace otdag {
namespace {

void check_dims(const TernaryAdj& adj, const DependenceScores& scores) {
  if (adj.entries.rows() != adj.entries.cols() || adj.nodes() != scores.variables())
    throw InvalidInput("adjacency and score source disagree on the number of variables");
}

}  // namespace

TernaryAdj seed_from_skeleton(const Skeleton& skeleton) {
  const AdjMatrix& s = skeleton.adjacency;
  if (s.rows() != s.cols()) throw InvalidInput("skeleton must be square");
  for (int i = 0; i < s.rows(); ++i) {
    if (s(i, i) != 0) throw InvalidInput("skeleton has a nonzero diagonal");
    for (int j = 0; j < s.cols(); ++j)
      if (s(i, j) != s(j, i)) throw InvalidInput("skeleton must be symmetric");
  }
  return TernaryAdj{(s.array() != 0).cast<int>().matrix()};
}

TernaryAdj delete_step(TernaryAdj adj, const DependenceScores& scores) {
  check_dims(adj, scores);
  AdjMatrix& w = adj.entries;
  const int d = adj.nodes();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      for (int k = j + 1; k < d; ++k) {
        if (k == i || w(i, j) == 0 || w(i, k) == 0) continue;
        if (std::min(scores.first(i, j), scores.first(i, k)) >= scores.second(i, j, k)) {
          w(i, j) = -1;
          w(i, k) = -1;
        }
      }
    }
  return adj;
}

TernaryAdj add_step(TernaryAdj adj, const DependenceScores& scores) {
  check_dims(adj, scores);
  AdjMatrix& w = adj.entries;
  const int d = adj.nodes();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      for (int k = j + 1; k < d; ++k) {
        if (k == i || w(i, j) == 1 || w(i, k) == 1) continue;
        if (std::max(scores.first(i, j), scores.first(i, k)) < scores.second(i, j, k)) {
          w(i, j) = 1;
          w(i, k) = 1;
        }
      }
    }
  return adj;
}

std::optional<std::vector<Edge>> find_cycle(const AdjMatrix& adj) {
  const int d = static_cast<int>(adj.rows());
  enum : char { White, Grey, Black };
  std::vector<char> colour(static_cast<std::size_t>(d), White);
  std::vector<int> parent(static_cast<std::size_t>(d), -1);

  // Iterative DFS; frame = (node, next successor to try).
  std::vector<std::pair<int, int>> stack;
  for (int root = 0; root < d; ++root) {
    if (colour[root] != White) continue;
    colour[root] = Grey;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      bool descended = false;
      while (next < d) {
        const int v = next++;
        if (adj(v, u) != 1) continue;  // u -> v
        if (colour[v] == Grey) {
          std::vector<Edge> cycle;
          for (int x = u; x != v; x = parent[x]) cycle.push_back({parent[x], x});
          std::reverse(cycle.begin(), cycle.end());
          cycle.push_back({u, v});
          return cycle;
        }
        if (colour[v] == White) {
          colour[v] = Grey;
          parent[v] = u;
          stack.emplace_back(v, 0);
          descended = true;
          break;
        }
      }
      if (!descended) {
        colour[stack.back().first] = Black;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

double cycle_edge_score(const TernaryAdj& adj, const DependenceScores& scores, const Edge& edge) {
  const int i = edge.to;
  const int j = edge.from;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int k = 0; k < adj.nodes(); ++k) {
    if (k == i || k == j || adj.entries(i, k) != 1) continue;
    best = std::min(best, scores.second(i, j, k));
    found = true;
  }
  return found ? best : scores.first(i, j);
}

TernaryAdj dag_formalize(TernaryAdj adj, const DependenceScores& scores) {
  check_dims(adj, scores);
  while (auto cycle = find_cycle(adj.entries)) {
    const Edge* worst = nullptr;
    double worst_score = std::numeric_limits<double>::infinity();
    for (const Edge& e : *cycle) {
      const double score = cycle_edge_score(adj, scores, e);
      const bool better = !worst || score < worst_score ||
                          (score == worst_score &&
                           std::tie(e.to, e.from) < std::tie(worst->to, worst->from));
      if (better) {
        worst = &e;
        worst_score = score;
      }
    }
    adj.entries(worst->to, worst->from) = 0;
  }
  return adj;
}

AdjMatrix positive_edges(const TernaryAdj& adj) { return (adj.entries.array() == 1).cast<int>().matrix(); }

LearnedGraph finalize(const TernaryAdj& adj) {
  LearnedGraph g{positive_edges(adj)};
  if (!is_acyclic(g.adjacency)) throw std::logic_error("finalize: residual directed cycle");
  return g;
}

TuneTrace tune_traced(const Skeleton& skeleton, const DependenceScores& scores) {
  TuneTrace trace;
  trace.seeded = seed_from_skeleton(skeleton);
  trace.deleted = delete_step(trace.seeded, scores);
  trace.added = add_step(trace.deleted, scores);
  trace.formalized = dag_formalize(trace.added, scores);
  trace.result = finalize(trace.formalized);
  return trace;
}

LearnedGraph tune(const Skeleton& skeleton, const DependenceScores& scores) {
  return tune_traced(skeleton, scores).result;
}

LearnedGraph tune(const Skeleton& skeleton, const Dataset& data, const HsicOptions& options) {
  const HsicCache cache(data, options);
  return tune(skeleton, cache);
}

}  // namespace otdag
