#pragma once

#include "otdag/graph.hpp"
#include "otdag/hsic.hpp"

#include <optional>
#include <vector>

namespace otdag {

/// Working adjacency over {-1, 0, 1}: entries(i, j) == 1 means j -> i,
/// -1 marks an edge tentatively deleted by delete_step.
struct TernaryAdj {
  AdjMatrix entries;

  int nodes() const { return static_cast<int>(entries.rows()); }
};

/// Both orientations of every skeleton edge.
TernaryAdj seed_from_skeleton(const Skeleton& skeleton);

/// For each child i and pair j < k (lexicographic, single pass, updates
/// visible immediately) with entries(i,j) != 0 and entries(i,k) != 0:
/// if min(HSIC(i,j), HSIC(i,k)) >= HSIC(i, j+k), mark both -1.
TernaryAdj delete_step(TernaryAdj adj, const DependenceScores& scores);

/// For each child i and pair j < k with entries(i,j) != 1 and
/// entries(i,k) != 1: if max(HSIC(i,j), HSIC(i,k)) < HSIC(i, j+k), set both 1.
TernaryAdj add_step(TernaryAdj adj, const DependenceScores& scores);

/// One directed cycle among +1 edges, in traversal order, or nullopt.
/// Depth-first from the smallest index, successors ascending; the first back
/// edge closes the reported cycle.
std::optional<std::vector<Edge>> find_cycle(const AdjMatrix& adj);

/// Score of edge j -> i inside a cycle: min over other +1 parents k of i of
/// HSIC(i, j+k), or HSIC(i, j) when i has no other parent.
double cycle_edge_score(const TernaryAdj& adj, const DependenceScores& scores, const Edge& edge);

/// Removes the minimal-score edge of a found cycle until none is left. Ties
/// go to the lexicographically smallest (child, parent).
TernaryAdj dag_formalize(TernaryAdj adj, const DependenceScores& scores);

/// Keeps the +1 entries. Throws std::logic_error if a cycle remains.
LearnedGraph finalize(const TernaryAdj& adj);

/// Per-phase snapshots of the tuning pipeline.
struct TuneTrace {
  TernaryAdj seeded;
  TernaryAdj deleted;
  TernaryAdj added;
  TernaryAdj formalized;
  LearnedGraph result;
};

TuneTrace tune_traced(const Skeleton& skeleton, const DependenceScores& scores);

LearnedGraph tune(const Skeleton& skeleton, const DependenceScores& scores);

/// Builds an HsicCache over `data` and runs the full tuning phase.
LearnedGraph tune(const Skeleton& skeleton, const Dataset& data, const HsicOptions& options = {});

/// Binary adjacency of the +1 entries, cycles allowed (for per-phase scoring).
AdjMatrix positive_edges(const TernaryAdj& adj);

}  // namespace otdag
