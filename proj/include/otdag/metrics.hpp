#pragma once

#include "otdag/graph.hpp"

#include <Eigen/Core>

#include <vector>

namespace otdag {

struct ConfusionCounts {
  int true_positives = 0;
  /// Reversed and redundant estimated edges.
  int false_positives = 0;
  int false_negatives = 0;
};

struct MetricsReport {
  int sid = 0;
  double aupr = 0.0;
  int shd = 0;
  int estimated_edges = 0;
  int true_edges = 0;
  ConfusionCounts counts;
};

/// Directed comparison; a reversed edge is one false positive and one false
/// negative.
ConfusionCounts confusion(const AdjMatrix& truth, const AdjMatrix& estimate);

int shd(const ConfusionCounts& counts);

/// True iff x and y are d-separated by `given` in the DAG `adj`
/// (reachability over active trails).
bool d_separated(const AdjMatrix& adj, int x, int y, const std::vector<bool>& given);

/// Whether `adjust` is a valid adjustment set for the effect of x on y in
/// the DAG `adj`: it holds no descendant of a node (other than x) on a
/// directed x -> y path, and it d-separates x and y once the first edge of
/// every such path is removed.
bool valid_adjustment(const AdjMatrix& adj, int x, int y, const std::vector<bool>& adjust);

/// Structural intervention distance. Both graphs must be DAGs.
int sid(const AdjMatrix& truth, const AdjMatrix& estimate);

/// Same counting rule with parent sets read straight from `estimate`, which
/// may be cyclic. Used to score intermediate tuning phases.
int sid_parent_adjustment(const AdjMatrix& truth, const AdjMatrix& estimate);

/// Average precision over off-diagonal entries, thresholds at distinct
/// score values in descending order: sum_k (R_k - R_{k-1}) P_k. With no true
/// edges, returns 1 when no score is positive and 0 otherwise.
double aupr(const AdjMatrix& truth, const Eigen::MatrixXd& scores);

/// All metrics for an estimated DAG, AuPR from the binary adjacency.
MetricsReport evaluate(const AdjMatrix& truth, const AdjMatrix& estimate);

/// As evaluate(), but the estimate may contain cycles (SID via
/// sid_parent_adjustment).
MetricsReport evaluate_phase(const AdjMatrix& truth, const AdjMatrix& estimate);

}  // namespace otdag
