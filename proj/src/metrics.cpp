#include "otdag/metrics.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <numeric>

namespace otdag {
namespace {

void check_same_shape(const AdjMatrix& truth, const AdjMatrix& estimate) {
  if (truth.rows() != truth.cols() || estimate.rows() != estimate.cols() ||
      truth.rows() != estimate.rows())
    throw InvalidInput("graphs must be square and of equal size");
}

int count_pairs(const AdjMatrix& truth, const AdjMatrix& estimate) {
  const int d = static_cast<int>(truth.rows());
  int wrong = 0;
  for (int i = 0; i < d; ++i) {
    std::vector<bool> adjust(static_cast<std::size_t>(d), false);
    for (int k = 0; k < d; ++k) adjust[k] = k != i && estimate(i, k) == 1;
    const std::vector<bool> below = descendants(truth, i);
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      if (adjust[j]) {
        // Adjusting for a parent j predicts no effect of i on j.
        if (below[j]) ++wrong;
      } else if (!valid_adjustment(truth, i, j, adjust)) {
        ++wrong;
      }
    }
  }
  return wrong;
}

}  // namespace

ConfusionCounts confusion(const AdjMatrix& truth, const AdjMatrix& estimate) {
  check_same_shape(truth, estimate);
  ConfusionCounts c;
  for (int i = 0; i < truth.rows(); ++i)
    for (int j = 0; j < truth.cols(); ++j) {
      if (i == j) continue;
      const bool t = truth(i, j) == 1;
      const bool e = estimate(i, j) == 1;
      if (t && e) ++c.true_positives;
      if (!t && e) ++c.false_positives;
      if (t && !e) ++c.false_negatives;
    }
  return c;
}

int shd(const ConfusionCounts& counts) { return counts.false_negatives + counts.false_positives; }

bool d_separated(const AdjMatrix& adj, int x, int y, const std::vector<bool>& given) {
  const int d = static_cast<int>(adj.rows());
  // Nodes that are in `given` or have a descendant in it (open colliders).
  std::vector<bool> anc_given(given);
  {
    std::vector<int> stack;
    for (int v = 0; v < d; ++v)
      if (given[v]) stack.push_back(v);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int p = 0; p < d; ++p)
        if (adj(v, p) == 1 && !anc_given[p]) {
          anc_given[p] = true;
          stack.push_back(p);
        }
    }
  }

  // State: (node, arrived from a child = travelling up).
  std::vector<bool> seen_up(static_cast<std::size_t>(d), false);
  std::vector<bool> seen_down(static_cast<std::size_t>(d), false);
  std::vector<std::pair<int, bool>> stack{{x, true}};
  while (!stack.empty()) {
    const auto [v, up] = stack.back();
    stack.pop_back();
    if (up ? seen_up[v] : seen_down[v]) continue;
    (up ? seen_up[v] : seen_down[v]) = true;
    if (v == y) return false;

    if (up && !given[v]) {
      for (int p = 0; p < d; ++p)
        if (adj(v, p) == 1) stack.emplace_back(p, true);
      for (int c = 0; c < d; ++c)
        if (adj(c, v) == 1) stack.emplace_back(c, false);
    } else if (!up) {
      if (!given[v])
        for (int c = 0; c < d; ++c)
          if (adj(c, v) == 1) stack.emplace_back(c, false);
      if (anc_given[v])
        for (int p = 0; p < d; ++p)
          if (adj(v, p) == 1) stack.emplace_back(p, true);
    }
  }
  return true;
}

bool valid_adjustment(const AdjMatrix& adj, int x, int y, const std::vector<bool>& adjust) {
  const int d = static_cast<int>(adj.rows());
  const std::vector<bool> from_x = descendants(adj, x);

  // Ancestors of y (including y).
  std::vector<bool> to_y(static_cast<std::size_t>(d), false);
  std::vector<int> stack{y};
  to_y[y] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int p = 0; p < d; ++p)
      if (adj(v, p) == 1 && !to_y[p]) {
        to_y[p] = true;
        stack.push_back(p);
      }
  }

  // Nodes other than x on a directed x -> y path, and everything below them.
  std::vector<bool> forbidden(static_cast<std::size_t>(d), false);
  AdjMatrix pruned = adj;
  for (int w = 0; w < d; ++w) {
    if (w == x || !from_x[w] || !to_y[w]) continue;
    const std::vector<bool> below = descendants(adj, w);
    for (int v = 0; v < d; ++v)
      if (below[v]) forbidden[v] = true;
    if (adj(w, x) == 1) pruned(w, x) = 0;
  }
  for (int v = 0; v < d; ++v)
    if (adjust[v] && forbidden[v]) return false;
  return d_separated(pruned, x, y, adjust);
}

int sid(const AdjMatrix& truth, const AdjMatrix& estimate) {
  check_same_shape(truth, estimate);
  if (!is_acyclic(truth) || !is_acyclic(estimate)) throw InvalidInput("sid requires acyclic graphs");
  return count_pairs(truth, estimate);
}

int sid_parent_adjustment(const AdjMatrix& truth, const AdjMatrix& estimate) {
  check_same_shape(truth, estimate);
  if (!is_acyclic(truth)) throw InvalidInput("true graph must be acyclic");
  return count_pairs(truth, estimate);
}

double aupr(const AdjMatrix& truth, const Eigen::MatrixXd& scores) {
  if (truth.rows() != scores.rows() || truth.cols() != scores.cols() || truth.rows() != truth.cols())
    throw InvalidInput("score matrix must match the true graph");
  const int d = static_cast<int>(truth.rows());
  std::vector<std::pair<double, bool>> items;
  items.reserve(static_cast<std::size_t>(d) * d);
  int positives = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const bool label = truth(i, j) == 1;
      positives += label;
      items.emplace_back(scores(i, j), label);
    }
  if (positives == 0) {
    const bool any_positive =
        std::any_of(items.begin(), items.end(), [](const auto& it) { return it.first > 0.0; });
    return any_positive ? 0.0 : 1.0;
  }

  std::stable_sort(items.begin(), items.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  double ap = 0.0;
  double prev_recall = 0.0;
  int tp = 0;
  std::size_t taken = 0;
  while (taken < items.size()) {
    const double threshold = items[taken].first;
    while (taken < items.size() && items[taken].first == threshold) {
      tp += items[taken].second;
      ++taken;
    }
    const double recall = static_cast<double>(tp) / positives;
    const double precision = static_cast<double>(tp) / static_cast<double>(taken);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

namespace {

MetricsReport build_report(const AdjMatrix& truth, const AdjMatrix& estimate, int sid_value) {
  MetricsReport r;
  r.counts = confusion(truth, estimate);
  r.shd = shd(r.counts);
  r.sid = sid_value;
  r.aupr = aupr(truth, (estimate.array() == 1).cast<double>().matrix());
  r.estimated_edges = edge_count(estimate);
  r.true_edges = edge_count(truth);
  return r;
}

}  // namespace

MetricsReport evaluate(const AdjMatrix& truth, const AdjMatrix& estimate) {
  return build_report(truth, estimate, sid(truth, estimate));
}

MetricsReport evaluate_phase(const AdjMatrix& truth, const AdjMatrix& estimate) {
  return build_report(truth, estimate, sid_parent_adjustment(truth, estimate));
}

}  // namespace otdag
