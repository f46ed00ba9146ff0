#pragma once

#include "otdag/graph.hpp"
#include "otdag/kernel.hpp"

#include <Eigen/Core>

#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace otdag {

struct HsicOptions {
  KernelKind kernel = KernelKind::Gaussian;
  /// z-score every variable before kernels and second-order sums are formed.
  bool standardize = false;
};

/// Centered Gram matrix of one sample vector with its own fitted kernel.
Eigen::MatrixXd centered_gram(std::span<const double> x, const HsicOptions& options);

/// (1/n^2) * sum_ab Kc_ab Lc_ab for two centered Gram matrices.
double hsic_from_centered(const Eigen::MatrixXd& kc, const Eigen::MatrixXd& lc);

/// Biased empirical HSIC, (1/n^2) tr(K H L H), each argument with its own
/// median-heuristic bandwidth. Symmetric in its arguments bit for bit.
double hsic(std::span<const double> x, std::span<const double> y, const HsicOptions& options = {});

/// Lexicographic enumeration of unordered pairs {i < j} over d variables:
/// (0,1), (0,2), ..., (0,d-1), (1,2), ...
class PairIndex {
 public:
  explicit PairIndex(int d);

  int variables() const { return d_; }
  int size() const { return d_ * (d_ - 1) / 2; }
  int index(int i, int j) const;
  std::pair<int, int> pair(int t) const { return pairs_.at(static_cast<std::size_t>(t)); }

 private:
  int d_;
  std::vector<std::pair<int, int>> pairs_;
};

/// First- and second-order dependence scores as consumed by the tuning phase.
class DependenceScores {
 public:
  virtual ~DependenceScores() = default;
  virtual int variables() const = 0;
  /// HSIC(X_i, X_j).
  virtual double first(int i, int j) const = 0;
  /// HSIC(X_i, X_j + X_k); i, j, k distinct.
  virtual double second(int i, int j, int k) const = 0;
};

/// First-order pairwise HSIC vector plus a lazily filled memo of
/// second-order values keyed by (child, {j, k}).
class HsicCache final : public DependenceScores {
 public:
  HsicCache(Dataset data, HsicOptions options);

  int variables() const override { return data_.variables(); }
  double first(int i, int j) const override;
  double second(int i, int j, int k) const override;

  /// A with a_t = HSIC(X_i, X_j) for the t-th pair of PairIndex.
  const Eigen::VectorXd& first_order() const { return first_order_; }
  /// Symmetric d x d view of the first-order values, zero diagonal.
  Eigen::MatrixXd first_order_matrix() const;
  const PairIndex& pairs() const { return pairs_; }
  const HsicOptions& options() const { return options_; }
  std::size_t second_order_size() const;

  /// Fills every (i, {j, k}) entry; returns the memo in key order.
  std::vector<std::tuple<int, int, int, double>> all_second_order() const;

 private:
  Eigen::MatrixXd column_gram(int i) const;

  Dataset data_;
  HsicOptions options_;
  PairIndex pairs_;
  Eigen::VectorXd first_order_;
  std::vector<Eigen::MatrixXd> centered_;  // empty when over the memory budget
  mutable std::mutex memo_mutex_;
  mutable std::map<std::tuple<int, int, int>, double> memo_;
};

/// Uncached first-order vector A for a dataset. Requires d >= 2.
Eigen::VectorXd first_order_vector(const Dataset& data, const HsicOptions& options = {});

/// Uncached HSIC(X_i, X_j + X_k). Throws InvalidInput unless i, j, k are
/// distinct valid indices.
double second_order(const Dataset& data, int i, int j, int k, const HsicOptions& options = {});

}  // namespace otdag
