#pragma once

#include "otdag/graph.hpp"
#include "otdag/hsic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace otdag {

struct GumbelConfig {
  double temperature = 1.0;
  /// Temperature at the last iteration; linear annealing from `temperature`
  /// when it differs.
  double final_temperature = 1.0;
  double lambda = 0.01;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int iterations = 2000;
  /// Gumbel resamples averaged per Adam step.
  int batch = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// softmax((g + log softmax(z)) / tau).
Eigen::VectorXd gumbel_softmax_row(std::span<const double> logits, std::span<const double> gumbel,
                                   double tau);

/// Soft selection matrix, row r = gumbel_softmax_row(Z_r, G_r, tau).
Eigen::MatrixXd gumbel_softmax(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& gumbel, double tau);

/// ||(J - W) A||_2^2 + lambda ||W||_F with J the all-ones matrix.
double selection_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& a, double lambda);

/// dL/dW of selection_loss. The norm term contributes W / ||W||_F (zero at W = 0).
Eigen::MatrixXd selection_loss_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& a, double lambda);

/// Chain rule through the row-wise Gumbel-softmax: given dL/dW at the soft
/// selection Y, returns dL/dZ.
Eigen::MatrixXd backprop_gumbel_softmax(const Eigen::MatrixXd& soft, const Eigen::MatrixXd& grad_w,
                                        double tau);

/// Gradient of selection_loss(gumbel_softmax(Z, G, tau)) with respect to Z
/// along the fully soft path.
Eigen::MatrixXd soft_loss_logit_gradient(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& gumbel,
                                         const Eigen::VectorXd& a, double tau, double lambda);

/// One-hot rows at the row-wise argmax (lowest index on ties).
Eigen::MatrixXd hard_rows(const Eigen::MatrixXd& soft);

struct TrainResult {
  Eigen::MatrixXd logits;
  /// Straight-through forward loss (hard rows) per iteration, batch-averaged.
  std::vector<double> loss_history;
  /// Mean of the exponentially smoothed loss over the first / last 10% of
  /// iterations.
  double early_smoothed_loss = 0.0;
  double late_smoothed_loss = 0.0;
};

/// Adam on the logits with straight-through gradients: forward loss on hard
/// one-hot rows, backward through the soft Gumbel-softmax Jacobian. Logits
/// start at zero. Throws std::runtime_error on a non-finite loss.
TrainResult train_selector(const Eigen::VectorXd& a, const GumbelConfig& config);

/// Deterministic readout: argmax of softmax(Z) per row, each selected pair
/// becomes an undirected edge.
Skeleton extract_skeleton(const Eigen::MatrixXd& logits, const PairIndex& pairs);

/// Debugging backend: the k largest entries of A as undirected edges
/// (ties to the lower pair index).
Skeleton top_k_skeleton(const Eigen::VectorXd& a, const PairIndex& pairs, int k);

}  // namespace otdag
