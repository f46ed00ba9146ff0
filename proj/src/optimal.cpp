#include "otdag/optimal.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace otdag {
namespace {

struct Adam {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  Adam(Eigen::Index rows, Eigen::Index cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

  void step(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad, const GumbelConfig& c) {
    beta1_power *= c.beta1;
    beta2_power *= c.beta2;
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseAbs2();
    const double lr = c.learning_rate * std::sqrt(1.0 - beta2_power) / (1.0 - beta1_power);
    params.array() -= lr * m.array() / (v.array().sqrt() + c.epsilon);
  }
};

double gumbel_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  while (u <= 0.0) u = unit(rng);
  return -std::log(-std::log(u));
}

template <typename Row>
void softmax_inplace(Row&& row) {
  const double peak = row.maxCoeff();
  row = (row.array() - peak).exp().matrix().eval();
  row /= row.sum();
}

}  // namespace

void GumbelConfig::validate() const {
  if (!(temperature > 0.0) || !(final_temperature > 0.0))
    throw InvalidInput("temperature must be positive");
  if (lambda < 0.0) throw InvalidInput("lambda must be non-negative");
  if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (batch < 1) throw InvalidInput("batch must be >= 1");
}

Eigen::VectorXd gumbel_softmax_row(std::span<const double> logits, std::span<const double> gumbel,
                                   double tau) {
  if (logits.size() != gumbel.size()) throw InvalidInput("logit and noise rows differ in length");
  if (!(tau > 0.0)) throw InvalidInput("temperature must be positive");
  const auto s = static_cast<Eigen::Index>(logits.size());
  Eigen::Map<const Eigen::VectorXd> z(logits.data(), s);
  Eigen::Map<const Eigen::VectorXd> g(gumbel.data(), s);

  const double peak = z.maxCoeff();
  const double log_norm = peak + std::log((z.array() - peak).exp().sum());
  Eigen::RowVectorXd y = ((g.array() + (z.array() - log_norm)) / tau).matrix().transpose();
  softmax_inplace(y);
  return y.transpose();
}

Eigen::MatrixXd gumbel_softmax(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& gumbel, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("temperature must be positive");
  // log softmax(z) differs from z by a per-row constant, which the outer
  // softmax cancels.
  Eigen::MatrixXd y = (logits + gumbel) / tau;
  for (Eigen::Index r = 0; r < y.rows(); ++r) softmax_inplace(y.row(r));
  return y;
}

double selection_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& a, double lambda) {
  if (w.cols() != a.size()) throw InvalidInput("selection matrix and HSIC vector disagree");
  const Eigen::VectorXd residual = Eigen::VectorXd::Constant(w.rows(), a.sum()) - w * a;
  return residual.squaredNorm() + lambda * w.norm();
}

Eigen::MatrixXd selection_loss_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& a, double lambda) {
  const Eigen::VectorXd residual = Eigen::VectorXd::Constant(w.rows(), a.sum()) - w * a;
  Eigen::MatrixXd grad = -2.0 * residual * a.transpose();
  const double norm = w.norm();
  if (lambda > 0.0 && norm > 0.0) grad += (lambda / norm) * w;
  return grad;
}

Eigen::MatrixXd backprop_gumbel_softmax(const Eigen::MatrixXd& soft, const Eigen::MatrixXd& grad_w,
                                        double tau) {
  // Row Jacobian (1/tau)(diag(y) - y y^T) applied to the upstream row.
  const Eigen::VectorXd inner = soft.cwiseProduct(grad_w).rowwise().sum();
  Eigen::MatrixXd out = soft.cwiseProduct(grad_w - inner.replicate(1, grad_w.cols()));
  return out / tau;
}

Eigen::MatrixXd soft_loss_logit_gradient(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& gumbel,
                                         const Eigen::VectorXd& a, double tau, double lambda) {
  const Eigen::MatrixXd soft = gumbel_softmax(logits, gumbel, tau);
  return backprop_gumbel_softmax(soft, selection_loss_gradient(soft, a, lambda), tau);
}

Eigen::MatrixXd hard_rows(const Eigen::MatrixXd& soft) {
  Eigen::MatrixXd hard = Eigen::MatrixXd::Zero(soft.rows(), soft.cols());
  for (Eigen::Index r = 0; r < soft.rows(); ++r) {
    Eigen::Index best = 0;
    soft.row(r).maxCoeff(&best);
    hard(r, best) = 1.0;
  }
  return hard;
}

TrainResult train_selector(const Eigen::VectorXd& a, const GumbelConfig& config) {
  config.validate();
  const Eigen::Index s = a.size();
  if (s < 1) throw InvalidInput("HSIC vector is empty");

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  result.logits = Eigen::MatrixXd::Zero(s, s);
  result.loss_history.reserve(static_cast<std::size_t>(config.iterations));
  Adam adam(s, s);
  Eigen::MatrixXd gumbel(s, s);

  for (int it = 0; it < config.iterations; ++it) {
    const double frac = config.iterations > 1 ? static_cast<double>(it) / (config.iterations - 1) : 0.0;
    const double tau = config.temperature + frac * (config.final_temperature - config.temperature);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(s, s);
    double loss = 0.0;
    for (int b = 0; b < config.batch; ++b) {
      for (Eigen::Index r = 0; r < s; ++r)
        for (Eigen::Index c = 0; c < s; ++c) gumbel(r, c) = gumbel_draw(rng);
      const Eigen::MatrixXd soft = gumbel_softmax(result.logits, gumbel, tau);
      const Eigen::MatrixXd hard = hard_rows(soft);
      loss += selection_loss(hard, a, config.lambda);
      grad += backprop_gumbel_softmax(soft, selection_loss_gradient(hard, a, config.lambda), tau);
    }
    loss /= config.batch;
    grad /= config.batch;
    if (!std::isfinite(loss) || !grad.allFinite())
      throw std::runtime_error("optimal phase: non-finite loss at iteration " + std::to_string(it));
    result.loss_history.push_back(loss);
    adam.step(result.logits, grad, config);
  }

  // Exponential smoothing, then window means over the first and last 10%.
  const std::size_t total = result.loss_history.size();
  const std::size_t window = std::max<std::size_t>(1, total / 10);
  std::vector<double> smooth(total);
  double ema = result.loss_history.front();
  for (std::size_t t = 0; t < total; ++t) {
    ema = 0.9 * ema + 0.1 * result.loss_history[t];
    smooth[t] = ema;
  }
  result.early_smoothed_loss =
      std::accumulate(smooth.begin(), smooth.begin() + static_cast<std::ptrdiff_t>(window), 0.0) / window;
  result.late_smoothed_loss =
      std::accumulate(smooth.end() - static_cast<std::ptrdiff_t>(window), smooth.end(), 0.0) / window;
  return result;
}

Skeleton extract_skeleton(const Eigen::MatrixXd& logits, const PairIndex& pairs) {
  if (logits.cols() != pairs.size()) throw InvalidInput("logit matrix does not match pair count");
  const int d = pairs.variables();
  Skeleton sk{AdjMatrix::Zero(d, d)};
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    const auto [i, j] = pairs.pair(static_cast<int>(best));
    sk.adjacency(i, j) = sk.adjacency(j, i) = 1;
  }
  return sk;
}

Skeleton top_k_skeleton(const Eigen::VectorXd& a, const PairIndex& pairs, int k) {
  if (a.size() != pairs.size()) throw InvalidInput("HSIC vector does not match pair count");
  std::vector<int> idx(static_cast<std::size_t>(a.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int l, int r) { return a(l) > a(r); });
  const int d = pairs.variables();
  Skeleton sk{AdjMatrix::Zero(d, d)};
  for (int c = 0; c < std::min<int>(k, static_cast<int>(idx.size())); ++c) {
    const auto [i, j] = pairs.pair(idx[static_cast<std::size_t>(c)]);
    sk.adjacency(i, j) = sk.adjacency(j, i) = 1;
  }
  return sk;
}

}  // namespace otdag
