#include "otdag/kernel.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace otdag {

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "sigmoid") return KernelKind::Sigmoid;
  throw InvalidInput("unknown kernel '" + std::string(name) + "' (expected gaussian|sigmoid)");
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::Gaussian ? "gaussian" : "sigmoid";
}

KernelSpec KernelSpec::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0)) throw InvalidInput("gaussian bandwidth must be positive");
  return KernelSpec{KernelKind::Gaussian, bandwidth, 1.0, 0.0};
}

KernelSpec KernelSpec::sigmoid(double slope, double offset) {
  return KernelSpec{KernelKind::Sigmoid, 1.0, slope, offset};
}

double median_heuristic(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw InvalidInput("median heuristic needs at least 2 samples");

  std::vector<double> sq;
  sq.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double diff = x[a] - x[b];
      sq.push_back(diff * diff);
    }

  const std::size_t m = sq.size();
  const auto mid = sq.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(sq.begin(), mid, sq.end());
  double median = *mid;
  if (m % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), mid);
    median = 0.5 * (lower + median);
  }
  if (median <= 0.0) return 1.0;
  return std::sqrt(median / 2.0);
}

KernelSpec fit_kernel(KernelKind kind, std::span<const double> x) {
  if (kind == KernelKind::Gaussian) return KernelSpec::gaussian(median_heuristic(x));
  return KernelSpec::sigmoid();
}

Eigen::MatrixXd gram(std::span<const double> x, const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd g(n, n);
  if (spec.kind == KernelKind::Gaussian) {
    const double scale = -1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
    for (Eigen::Index b = 0; b < n; ++b) {
      g(b, b) = 1.0;
      for (Eigen::Index a = b + 1; a < n; ++a) {
        const double diff = x[a] - x[b];
        const double v = std::exp(scale * diff * diff);
        g(a, b) = v;
        g(b, a) = v;
      }
    }
  } else {
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a = b; a < n; ++a) {
        const double v = std::tanh(spec.slope * x[a] * x[b] + spec.offset);
        g(a, b) = v;
        g(b, a) = v;
      }
  }
  return g;
}

Eigen::MatrixXd center(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  const Eigen::VectorXd row_mean = g.rowwise().mean();
  const Eigen::RowVectorXd col_mean = g.colwise().mean();
  const double grand = g.mean();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a)
      c(a, b) = ((g(a, b) - row_mean(a)) - col_mean(b)) + grand;
  // Mirror the lower triangle so symmetric input gives bit-symmetric output.
  if ((g.array() == g.transpose().array()).all()) {
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a = b + 1; a < n; ++a) c(b, a) = c(a, b);
  }
  return c;
}

}  // namespace otdag
