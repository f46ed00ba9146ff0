#pragma once

#include <Eigen/Core>

#include <span>
#include <string_view>

namespace otdag {

enum class KernelKind { Gaussian, Sigmoid };

KernelKind parse_kernel_kind(std::string_view name);
std::string_view to_string(KernelKind kind);

/// Gaussian: k(a, b) = exp(-(a - b)^2 / (2 bandwidth^2)).
/// Sigmoid:  k(a, b) = tanh(slope * a * b + offset).
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double bandwidth = 1.0;
  double slope = 1.0;
  double offset = 0.0;

  static KernelSpec gaussian(double bandwidth);
  static KernelSpec sigmoid(double slope = 1.0, double offset = 0.0);
};

/// Bandwidth sigma with 2 sigma^2 equal to the median squared pairwise
/// distance over all n(n-1)/2 pairs. Falls back to 1 when that median is 0.
/// Throws InvalidInput for n < 2.
double median_heuristic(std::span<const double> x);

/// Kernel for a sample: Gaussian with the median-heuristic bandwidth,
/// or the default sigmoid parameters.
KernelSpec fit_kernel(KernelKind kind, std::span<const double> x);

Eigen::MatrixXd gram(std::span<const double> x, const KernelSpec& spec);

/// H G H with H = I - (1/n) 1 1^T. The result is exactly symmetric when G is.
Eigen::MatrixXd center(const Eigen::MatrixXd& g);

}  // namespace otdag
