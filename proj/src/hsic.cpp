#include "otdag/hsic.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otdag {
namespace {

// Centered Grams of all columns are kept when they fit in this many doubles.
constexpr std::size_t kGramCacheBudget = std::size_t{32} << 20;

std::vector<double> standardized(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

std::span<const double> column(const Dataset& data, int i) {
  return {data.values.col(i).data(), static_cast<std::size_t>(data.values.rows())};
}

Dataset prepared(Dataset data, const HsicOptions& options) {
  if (options.standardize)
    for (int c = 0; c < data.variables(); ++c) {
      const auto z = standardized(column(data, c));
      std::copy(z.begin(), z.end(), data.values.col(c).data());
    }
  return data;
}

std::vector<double> summed(const Dataset& data, int j, int k) {
  const auto n = static_cast<std::size_t>(data.values.rows());
  std::vector<double> out(n);
  const double* a = data.values.col(j).data();
  const double* b = data.values.col(k).data();
  for (std::size_t r = 0; r < n; ++r) out[r] = a[r] + b[r];
  return out;
}

void check_index(const Dataset& data, int i) {
  if (i < 0 || i >= data.variables())
    throw InvalidInput("variable index " + std::to_string(i) + " out of range");
}

void check_distinct(const Dataset& data, int i, int j, int k) {
  check_index(data, i);
  check_index(data, j);
  check_index(data, k);
  if (i == j || i == k || j == k) throw InvalidInput("second-order HSIC needs distinct indices");
}

}  // namespace

Eigen::MatrixXd centered_gram(std::span<const double> x, const HsicOptions& options) {
  if (options.standardize) {
    const auto z = standardized(x);
    return center(gram(z, fit_kernel(options.kernel, z)));
  }
  return center(gram(x, fit_kernel(options.kernel, x)));
}

double hsic_from_centered(const Eigen::MatrixXd& kc, const Eigen::MatrixXd& lc) {
  const double n = static_cast<double>(kc.rows());
  return kc.cwiseProduct(lc).sum() / (n * n);
}

double hsic(std::span<const double> x, std::span<const double> y, const HsicOptions& options) {
  if (x.size() != y.size()) throw InvalidInput("hsic arguments differ in length");
  if (x.size() < 2) throw InvalidInput("hsic needs at least 2 samples");
  return hsic_from_centered(centered_gram(x, options), centered_gram(y, options));
}

PairIndex::PairIndex(int d) : d_(d) {
  if (d < 0) throw InvalidInput("negative variable count");
  pairs_.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) pairs_.emplace_back(i, j);
}

int PairIndex::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= d_ || i == j) throw InvalidInput("invalid pair");
  // Pairs before row i: sum_{r<i} (d - 1 - r).
  return i * (2 * d_ - i - 1) / 2 + (j - i - 1);
}

HsicCache::HsicCache(Dataset data, HsicOptions options)
    : data_(prepared(std::move(data), options)), options_(options), pairs_(data_.variables()) {
  const int d = data_.variables();
  const auto n = static_cast<std::size_t>(data_.samples());
  if (d < 2) throw InvalidInput("need at least 2 variables");
  if (n < 2) throw InvalidInput("need at least 2 samples");

  std::vector<Eigen::MatrixXd> grams;
  const bool keep = static_cast<std::size_t>(d) * n * n <= kGramCacheBudget;
  if (keep) {
    grams.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) grams.push_back(centered_gram(column(data_, i), options_));
  }

  first_order_.resize(pairs_.size());
  for (int t = 0; t < pairs_.size(); ++t) {
    const auto [i, j] = pairs_.pair(t);
    first_order_(t) = keep ? hsic_from_centered(grams[i], grams[j])
                           : hsic(column(data_, i), column(data_, j), options_);
  }
  if (keep) centered_ = std::move(grams);
}

Eigen::MatrixXd HsicCache::column_gram(int i) const {
  if (!centered_.empty()) return centered_[static_cast<std::size_t>(i)];
  return centered_gram(column(data_, i), options_);
}

double HsicCache::first(int i, int j) const {
  check_index(data_, i);
  check_index(data_, j);
  if (i == j) throw InvalidInput("first-order HSIC needs distinct indices");
  return first_order_(pairs_.index(i, j));
}

double HsicCache::second(int i, int j, int k) const {
  check_distinct(data_, i, j, k);
  const auto key = std::make_tuple(i, std::min(j, k), std::max(j, k));
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate yields the same value.
  const auto sum = summed(data_, std::get<1>(key), std::get<2>(key));
  const double value = centered_.empty()
                           ? hsic(column(data_, i), sum, options_)
                           : hsic_from_centered(centered_[static_cast<std::size_t>(i)],
                                                centered_gram(sum, options_));
  std::lock_guard lock(memo_mutex_);
  memo_.emplace(key, value);
  return value;
}

Eigen::MatrixXd HsicCache::first_order_matrix() const {
  const int d = variables();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int t = 0; t < pairs_.size(); ++t) {
    const auto [i, j] = pairs_.pair(t);
    m(i, j) = m(j, i) = first_order_(t);
  }
  return m;
}

std::size_t HsicCache::second_order_size() const {
  std::lock_guard lock(memo_mutex_);
  return memo_.size();
}

std::vector<std::tuple<int, int, int, double>> HsicCache::all_second_order() const {
  const int d = variables();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        if (i != j && i != k) second(i, j, k);
  std::vector<std::tuple<int, int, int, double>> out;
  std::lock_guard lock(memo_mutex_);
  for (const auto& [key, value] : memo_)
    out.emplace_back(std::get<0>(key), std::get<1>(key), std::get<2>(key), value);
  return out;
}

Eigen::VectorXd first_order_vector(const Dataset& data, const HsicOptions& options) {
  if (data.variables() < 2) throw InvalidInput("need at least 2 variables");
  const PairIndex pairs(data.variables());
  Eigen::VectorXd a(pairs.size());
  for (int t = 0; t < pairs.size(); ++t) {
    const auto [i, j] = pairs.pair(t);
    a(t) = hsic(column(data, i), column(data, j), options);
  }
  return a;
}

double second_order(const Dataset& data, int i, int j, int k, const HsicOptions& options) {
  check_distinct(data, i, j, k);
  if (j > k) std::swap(j, k);
  if (options.standardize) {
    const Dataset z = prepared(data, options);
    return hsic(column(z, i), summed(z, j, k), options);
  }
  return hsic(column(data, i), summed(data, j, k), options);
}

}  // namespace otdag
