#pragma once

#include "otdag/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace otdag {

/// Generator models. Linear (sum of alpha X_j plus noise) is an extra
/// mechanism used for linear-Gaussian fixtures.
enum class ModelKind { Mlp, Tanh, SigmoidMix, Abs, MlpTanhMix, AbsTanhMix, Linear };

/// Per-node mechanism after mixing has been resolved. SigmoidScaled is the
/// sigmoid(sum alpha X_j) * beta + e branch of the MLP-Tanh mix.
enum class Mechanism { Root, Mlp, Tanh, SigmoidMix, Abs, SigmoidScaled, Linear };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);
std::string_view to_string(Mechanism mechanism);

/// The six benchmark models, in listing order.
const std::vector<ModelKind>& benchmark_models();

struct SemModel {
  ModelKind kind = ModelKind::Mlp;
  int hidden_width = 100;  // MLP only
  double noise_std = 1.0;
};

struct NodeMechanism {
  Mechanism kind = Mechanism::Root;
  std::vector<int> parents;
  Eigen::VectorXd alpha;   // one weight per parent
  double beta = 0.0;
  Eigen::MatrixXd w1;      // parents x hidden (MLP)
  Eigen::VectorXd w2;      // hidden (MLP)
};

/// A graph together with every weight and mechanism draw, fixed at build
/// time so datasets can be replayed.
struct SemInstance {
  TrueGraph graph;
  SemModel model;
  std::uint64_t seed = 0;
  std::vector<NodeMechanism> nodes;
};

/// splitmix64 finalizer; derive_seed(master, k) gives the k-th stream seed.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Random causal order plus independent Bernoulli(p) edges along it, with
/// p = edges / (d(d-1)/2).
TrueGraph random_dag(int d, int edges, std::uint64_t seed);

/// Uniform on [-2, -0.5) U [0.5, 2), each interval with probability 1/2.
double sample_weight(std::mt19937_64& rng);

SemInstance build_sem(const TrueGraph& graph, const SemModel& model, std::uint64_t seed);

/// n x d matrix of N(0, noise_std^2) draws; column i is node i's noise stream.
Eigen::MatrixXd sample_noise(int d, int n, double noise_std, std::uint64_t seed);

/// Samples in topological order using sample_noise(d, n, noise_std, seed).
Dataset generate(const SemInstance& sem, int n, std::uint64_t seed);

/// Convenience: build_sem with derive_seed(seed, 0), then generate with
/// derive_seed(seed, 1).
Dataset generate(const TrueGraph& graph, const SemModel& model, int n, std::uint64_t seed);

double sigmoid(double z);

}  // namespace otdag
