#include "otdag/synthdata.hpp"

#include "otdag/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace otdag {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "mlp") return ModelKind::Mlp;
  if (name == "tanh") return ModelKind::Tanh;
  if (name == "sigmoid-mix") return ModelKind::SigmoidMix;
  if (name == "abs") return ModelKind::Abs;
  if (name == "mlp-tanh-mix") return ModelKind::MlpTanhMix;
  if (name == "abs-tanh-mix") return ModelKind::AbsTanhMix;
  if (name == "linear") return ModelKind::Linear;
  throw InvalidInput("unknown model '" + std::string(name) +
                     "' (expected mlp|tanh|sigmoid-mix|abs|mlp-tanh-mix|abs-tanh-mix|linear)");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Tanh: return "tanh";
    case ModelKind::SigmoidMix: return "sigmoid-mix";
    case ModelKind::Abs: return "abs";
    case ModelKind::MlpTanhMix: return "mlp-tanh-mix";
    case ModelKind::AbsTanhMix: return "abs-tanh-mix";
    case ModelKind::Linear: return "linear";
  }
  return "?";
}

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::Root: return "root";
    case Mechanism::Mlp: return "mlp";
    case Mechanism::Tanh: return "tanh";
    case Mechanism::SigmoidMix: return "sigmoid-mix";
    case Mechanism::Abs: return "abs";
    case Mechanism::SigmoidScaled: return "sigmoid-scaled";
    case Mechanism::Linear: return "linear";
  }
  return "?";
}

const std::vector<ModelKind>& benchmark_models() {
  static const std::vector<ModelKind> models{ModelKind::Mlp,        ModelKind::Tanh,
                                             ModelKind::SigmoidMix, ModelKind::Abs,
                                             ModelKind::MlpTanhMix, ModelKind::AbsTanhMix};
  return models;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + stream);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

TrueGraph random_dag(int d, int edges, std::uint64_t seed) {
  if (d < 2) throw InvalidInput("random_dag needs d >= 2");
  const int max_edges = d * (d - 1) / 2;
  if (edges < 0 || edges > max_edges)
    throw InvalidInput("edge count " + std::to_string(edges) + " outside [0, " +
                       std::to_string(max_edges) + "]");

  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const double p = static_cast<double>(edges) / max_edges;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AdjMatrix adj = AdjMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (unit(rng) < p) adj(order[b], order[a]) = 1;

  return make_true_graph(std::move(adj));
}

double sample_weight(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> magnitude(0.5, 2.0);
  std::bernoulli_distribution negative(0.5);
  const double m = magnitude(rng);
  return negative(rng) ? -m : m;
}

SemInstance build_sem(const TrueGraph& graph, const SemModel& model, std::uint64_t seed) {
  if (model.kind == ModelKind::Mlp && model.hidden_width < 1)
    throw InvalidInput("MLP hidden width must be >= 1");
  if (!(model.noise_std > 0.0)) throw InvalidInput("noise_std must be positive");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  SemInstance sem{graph, model, seed, {}};
  const int d = graph.nodes();
  sem.nodes.resize(static_cast<std::size_t>(d));

  // Draw in topological order so the stream layout follows the sampling order.
  for (int node : graph.topo_order) {
    NodeMechanism& m = sem.nodes[static_cast<std::size_t>(node)];
    m.parents = parents(graph.adjacency, node);
    if (m.parents.empty()) {
      m.kind = Mechanism::Root;
      continue;
    }
    switch (model.kind) {
      case ModelKind::Mlp: m.kind = Mechanism::Mlp; break;
      case ModelKind::Tanh: m.kind = Mechanism::Tanh; break;
      case ModelKind::SigmoidMix: m.kind = Mechanism::SigmoidMix; break;
      case ModelKind::Abs: m.kind = Mechanism::Abs; break;
      case ModelKind::Linear: m.kind = Mechanism::Linear; break;
      case ModelKind::MlpTanhMix:
        m.kind = coin(rng) ? Mechanism::SigmoidScaled : Mechanism::Tanh;
        break;
      case ModelKind::AbsTanhMix:
        m.kind = coin(rng) ? Mechanism::Abs : Mechanism::Tanh;
        break;
    }
    const auto a = static_cast<Eigen::Index>(m.parents.size());
    if (m.kind == Mechanism::Mlp) {
      const Eigen::Index b = model.hidden_width;
      m.w1.resize(a, b);
      for (Eigen::Index r = 0; r < a; ++r)
        for (Eigen::Index c = 0; c < b; ++c) m.w1(r, c) = sample_weight(rng);
      m.w2.resize(b);
      for (Eigen::Index c = 0; c < b; ++c) m.w2(c) = sample_weight(rng);
    } else {
      m.alpha.resize(a);
      for (Eigen::Index r = 0; r < a; ++r) m.alpha(r) = sample_weight(rng);
      if (m.kind == Mechanism::SigmoidMix || m.kind == Mechanism::SigmoidScaled)
        m.beta = sample_weight(rng);
    }
  }
  return sem;
}

Eigen::MatrixXd sample_noise(int d, int n, double noise_std, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise_std);
  Eigen::MatrixXd e(n, d);
  for (int i = 0; i < d; ++i)
    for (int r = 0; r < n; ++r) e(r, i) = normal(rng);
  return e;
}

Dataset generate(const SemInstance& sem, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample count must be >= 1");
  const int d = sem.graph.nodes();
  const Eigen::MatrixXd noise = sample_noise(d, n, sem.model.noise_std, seed);

  Dataset out;
  out.values.resize(n, d);
  for (int i = 0; i < d; ++i) out.names.push_back("X" + std::to_string(i));

  for (int node : sem.graph.topo_order) {
    const NodeMechanism& m = sem.nodes[static_cast<std::size_t>(node)];
    auto x = out.values.col(node);
    const auto e = noise.col(node);
    if (m.kind == Mechanism::Root) {
      x = e;
      continue;
    }
    const auto a = static_cast<Eigen::Index>(m.parents.size());
    Eigen::MatrixXd pa(n, a);
    for (Eigen::Index c = 0; c < a; ++c) pa.col(c) = out.values.col(m.parents[static_cast<std::size_t>(c)]);

    switch (m.kind) {
      case Mechanism::Mlp: {
        const Eigen::MatrixXd hidden = (pa * m.w1).unaryExpr([](double z) { return sigmoid(z); });
        x = hidden * m.w2 + e;
        break;
      }
      case Mechanism::Tanh:
        x = (pa * m.alpha).array().tanh().matrix() + e;
        break;
      case Mechanism::SigmoidMix: {
        const Eigen::VectorXd z = pa * m.alpha + e;
        x = z.unaryExpr([](double v) { return sigmoid(v); }) * m.beta;
        break;
      }
      case Mechanism::Abs:
        x = pa.cwiseAbs() * m.alpha + e;
        break;
      case Mechanism::SigmoidScaled: {
        const Eigen::VectorXd z = pa * m.alpha;
        x = z.unaryExpr([](double v) { return sigmoid(v); }) * m.beta + e;
        break;
      }
      case Mechanism::Linear:
        x = pa * m.alpha + e;
        break;
      case Mechanism::Root:
        break;
    }
  }
  return out;
}

Dataset generate(const TrueGraph& graph, const SemModel& model, int n, std::uint64_t seed) {
  return generate(build_sem(graph, model, derive_seed(seed, 0)), n, derive_seed(seed, 1));
}

}  // namespace otdag
