#include "otdag/experiment.hpp"
#include "otdag/hsic.hpp"
#include "otdag/metrics.hpp"
#include "otdag/synthdata.hpp"
#include "otdag/tuning.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

otdag::Dataset to_dataset(const Eigen::MatrixXd& values) {
  otdag::Dataset data;
  data.values = values;
  for (Eigen::Index c = 0; c < values.cols(); ++c) data.names.push_back("X" + std::to_string(c));
  return data;
}

otdag::ExperimentConfig learn_config(const std::string& kernel, double lambda, double temp, double lr,
                                     int iters, std::uint64_t seed, bool standardize) {
  otdag::ExperimentConfig c;
  c.hsic.kernel = otdag::parse_kernel_kind(kernel);
  c.hsic.standardize = standardize;
  c.optimal.lambda = lambda;
  c.optimal.temperature = c.optimal.final_temperature = temp;
  c.optimal.learning_rate = lr;
  c.optimal.iterations = iters;
  c.optimal.seed = seed;
  return c;
}

py::dict metrics_dict(const otdag::MetricsReport& r) {
  py::dict out;
  out["sid"] = r.sid;
  out["aupr"] = r.aupr;
  out["shd"] = r.shd;
  out["estimated_edges"] = r.estimated_edges;
  out["true_edges"] = r.true_edges;
  out["true_positives"] = r.counts.true_positives;
  out["false_positives"] = r.counts.false_positives;
  out["false_negatives"] = r.counts.false_negatives;
  return out;
}

}  // namespace

PYBIND11_MODULE(otdag, m) {
  m.doc() = "Nonparametric DAG learning with first- and second-order HSIC";

  py::register_exception<otdag::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<otdag::ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "median_heuristic", [](const Eigen::VectorXd& x) {
        return otdag::median_heuristic({x.data(), static_cast<std::size_t>(x.size())});
      },
      py::arg("x"));

  m.def(
      "hsic",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& kernel, bool standardize) {
        return otdag::hsic({x.data(), static_cast<std::size_t>(x.size())},
                           {y.data(), static_cast<std::size_t>(y.size())},
                           {otdag::parse_kernel_kind(kernel), standardize});
      },
      py::arg("x"), py::arg("y"), py::arg("kernel") = "gaussian", py::arg("standardize") = false,
      "Biased empirical HSIC with median-heuristic bandwidths.");

  m.def(
      "first_order",
      [](const Eigen::MatrixXd& data, const std::string& kernel) {
        return otdag::first_order_vector(to_dataset(data), {otdag::parse_kernel_kind(kernel), false});
      },
      py::arg("data"), py::arg("kernel") = "gaussian",
      "Pairwise HSIC vector over columns, pairs in lexicographic order.");

  m.def(
      "second_order",
      [](const Eigen::MatrixXd& data, int i, int j, int k, const std::string& kernel) {
        return otdag::second_order(to_dataset(data), i, j, k, {otdag::parse_kernel_kind(kernel), false});
      },
      py::arg("data"), py::arg("i"), py::arg("j"), py::arg("k"), py::arg("kernel") = "gaussian");

  m.def(
      "random_dag",
      [](int d, int edges, std::uint64_t seed) { return otdag::random_dag(d, edges, seed).adjacency; },
      py::arg("d"), py::arg("edges"), py::arg("seed") = 0,
      "Adjacency with a[i, j] == 1 meaning j -> i.");

  m.def(
      "generate",
      [](const otdag::AdjMatrix& adjacency, const std::string& model, int n, std::uint64_t seed, int hidden,
         double noise_std) {
        const auto graph = otdag::make_true_graph(adjacency);
        return otdag::generate(graph, {otdag::parse_model_kind(model), hidden, noise_std}, n, seed).values;
      },
      py::arg("adjacency"), py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("hidden") = 100,
      py::arg("noise_std") = 1.0);

  m.def(
      "learn",
      [](const Eigen::MatrixXd& data, const std::string& kernel, double lambda, double temp, double lr,
         int iters, std::uint64_t seed, bool standardize) {
        const auto result =
            otdag::learn(to_dataset(data), learn_config(kernel, lambda, temp, lr, iters, seed, standardize));
        py::dict out;
        out["adjacency"] = result.trace.result.adjacency;
        out["skeleton"] = result.skeleton.adjacency;
        out["first_order"] = result.first_order;
        out["deletion"] = otdag::positive_edges(result.trace.deleted);
        out["addition"] = otdag::positive_edges(result.trace.added);
        return out;
      },
      py::arg("data"), py::arg("kernel") = "gaussian", py::arg("lambda_") = 0.01, py::arg("temp") = 1.0,
      py::arg("lr") = 0.01, py::arg("iters") = 2000, py::arg("seed") = 0, py::arg("standardize") = false,
      "Optimal phase then tuning phase; returns the learned DAG and intermediate graphs.");

  m.def(
      "tune",
      [](const Eigen::MatrixXd& data, const otdag::AdjMatrix& skeleton, const std::string& kernel) {
        return otdag::tune(otdag::Skeleton{skeleton}, to_dataset(data), {otdag::parse_kernel_kind(kernel), false})
            .adjacency;
      },
      py::arg("data"), py::arg("skeleton"), py::arg("kernel") = "gaussian");

  m.def("sid", &otdag::sid, py::arg("truth"), py::arg("estimate"));
  m.def(
      "shd",
      [](const otdag::AdjMatrix& truth, const otdag::AdjMatrix& estimate) {
        return otdag::shd(otdag::confusion(truth, estimate));
      },
      py::arg("truth"), py::arg("estimate"));
  m.def("aupr", &otdag::aupr, py::arg("truth"), py::arg("scores"));
  m.def(
      "evaluate",
      [](const otdag::AdjMatrix& truth, const otdag::AdjMatrix& estimate) {
        return metrics_dict(otdag::evaluate(truth, estimate));
      },
      py::arg("truth"), py::arg("estimate"));
}
