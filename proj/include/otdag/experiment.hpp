#pragma once

#include "otdag/error.hpp"
#include "otdag/graph.hpp"
#include "otdag/hsic.hpp"
#include "otdag/metrics.hpp"
#include "otdag/optimal.hpp"
#include "otdag/synthdata.hpp"
#include "otdag/tuning.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace otdag {

/// Resolved settings for every subcommand. Grid keys (d, edges, n, model)
/// hold lists; single-run commands use the first entry.
struct ExperimentConfig {
  std::vector<int> d{10};
  std::vector<int> edges{40};
  std::vector<int> n{100};
  std::vector<ModelKind> models{ModelKind::Mlp};
  int hidden_width = 100;
  double noise_std = 1.0;
  HsicOptions hsic;
  GumbelConfig optimal;
  /// When set, the skeleton is the top-k pairs of A instead of the trained
  /// selector.
  std::optional<int> top_k;
  int reps = 1;
  std::uint64_t seed = 0;
  std::string out = ".";

  void validate() const;
};

/// Applies one "key = value" setting; throws InvalidInput on an unknown key
/// or a malformed value. List keys accept comma-separated values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a flat "key = value" file ('#' comments) on top of `config`.
void load_config_file(ExperimentConfig& config, const std::string& path);

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct PhaseTimings {
  double hsic_seconds = 0.0;
  double optimal_seconds = 0.0;
  double tuning_seconds = 0.0;
};

struct LearnResult {
  Eigen::VectorXd first_order;
  Skeleton skeleton;
  TuneTrace trace;
  double early_loss = 0.0;
  double late_loss = 0.0;
  PhaseTimings timings;
};

/// first-order HSIC -> selector training -> skeleton readout -> tuning.
LearnResult learn(const Dataset& data, const ExperimentConfig& config);

/// Tuning phase only, from a given skeleton.
TuneTrace learn_from_skeleton(const Dataset& data, const Skeleton& skeleton, const ExperimentConfig& config);

nlohmann::ordered_json metrics_to_json(const MetricsReport& report);

/// Writes graph.txt, data.csv, sem.json and manifest.json into config.out.
void run_gen(const ExperimentConfig& config);

/// Writes learned.txt, skeleton.txt, report.json, timing.json and
/// manifest.json into config.out.
LearnResult run_learn(const std::string& data_path, const ExperimentConfig& config);

/// Writes learned.txt and manifest.json into config.out.
LearnedGraph run_tune_only(const std::string& data_path, const std::string& skeleton_path,
                           const ExperimentConfig& config);

/// Scores an estimated edge list against a true one.
MetricsReport run_eval(const std::string& truth_path, const std::string& estimate_path,
                       std::optional<int> nodes = std::nullopt);

/// Writes first_order.csv and second_order.csv into config.out.
void run_hsic(const std::string& data_path, const ExperimentConfig& config);

/// Phases reported per repetition, in pipeline order.
inline const std::vector<std::string>& phase_names() {
  static const std::vector<std::string> names{"optimal", "deletion", "addition", "dag_formalization"};
  return names;
}

struct RepetitionReport {
  int d = 0;
  int edges = 0;
  int n = 0;
  ModelKind model = ModelKind::Mlp;
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<MetricsReport> phases;  // indexed like phase_names()
  AdjMatrix truth;
  AdjMatrix learned;
  PhaseTimings timings;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RepetitionReport> repetitions;
};

/// One repetition of a grid cell: fresh graph and dataset, learn, score.
RepetitionReport run_repetition(const ExperimentConfig& config, int d, int edges, int n, ModelKind model,
                                int rep);

/// Runs the full grid and writes bench.csv, report.json, timing.json and
/// manifest.json into config.out (the CSV and report are flushed with the
/// completed cells if a cell throws).
RunReport run_benchmark(const ExperimentConfig& config);

/// Benchmark table: header plus one row per cell x phase x statistic
/// (mean, median, std), columns
/// d,edges,n,model,phase,statistic,sid,aupr,shd,estimated_edges.
std::string benchmark_csv(const RunReport& report);

nlohmann::ordered_json report_to_json(const RunReport& report);

}  // namespace otdag
