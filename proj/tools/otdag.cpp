// otdag: learn nonparametric DAGs with first- and second-order HSIC.
//
//   otdag gen       --d 10 --edges 40 --n 100 --model tanh --out run/
//   otdag learn     run/data.csv --out run/learn
//   otdag tune-only run/data.csv run/learn/skeleton.txt --out run/tune
//   otdag eval      run/graph.txt run/learn/learned.txt
//   otdag bench     --d 10 --edges 40 --n 100 --model mlp,tanh --reps 5 --out bench/
//   otdag hsic      run/data.csv --out run/hsic
//
// Settings come from an optional --config key=value file; flags win.

#include "otdag/error.hpp"
#include "otdag/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

// Flag name -> config key; values are forwarded verbatim to apply_setting.
const std::map<std::string, std::string> kSettingFlags{
    {"seed", "seed"},     {"kernel", "kernel"}, {"model", "model"},   {"d", "d"},
    {"edges", "edges"},   {"n", "n"},           {"reps", "reps"},     {"lambda", "lambda"},
    {"temp", "temp"},     {"final-temp", "final_temp"},               {"lr", "lr"},
    {"iters", "iters"},   {"batch", "batch"},   {"hidden", "hidden"}, {"noise-std", "noise_std"},
    {"top-k", "top_k"},   {"standardize", "standardize"},             {"out", "out"},
};

struct Settings {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_setting_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key = value configuration file");
  for (const auto& [flag, key] : kSettingFlags)
    cmd->add_option("--" + flag, s.values[key], key);
}

otdag::ExperimentConfig resolve(const Settings& s) {
  otdag::ExperimentConfig config;
  if (!s.config_path.empty()) otdag::load_config_file(config, s.config_path);
  for (const auto& [key, value] : s.values)
    if (!value.empty()) otdag::apply_setting(config, key, value);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric DAG learning with first- and second-order HSIC"};
  app.require_subcommand(1);

  Settings gen_s, learn_s, tune_s, bench_s, hsic_s;
  std::string data_path, skeleton_path, truth_path, estimate_path;
  std::optional<int> eval_nodes;

  auto* gen = app.add_subcommand("gen", "Generate a random DAG and a dataset from it");
  add_setting_flags(gen, gen_s);

  auto* learn = app.add_subcommand("learn", "Run the optimal and tuning phases on a CSV dataset");
  learn->add_option("data", data_path, "dataset CSV")->required();
  add_setting_flags(learn, learn_s);

  auto* tune = app.add_subcommand("tune-only", "Run the tuning phase from a given skeleton");
  tune->add_option("data", data_path, "dataset CSV")->required();
  tune->add_option("skeleton", skeleton_path, "undirected 'i j' edge list")->required();
  add_setting_flags(tune, tune_s);

  auto* eval = app.add_subcommand("eval", "Score an estimated edge list against the true one");
  eval->add_option("truth", truth_path, "true edge list")->required();
  eval->add_option("estimate", estimate_path, "estimated edge list")->required();
  eval->add_option("--nodes", eval_nodes, "node count when the files do not declare it");

  auto* bench = app.add_subcommand("bench", "Run a (d, edges, n, model) benchmark grid");
  add_setting_flags(bench, bench_s);

  auto* hsic = app.add_subcommand("hsic", "Dump first- and second-order HSIC values");
  hsic->add_option("data", data_path, "dataset CSV")->required();
  add_setting_flags(hsic, hsic_s);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto config = resolve(gen_s);
      otdag::run_gen(config);
      std::cout << "wrote " << config.out << "/{graph.txt,data.csv,sem.json,manifest.json}\n";
    } else if (learn->parsed()) {
      const auto config = resolve(learn_s);
      const auto result = otdag::run_learn(data_path, config);
      std::cout << "learned " << otdag::edge_count(result.trace.result.adjacency) << " edges -> "
                << config.out << "/learned.txt\n";
    } else if (tune->parsed()) {
      const auto config = resolve(tune_s);
      const auto graph = otdag::run_tune_only(data_path, skeleton_path, config);
      std::cout << "learned " << otdag::edge_count(graph.adjacency) << " edges -> " << config.out
                << "/learned.txt\n";
    } else if (eval->parsed()) {
      const auto report = otdag::run_eval(truth_path, estimate_path, eval_nodes);
      std::cout << otdag::metrics_to_json(report).dump(2) << '\n';
    } else if (bench->parsed()) {
      const auto config = resolve(bench_s);
      const auto report = otdag::run_benchmark(config);
      std::cout << otdag::benchmark_csv(report);
    } else if (hsic->parsed()) {
      const auto config = resolve(hsic_s);
      otdag::run_hsic(data_path, config);
      std::cout << "wrote " << config.out << "/{first_order.csv,second_order.csv}\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "otdag: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
