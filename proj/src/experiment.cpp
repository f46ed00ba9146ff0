#include "otdag/experiment.hpp"

#include "otdag/error.hpp"
#include "otdag/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace otdag {
namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  if (items.empty()) throw InvalidInput("empty list value");
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  std::string rest;
  if (!(in >> v) || (in >> rest)) throw InvalidInput("bad value '" + text + "' for " + key);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw InvalidInput("bad boolean '" + text + "' for " + key);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<int>(key, item));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::filesystem::path prepare_out(const ExperimentConfig& config) {
  std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);
  return dir;
}

ordered_json manifest(const std::string& command, const ExperimentConfig& config, ordered_json inputs = {}) {
  ordered_json doc;
  doc["command"] = command;
  doc["config"] = config_to_json(config);
  if (!inputs.is_null()) doc["inputs"] = std::move(inputs);
  return doc;
}

ordered_json timings_to_json(const PhaseTimings& t) {
  ordered_json doc;
  doc["hsic_seconds"] = t.hsic_seconds;
  doc["optimal_seconds"] = t.optimal_seconds;
  doc["tuning_seconds"] = t.tuning_seconds;
  return doc;
}

ordered_json edges_to_json(const AdjMatrix& adj) {
  ordered_json list = ordered_json::array();
  for (const Edge& e : edges(adj)) list.push_back({e.from, e.to});
  return list;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto positive = [](const std::vector<int>& v, const char* name) {
    if (v.empty()) throw InvalidInput(std::string(name) + " must not be empty");
    for (int x : v)
      if (x < 1) throw InvalidInput(std::string(name) + " values must be positive");
  };
  positive(d, "d");
  positive(n, "n");
  if (edges.empty()) throw InvalidInput("edges must not be empty");
  for (int e : edges)
    if (e < 0) throw InvalidInput("edges values must be non-negative");
  if (models.empty()) throw InvalidInput("model must not be empty");
  if (reps < 1) throw InvalidInput("reps must be >= 1");
  if (hidden_width < 1) throw InvalidInput("hidden must be >= 1");
  if (!(noise_std > 0.0)) throw InvalidInput("noise_std must be positive");
  if (top_k && *top_k < 0) throw InvalidInput("top_k must be non-negative");
  optimal.validate();
}

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "d") config.d = parse_int_list(key, value);
  else if (key == "edges") config.edges = parse_int_list(key, value);
  else if (key == "n") config.n = parse_int_list(key, value);
  else if (key == "model") {
    config.models.clear();
    for (const auto& item : split_list(value)) config.models.push_back(parse_model_kind(item));
  } else if (key == "hidden") config.hidden_width = parse_number<int>(key, value);
  else if (key == "noise_std") config.noise_std = parse_number<double>(key, value);
  else if (key == "kernel") config.hsic.kernel = parse_kernel_kind(value);
  else if (key == "standardize") config.hsic.standardize = parse_bool(key, value);
  else if (key == "lambda") config.optimal.lambda = parse_number<double>(key, value);
  else if (key == "temp") config.optimal.temperature = config.optimal.final_temperature = parse_number<double>(key, value);
  else if (key == "final_temp") config.optimal.final_temperature = parse_number<double>(key, value);
  else if (key == "lr") config.optimal.learning_rate = parse_number<double>(key, value);
  else if (key == "iters") config.optimal.iterations = parse_number<int>(key, value);
  else if (key == "batch") config.optimal.batch = parse_number<int>(key, value);
  else if (key == "top_k") {
    if (value == "none" || value.empty()) config.top_k.reset();
    else config.top_k = parse_number<int>(key, value);
  } else if (key == "reps") config.reps = parse_number<int>(key, value);
  else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") config.out = value;
  else throw InvalidInput("unknown setting '" + key + "'");
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidInput& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json doc;
  doc["d"] = c.d;
  doc["edges"] = c.edges;
  doc["n"] = c.n;
  ordered_json models = ordered_json::array();
  for (ModelKind m : c.models) models.push_back(std::string(to_string(m)));
  doc["model"] = std::move(models);
  doc["hidden"] = c.hidden_width;
  doc["noise_std"] = c.noise_std;
  doc["kernel"] = std::string(to_string(c.hsic.kernel));
  doc["standardize"] = c.hsic.standardize;
  doc["temp"] = c.optimal.temperature;
  doc["final_temp"] = c.optimal.final_temperature;
  doc["lambda"] = c.optimal.lambda;
  doc["lr"] = c.optimal.learning_rate;
  doc["adam_beta1"] = c.optimal.beta1;
  doc["adam_beta2"] = c.optimal.beta2;
  doc["adam_epsilon"] = c.optimal.epsilon;
  doc["iters"] = c.optimal.iterations;
  doc["batch"] = c.optimal.batch;
  doc["top_k"] = c.top_k ? ordered_json(*c.top_k) : ordered_json(nullptr);
  doc["reps"] = c.reps;
  doc["seed"] = c.seed;
  return doc;
}

LearnResult learn(const Dataset& data, const ExperimentConfig& config) {
  config.optimal.validate();
  LearnResult result;

  auto start = Clock::now();
  const HsicCache cache(data, config.hsic);
  result.first_order = cache.first_order();
  result.timings.hsic_seconds = seconds_since(start);

  start = Clock::now();
  if (config.top_k) {
    result.skeleton = top_k_skeleton(result.first_order, cache.pairs(), *config.top_k);
  } else {
    const TrainResult trained = train_selector(result.first_order, config.optimal);
    result.skeleton = extract_skeleton(trained.logits, cache.pairs());
    result.early_loss = trained.early_smoothed_loss;
    result.late_loss = trained.late_smoothed_loss;
  }
  // A pair with zero first-order HSIC carries no dependence to orient.
  for (int t = 0; t < cache.pairs().size(); ++t) {
    if (result.first_order(t) > 0.0) continue;
    const auto [i, j] = cache.pairs().pair(t);
    result.skeleton.adjacency(i, j) = result.skeleton.adjacency(j, i) = 0;
  }
  result.timings.optimal_seconds = seconds_since(start);

  start = Clock::now();
  result.trace = tune_traced(result.skeleton, cache);
  result.timings.tuning_seconds = seconds_since(start);
  return result;
}

TuneTrace learn_from_skeleton(const Dataset& data, const Skeleton& skeleton, const ExperimentConfig& config) {
  if (skeleton.nodes() != data.variables())
    throw InvalidInput("skeleton has " + std::to_string(skeleton.nodes()) + " nodes, dataset has " +
                       std::to_string(data.variables()) + " variables");
  const HsicCache cache(data, config.hsic);
  return tune_traced(skeleton, cache);
}

ordered_json metrics_to_json(const MetricsReport& r) {
  ordered_json doc;
  doc["sid"] = r.sid;
  doc["aupr"] = r.aupr;
  doc["shd"] = r.shd;
  doc["estimated_edges"] = r.estimated_edges;
  doc["true_edges"] = r.true_edges;
  doc["true_positives"] = r.counts.true_positives;
  doc["false_positives"] = r.counts.false_positives;
  doc["false_negatives"] = r.counts.false_negatives;
  return doc;
}

void run_gen(const ExperimentConfig& config) {
  config.validate();
  const auto dir = prepare_out(config);
  const TrueGraph graph = random_dag(config.d.front(), config.edges.front(), derive_seed(config.seed, 0));
  const SemModel model{config.models.front(), config.hidden_width, config.noise_std};
  const SemInstance sem = build_sem(graph, model, derive_seed(config.seed, 1));
  const std::uint64_t data_seed = derive_seed(config.seed, 2);
  const Dataset data = generate(sem, config.n.front(), data_seed);

  save_edge_list((dir / "graph.txt").string(), graph.adjacency);
  save_dataset((dir / "data.csv").string(), data);
  ordered_json sidecar = sem_to_json(sem);
  sidecar["graph_seed"] = derive_seed(config.seed, 0);
  sidecar["noise_seed"] = data_seed;
  sidecar["n"] = config.n.front();
  write_json((dir / "sem.json").string(), sidecar);
  write_json((dir / "manifest.json").string(), manifest("gen", config));
}

LearnResult run_learn(const std::string& data_path, const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(data_path);
  const auto dir = prepare_out(config);
  ExperimentConfig resolved = config;
  resolved.optimal.seed = derive_seed(config.seed, 3);
  LearnResult result = learn(data, resolved);

  save_edge_list((dir / "learned.txt").string(), result.trace.result.adjacency);
  save_skeleton((dir / "skeleton.txt").string(), result.skeleton);

  ordered_json report;
  report["variables"] = data.names;
  report["samples"] = data.samples();
  report["first_order"] = std::vector<double>(result.first_order.data(),
                                              result.first_order.data() + result.first_order.size());
  report["optimal_loss"] = {{"early_smoothed", result.early_loss}, {"late_smoothed", result.late_loss}};
  report["skeleton_edges"] = edge_count(result.skeleton.adjacency) / 2;
  report["phases"] = {{"deletion", edges_to_json(positive_edges(result.trace.deleted))},
                      {"addition", edges_to_json(positive_edges(result.trace.added))},
                      {"dag_formalization", edges_to_json(result.trace.result.adjacency)}};
  write_json((dir / "report.json").string(), report);
  write_json((dir / "timing.json").string(), timings_to_json(result.timings));
  write_json((dir / "manifest.json").string(), manifest("learn", resolved, {{"data", data_path}}));
  return result;
}

LearnedGraph run_tune_only(const std::string& data_path, const std::string& skeleton_path,
                           const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(data_path);
  const Skeleton skeleton = load_skeleton(skeleton_path, data.variables());
  const auto dir = prepare_out(config);
  const TuneTrace trace = learn_from_skeleton(data, skeleton, config);
  save_edge_list((dir / "learned.txt").string(), trace.result.adjacency);
  write_json((dir / "manifest.json").string(),
             manifest("tune-only", config, {{"data", data_path}, {"skeleton", skeleton_path}}));
  return trace.result;
}

MetricsReport run_eval(const std::string& truth_path, const std::string& estimate_path, std::optional<int> nodes) {
  const TrueGraph truth = load_graph(truth_path, nodes);
  const AdjMatrix estimate = load_edge_list(estimate_path, truth.nodes(), false);
  return evaluate(truth.adjacency, estimate);
}

void run_hsic(const std::string& data_path, const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(data_path);
  const auto dir = prepare_out(config);
  const HsicCache cache(data, config.hsic);
  {
    std::ofstream out(dir / "first_order.csv", std::ios::binary);
    out << "i,j,hsic\n";
    for (int t = 0; t < cache.pairs().size(); ++t) {
      const auto [i, j] = cache.pairs().pair(t);
      out << i << ',' << j << ',' << format_double(cache.first_order()(t)) << '\n';
    }
  }
  {
    std::ofstream out(dir / "second_order.csv", std::ios::binary);
    out << "child,j,k,hsic\n";
    for (const auto& [i, j, k, v] : cache.all_second_order())
      out << i << ',' << j << ',' << k << ',' << format_double(v) << '\n';
  }
  write_json((dir / "manifest.json").string(), manifest("hsic", config, {{"data", data_path}}));
}

RepetitionReport run_repetition(const ExperimentConfig& config, int d, int edges, int n, ModelKind model,
                                int rep) {
  RepetitionReport r;
  r.d = d;
  r.edges = edges;
  r.n = n;
  r.model = model;
  r.rep = rep;
  r.seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));

  const TrueGraph graph = random_dag(d, edges, derive_seed(r.seed, 0));
  const SemInstance sem = build_sem(graph, SemModel{model, config.hidden_width, config.noise_std},
                                    derive_seed(r.seed, 1));
  const Dataset data = generate(sem, n, derive_seed(r.seed, 2));
  ExperimentConfig resolved = config;
  resolved.optimal.seed = derive_seed(r.seed, 3);
  const LearnResult learned = learn(data, resolved);

  r.truth = graph.adjacency;
  r.learned = learned.trace.result.adjacency;
  r.timings = learned.timings;
  r.phases.push_back(evaluate_phase(graph.adjacency, positive_edges(learned.trace.seeded)));
  r.phases.push_back(evaluate_phase(graph.adjacency, positive_edges(learned.trace.deleted)));
  r.phases.push_back(evaluate_phase(graph.adjacency, positive_edges(learned.trace.added)));
  r.phases.push_back(evaluate(graph.adjacency, learned.trace.result.adjacency));
  return r;
}

namespace {

struct Stats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
};

Stats summarize(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  const double count = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= count;
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / count);
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return s;
}

template <typename Fn>
void for_each_cell(const RunReport& report, Fn&& fn) {
  const auto& reps = report.repetitions;
  std::size_t begin = 0;
  while (begin < reps.size()) {
    std::size_t end = begin + 1;
    while (end < reps.size() && reps[end].d == reps[begin].d && reps[end].edges == reps[begin].edges &&
           reps[end].n == reps[begin].n && reps[end].model == reps[begin].model)
      ++end;
    fn(begin, end);
    begin = end;
  }
}

}  // namespace

std::string benchmark_csv(const RunReport& report) {
  std::ostringstream out;
  out << "d,edges,n,model,phase,statistic,sid,aupr,shd,estimated_edges\n";
  for_each_cell(report, [&](std::size_t begin, std::size_t end) {
    const RepetitionReport& head = report.repetitions[begin];
    for (std::size_t p = 0; p < phase_names().size(); ++p) {
      std::vector<double> sid, ap, hd, ne;
      for (std::size_t r = begin; r < end; ++r) {
        const MetricsReport& m = report.repetitions[r].phases[p];
        sid.push_back(m.sid);
        ap.push_back(m.aupr);
        hd.push_back(m.shd);
        ne.push_back(m.estimated_edges);
      }
      const Stats s[4] = {summarize(sid), summarize(ap), summarize(hd), summarize(ne)};
      const char* names[3] = {"mean", "median", "std"};
      for (int stat = 0; stat < 3; ++stat) {
        out << head.d << ',' << head.edges << ',' << head.n << ',' << to_string(head.model) << ','
            << phase_names()[p] << ',' << names[stat];
        for (const Stats& st : s) {
          const double v = stat == 0 ? st.mean : stat == 1 ? st.median : st.std;
          out << ',' << format_double(v);
        }
        out << '\n';
      }
    }
  });
  return out.str();
}

ordered_json report_to_json(const RunReport& report) {
  ordered_json doc;
  doc["config"] = config_to_json(report.config);
  ordered_json reps = ordered_json::array();
  for (const RepetitionReport& r : report.repetitions) {
    ordered_json item;
    item["d"] = r.d;
    item["edges"] = r.edges;
    item["n"] = r.n;
    item["model"] = std::string(to_string(r.model));
    item["rep"] = r.rep;
    item["seed"] = r.seed;
    ordered_json phases;
    for (std::size_t p = 0; p < r.phases.size(); ++p) phases[phase_names()[p]] = metrics_to_json(r.phases[p]);
    item["phases"] = std::move(phases);
    item["true_edges"] = edges_to_json(r.truth);
    item["learned_edges"] = edges_to_json(r.learned);
    reps.push_back(std::move(item));
  }
  doc["repetitions"] = std::move(reps);

  ordered_json cells = ordered_json::array();
  for_each_cell(report, [&](std::size_t begin, std::size_t end) {
    const RepetitionReport& head = report.repetitions[begin];
    ordered_json cell;
    cell["d"] = head.d;
    cell["edges"] = head.edges;
    cell["n"] = head.n;
    cell["model"] = std::string(to_string(head.model));
    cell["repetitions"] = end - begin;
    for (std::size_t p = 0; p < phase_names().size(); ++p) {
      std::vector<double> sid, ap, hd;
      for (std::size_t r = begin; r < end; ++r) {
        sid.push_back(report.repetitions[r].phases[p].sid);
        ap.push_back(report.repetitions[r].phases[p].aupr);
        hd.push_back(report.repetitions[r].phases[p].shd);
      }
      ordered_json agg;
      for (auto [name, values] : {std::pair{"sid", &sid}, std::pair{"aupr", &ap}, std::pair{"shd", &hd}}) {
        const Stats s = summarize(*values);
        agg[name] = {{"mean", s.mean}, {"median", s.median}, {"std", s.std}};
      }
      cell[phase_names()[p]] = std::move(agg);
    }
    cells.push_back(std::move(cell));
  });
  doc["aggregates"] = std::move(cells);
  return doc;
}

RunReport run_benchmark(const ExperimentConfig& config) {
  config.validate();
  const auto dir = prepare_out(config);
  RunReport report{config, {}};
  ordered_json timing = ordered_json::array();

  auto flush = [&] {
    std::ofstream csv(dir / "bench.csv", std::ios::binary);
    csv << benchmark_csv(report);
    write_json((dir / "report.json").string(), report_to_json(report));
    write_json((dir / "timing.json").string(), timing);
  };

  write_json((dir / "manifest.json").string(), manifest("bench", config));
  try {
    for (int d : config.d)
      for (int e : config.edges)
        for (int n : config.n)
          for (ModelKind model : config.models)
            for (int rep = 0; rep < config.reps; ++rep) {
              RepetitionReport r = run_repetition(config, d, e, n, model, rep);
              ordered_json t = timings_to_json(r.timings);
              t["d"] = d;
              t["edges"] = e;
              t["n"] = n;
              t["model"] = std::string(to_string(model));
              t["rep"] = rep;
              timing.push_back(std::move(t));
              report.repetitions.push_back(std::move(r));
            }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  return report;
}

}  // namespace otdag
