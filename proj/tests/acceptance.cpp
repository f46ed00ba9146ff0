// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "oracles/naive_hsic.hpp"
#include "oracles/sid_oracle.hpp"
#include "otdag/experiment.hpp"
#include "otdag/io.hpp"
#include "prop_fixtures.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace otdag;
using otdag::testing::view;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "otdag_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome hsic_oracle() {
  std::mt19937_64 rng(11);
  const int sizes[3] = {4, 50, 200};
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = sizes[t % 3];
    const auto x = otdag::testing::normal_vector(rng, n);
    auto y = otdag::testing::normal_vector(rng, n);
    if (t % 2) for (int r = 0; r < n; ++r) y[r] += std::sin(2.0 * x[r]);
    worst = std::max(worst, std::abs(hsic(view(x), view(y)) - oracle::naive_hsic(x, y)));
  }
  return {worst <= 1e-9, fmt("max |diff| = %.3g over 200 pairs", worst)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  const int s = 5;
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd z(s, s), g(s, s);
    Eigen::VectorXd a(s);
    for (int r = 0; r < s; ++r) {
      a(r) = std::abs(normal(rng));
      for (int c = 0; c < s; ++c) {
        z(r, c) = normal(rng);
        g(r, c) = -std::log(-std::log(unit(rng)));
      }
    }
    const double tau = 0.5 + 0.1 * (trial % 5);
    const double lambda = trial % 2 ? 0.05 : 0.0;
    const Eigen::MatrixXd analytic = soft_loss_logit_gradient(z, g, a, tau, lambda);
    Eigen::MatrixXd numeric(s, s);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) {
        Eigen::MatrixXd zp = z, zm = z;
        zp(r, c) += h;
        zm(r, c) -= h;
        numeric(r, c) = (selection_loss(gumbel_softmax(zp, g, tau), a, lambda) -
                         selection_loss(gumbel_softmax(zm, g, tau), a, lambda)) /
                        (2.0 * h);
      }
    worst = std::max(worst, (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12));
  }
  return {worst <= 1e-4, fmt("max relative error = %.3g over 20 instances", worst)};
}

Outcome acyclicity() {
  const auto models = benchmark_models();
  const int sizes[3] = {4, 6, 8};
  int acyclic = 0;
  ExperimentConfig config;
  config.seed = 303;
  for (int run = 0; run < 200; ++run) {
    const int d = sizes[run % 3];
    const ModelKind model = models[static_cast<std::size_t>(run / 3) % models.size()];
    const RepetitionReport r = run_repetition(config, d, d, 200, model, run);
    if (is_acyclic(r.learned)) ++acyclic;
  }
  return {acyclic == 200, fmt("%d/200 acyclic", acyclic)};
}

Outcome hsic_inequalities() {
  using namespace otdag::testing;
  const int n = 600;
  bool pass = true;
  std::string detail = "parent beats independent:";
  for (ModelKind m : benchmark_models()) {
    const int wins = parent_beats_independent(m, 100, n);
    pass = pass && wins >= 90;
    detail += fmt(" %s=%d", std::string(to_string(m)).c_str(), wins);
  }
  const int a = redundant_sum_not_larger(100, n);
  const int b = collider_sum_larger(100, n);
  const int c = both_parents_beat_mixed(100, n);
  pass = pass && a >= 90 && b >= 90 && c >= 90;
  detail += fmt("; redundant=%d collider=%d both-parents=%d (of 100, need 90)", a, b, c);
  return {pass, detail};
}

Outcome four_node_recovery() {
  const TrueGraph graph = load_graph(OTDAG_FIXTURE_DIR "/four_node.txt");
  ExperimentConfig config;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SemInstance sem = build_sem(graph, SemModel{ModelKind::Linear, 100, 1.0}, derive_seed(seed, 1));
    const Dataset data = generate(sem, 1000, derive_seed(seed, 2));
    config.optimal.seed = derive_seed(seed, 3);
    const LearnResult r = learn(data, config);
    if (r.trace.result.adjacency(0, 2) == 1) ++hits;
  }
  return {hits >= 80, fmt("edge X2->X0 recovered in %d/100 seeds (need 80)", hits)};
}

Outcome phase_trend() {
  const TrueGraph graph = load_graph(OTDAG_FIXTURE_DIR "/five_node.txt");
  ExperimentConfig config;
  std::vector<double> sid_skel, sid_final, ap_skel, ap_final;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SemInstance sem = build_sem(graph, SemModel{ModelKind::AbsTanhMix, 100, 1.0}, derive_seed(seed, 1));
    const Dataset data = generate(sem, 600, derive_seed(seed, 2));
    config.optimal.seed = derive_seed(seed, 3);
    const LearnResult r = learn(data, config);
    const MetricsReport skel = evaluate_phase(graph.adjacency, positive_edges(r.trace.seeded));
    const MetricsReport fin = evaluate(graph.adjacency, r.trace.result.adjacency);
    sid_skel.push_back(skel.sid);
    sid_final.push_back(fin.sid);
    ap_skel.push_back(skel.aupr);
    ap_final.push_back(fin.aupr);
  }
  const double s0 = median(sid_skel), s1 = median(sid_final);
  const double a0 = median(ap_skel), a1 = median(ap_final);
  return {s1 <= s0 && a1 >= a0, fmt("median SID %.1f -> %.1f, median AuPR %.3f -> %.3f", s0, s1, a0, a1)};
}

Outcome sid_oracle() {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const int max_e = d * (d - 1) / 2;
    const AdjMatrix truth = random_dag(d, static_cast<int>(seed % (max_e + 1)), 900 + seed).adjacency;
    const AdjMatrix est = random_dag(d, static_cast<int>((seed * 5 + 1) % (max_e + 1)), 1900 + seed).adjacency;
    if (sid(truth, est) == oracle::sid(truth, est)) ++agree;
  }
  return {agree == 100, fmt("%d/100 pairs agree", agree)};
}

Outcome fixed_points() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    AdjMatrix g = random_dag(d, std::min(d, d * (d - 1) / 2), 4000 + seed).adjacency;
    if (edge_count(g) == 0) g(1, 0) = 1;
    const bool good = sid(g, g) == 0 && shd(confusion(g, g)) == 0 && std::abs(aupr(g, g.cast<double>()) - 1.0) < 1e-12;
    if (good) ++ok;
  }
  return {ok == 50, fmt("%d/50 graphs", ok)};
}

Outcome bench_smoke() {
  ExperimentConfig config;
  config.d = {10};
  config.edges = {40};
  config.n = {100};
  config.models = benchmark_models();
  config.seed = 2021;
  config.out = workdir("bench_smoke").string();
  const RunReport report = run_benchmark(config);
  bool finite = report.repetitions.size() == benchmark_models().size();
  for (const RepetitionReport& r : report.repetitions)
    for (const MetricsReport& m : r.phases) finite = finite && std::isfinite(m.aupr) && m.sid >= 0;
  const MetricsReport& last = report.repetitions.back().phases.back();
  return {finite, fmt("%zu cells, finite metrics (last cell SID %d, AuPR %.3f)", report.repetitions.size(),
                      last.sid, last.aupr)};
}

Outcome determinism() {
  ExperimentConfig config;
  config.d = {6};
  config.edges = {7};
  config.n = {200};
  config.models = {ModelKind::MlpTanhMix};
  config.optimal.iterations = 500;
  config.seed = 77;
  const fs::path gen = workdir("det_gen");
  config.out = gen.string();
  run_gen(config);
  const std::string data = (gen / "data.csv").string();

  std::vector<std::string> mismatched;
  auto twice = [&](const std::string& tag, const std::vector<std::string>& files,
                   const std::function<void(const ExperimentConfig&)>& fn) {
    const fs::path a = workdir("det_" + tag + "_a"), b = workdir("det_" + tag + "_b");
    ExperimentConfig ca = config, cb = config;
    ca.out = a.string();
    cb.out = b.string();
    fn(ca);
    fn(cb);
    for (const auto& f : files)
      if (!fs::exists(a / f) || slurp(a / f) != slurp(b / f)) mismatched.push_back(tag + "/" + f);
  };
  twice("gen", {"graph.txt", "data.csv", "sem.json", "manifest.json"}, [](const auto& c) { run_gen(c); });
  twice("learn", {"learned.txt", "skeleton.txt", "report.json", "manifest.json"},
        [&](const auto& c) { run_learn(data, c); });
  const std::string skeleton = (fs::temp_directory_path() / "otdag_acceptance/det_learn_a/skeleton.txt").string();
  twice("tune", {"learned.txt", "manifest.json"}, [&](const auto& c) { run_tune_only(data, skeleton, c); });
  twice("hsic", {"first_order.csv", "second_order.csv", "manifest.json"}, [&](const auto& c) { run_hsic(data, c); });
  twice("bench", {"bench.csv", "report.json", "manifest.json"}, [](const auto& c) { run_benchmark(c); });

  const std::string truth = (gen / "graph.txt").string();
  const std::string est = (fs::temp_directory_path() / "otdag_acceptance/det_learn_a/learned.txt").string();
  if (metrics_to_json(run_eval(truth, est)).dump() != metrics_to_json(run_eval(truth, est)).dump())
    mismatched.push_back("eval");

  std::string detail = mismatched.empty() ? "gen, learn, tune-only, hsic, bench, eval identical" : "differs:";
  for (const auto& m : mismatched) detail += " " + m;
  return {mismatched.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "hsic matches naive expansion", 10, hsic_oracle},
      {2, "selector gradient vs finite differences", 5, gradient_check},
      {3, "tuning output acyclic", 600, acyclicity},
      {4, "first/second-order HSIC inequalities", 300, hsic_inequalities},
      {5, "4-node linear graph recovers X2->X0", 600, four_node_recovery},
      {6, "tuning improves on the skeleton", 0, phase_trend},
      {7, "sid matches path-enumeration oracle", 120, sid_oracle},
      {8, "metric fixed points", 0, fixed_points},
      {9, "d=10 s=40 n=100 benchmark cell", 900, bench_smoke},
      {10, "byte-identical reruns", 0, determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      out.pass = false;
      out.detail += fmt("; over the %.0f s budget", c.budget_seconds);
    }
    if (!out.pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
