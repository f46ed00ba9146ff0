#include "otdag/error.hpp"
#include "otdag/experiment.hpp"
#include "otdag/io.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace otdag;
using otdag::testing::adjacency_from_edges;
using otdag::testing::dataset_from_columns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "otdag_test_experiment" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("settings and config files") {
  ExperimentConfig c;
  apply_setting(c, "d", "5, 10");
  apply_setting(c, "model", "abs,mlp-tanh-mix");
  apply_setting(c, "temp", "0.5");
  apply_setting(c, "top_k", "3");
  CHECK(c.d == std::vector<int>{5, 10});
  CHECK(c.models == std::vector<ModelKind>{ModelKind::Abs, ModelKind::MlpTanhMix});
  CHECK(c.optimal.temperature == 0.5);
  CHECK(c.optimal.final_temperature == 0.5);
  CHECK(c.top_k == 3);
  CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "n", "ten"), InvalidInput);

  const fs::path dir = scratch("config");
  std::ofstream(dir / "good.cfg") << "# grid\nd = 4\nedges = 3  # sparse\n\nreps=2\n";
  std::ofstream(dir / "bad.cfg") << "d = 4\nlambda = x\n";
  ExperimentConfig f;
  load_config_file(f, (dir / "good.cfg").string());
  CHECK(f.d == std::vector<int>{4});
  CHECK(f.edges == std::vector<int>{3});
  CHECK(f.reps == 2);
  try {
    load_config_file(f, (dir / "bad.cfg").string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("gen then learn is deterministic") {
  ExperimentConfig c;
  c.d = {5};
  c.edges = {5};
  c.n = {120};
  c.models = {ModelKind::AbsTanhMix};
  c.optimal.iterations = 300;
  c.seed = 17;
  const fs::path gen = scratch("gen");
  c.out = gen.string();
  run_gen(c);
  for (const char* f : {"graph.txt", "data.csv", "sem.json", "manifest.json"}) CHECK(fs::exists(gen / f));

  const fs::path a = scratch("learn_a"), b = scratch("learn_b");
  c.out = a.string();
  run_learn((gen / "data.csv").string(), c);
  c.out = b.string();
  run_learn((gen / "data.csv").string(), c);
  for (const char* f : {"learned.txt", "skeleton.txt", "report.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(is_acyclic(load_edge_list((a / "learned.txt").string())));
}

TEST_CASE("strongly dependent pair yields one edge") {
  ExperimentConfig c;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed + 500);
    const auto x = otdag::testing::normal_vector(rng, 500);
    auto y = otdag::testing::normal_vector(rng, 500, 0.05);
    for (std::size_t r = 0; r < y.size(); ++r) y[r] += x[r];
    c.optimal.seed = seed;
    const LearnResult res = learn(dataset_from_columns({x, y}), c);
    if (edge_count(res.trace.result.adjacency) == 1) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("constant columns give an empty graph") {
  const std::vector<double> k(50, 2.5);
  const LearnResult res = learn(dataset_from_columns({k, k, k}), ExperimentConfig{});
  CHECK(edge_count(res.trace.result.adjacency) == 0);
}

TEST_CASE("benchmark csv is reproducible and lists every phase") {
  ExperimentConfig c;
  c.d = {5};
  c.edges = {7};
  c.n = {150};
  c.models = {ModelKind::AbsTanhMix};
  c.optimal.iterations = 300;
  c.seed = 4;
  const fs::path a = scratch("bench_a"), b = scratch("bench_b");
  c.out = a.string();
  const RunReport report = run_benchmark(c);
  c.out = b.string();
  run_benchmark(c);
  CHECK(slurp(a / "bench.csv") == slurp(b / "bench.csv"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));

  const std::string csv = slurp(a / "bench.csv");
  CHECK(csv.rfind("d,edges,n,model,phase,statistic,sid,aupr,shd,estimated_edges\n", 0) == 0);
  for (const auto& phase : phase_names()) CHECK(csv.find(",abs-tanh-mix," + phase + ",median,") != std::string::npos);
  REQUIRE(report.repetitions.size() == 1);
  CHECK(report.repetitions[0].phases.size() == 4);
}

TEST_CASE("smoke cell d=10 s=40 n=100 sigmoid-mix") {
  ExperimentConfig c;
  c.models = {ModelKind::SigmoidMix};
  c.seed = 9;
  const RepetitionReport r = run_repetition(c, 10, 40, 100, ModelKind::SigmoidMix, 0);
  CHECK(edge_count(r.truth) > 0);
  CHECK(is_acyclic(r.learned));
  for (const MetricsReport& m : r.phases) {
    CHECK(std::isfinite(m.aupr));
    CHECK(m.sid >= 0);
  }
}

TEST_CASE("eval on edge-list files") {
  const fs::path dir = scratch("eval");
  const std::string four = OTDAG_FIXTURE_DIR "/four_node.txt";
  const MetricsReport same = run_eval(four, four);
  CHECK(same.sid == 0);
  CHECK(same.shd == 0);
  CHECK(same.aupr == doctest::Approx(1.0));

  std::ofstream(dir / "missing.txt") << "1 3\n2 3\n3 0\n";
  const MetricsReport missing = run_eval(four, (dir / "missing.txt").string());
  CHECK(missing.counts.false_negatives == 1);
  CHECK(missing.shd == 1);

  std::ofstream(dir / "fwd.txt") << "0 1\n";
  std::ofstream(dir / "rev.txt") << "1 0\n";
  CHECK(run_eval((dir / "fwd.txt").string(), (dir / "rev.txt").string()).sid == 2);

  std::ofstream(dir / "big.txt") << "0 4\n";
  CHECK_THROWS(run_eval((dir / "fwd.txt").string(), (dir / "big.txt").string()));
}

}  // TEST_SUITE
