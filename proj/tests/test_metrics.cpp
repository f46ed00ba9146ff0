#include "oracles/sid_oracle.hpp"
#include "otdag/error.hpp"
#include "otdag/metrics.hpp"
#include "otdag/synthdata.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace otdag;
using otdag::testing::adjacency_from_edges;

TEST_SUITE("metrics") {

TEST_CASE("confusion counts and shd") {
  const AdjMatrix truth = adjacency_from_edges(4, {{0, 1}, {1, 2}, {0, 3}});
  const ConfusionCounts same = confusion(truth, truth);
  CHECK(same.true_positives == 3);
  CHECK(same.false_positives == 0);
  CHECK(same.false_negatives == 0);
  CHECK(shd(same) == 0);

  const ConfusionCounts empty = confusion(truth, AdjMatrix::Zero(4, 4));
  CHECK(empty.true_positives == 0);
  CHECK(empty.false_positives == 0);
  CHECK(empty.false_negatives == 3);

  const ConfusionCounts rev = confusion(adjacency_from_edges(2, {{0, 1}}), adjacency_from_edges(2, {{1, 0}}));
  CHECK(rev.true_positives == 0);
  CHECK(rev.false_positives == 1);
  CHECK(rev.false_negatives == 1);
  CHECK(shd(rev) == 2);

  const TrueGraph g = random_dag(6, 7, 1);
  CHECK(shd(confusion(g.adjacency, AdjMatrix::Zero(6, 6))) == edge_count(g.adjacency));

  CHECK_THROWS_AS(confusion(truth, AdjMatrix::Zero(3, 3)), InvalidInput);
}

TEST_CASE("sid hand examples") {
  const AdjMatrix fwd = adjacency_from_edges(2, {{0, 1}});
  const AdjMatrix rev = adjacency_from_edges(2, {{1, 0}});
  CHECK(sid(fwd, fwd) == 0);
  CHECK(sid(fwd, rev) == 2);
  CHECK(oracle::sid(fwd, rev) == 2);
  // Empty estimate: do(X1) is predicted to shift X0 through the unadjusted edge.
  CHECK(sid(fwd, AdjMatrix::Zero(2, 2)) == 1);
  CHECK_THROWS_AS(sid(fwd, adjacency_from_edges(2, {{0, 1}, {1, 0}})), InvalidInput);
}

TEST_CASE("sid on a confounded triangle") {
  // 0 -> 1, 0 -> 2, 1 -> 2. Dropping 0 -> 2 leaves only (2, 0) wrong.
  // Dropping 0 -> 1 leaves PA(1) empty, so (1, 0) and (1, 2) are wrong.
  const AdjMatrix truth = adjacency_from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  const AdjMatrix no02 = adjacency_from_edges(3, {{0, 1}, {1, 2}});
  const AdjMatrix no01 = adjacency_from_edges(3, {{0, 2}, {1, 2}});
  CHECK(sid(truth, no02) == 1);
  CHECK(sid(truth, no01) == 2);
  CHECK(oracle::sid(truth, no02) == 1);
  CHECK(oracle::sid(truth, no01) == 2);
}

TEST_CASE("valid adjustment allows descendants of x off the causal paths") {
  // 0 -> 1 and 0 -> 2; adjusting for 2 when estimating 0 -> 1 is fine.
  const AdjMatrix g = adjacency_from_edges(3, {{0, 1}, {0, 2}});
  CHECK(valid_adjustment(g, 0, 1, {false, false, true}));
  // A mediator is forbidden.
  const AdjMatrix chain = adjacency_from_edges(3, {{0, 1}, {1, 2}});
  CHECK_FALSE(valid_adjustment(chain, 0, 2, {false, true, false}));
  // Conditioning on a collider opens the path.
  const AdjMatrix coll = adjacency_from_edges(3, {{0, 2}, {1, 2}});
  CHECK(valid_adjustment(coll, 0, 1, {false, false, false}));
  CHECK_FALSE(valid_adjustment(coll, 0, 1, {false, false, true}));
}

TEST_CASE("d-separation basics") {
  const AdjMatrix chain = adjacency_from_edges(3, {{0, 1}, {1, 2}});
  CHECK_FALSE(d_separated(chain, 0, 2, {false, false, false}));
  CHECK(d_separated(chain, 0, 2, {false, true, false}));
  const AdjMatrix coll = adjacency_from_edges(4, {{0, 2}, {1, 2}, {2, 3}});
  CHECK(d_separated(coll, 0, 1, {false, false, false, false}));
  CHECK_FALSE(d_separated(coll, 0, 1, {false, false, false, true}));
}

TEST_CASE("sid agrees with the path-enumeration oracle") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const int max_e = d * (d - 1) / 2;
    const AdjMatrix truth = random_dag(d, static_cast<int>(seed % (max_e + 1)), seed).adjacency;
    const AdjMatrix est = random_dag(d, static_cast<int>((seed * 7) % (max_e + 1)), seed + 1000).adjacency;
    CHECK(sid(truth, est) == oracle::sid(truth, est));
  }
}

TEST_CASE("sid on cyclic estimates follows the same parent rule") {
  const AdjMatrix truth = adjacency_from_edges(3, {{0, 1}, {1, 2}});
  const AdjMatrix cyclic = adjacency_from_edges(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  CHECK(sid_parent_adjustment(truth, cyclic) == oracle::sid(truth, cyclic));
  CHECK_THROWS_AS(sid_parent_adjustment(cyclic, truth), InvalidInput);
}

TEST_CASE("aupr examples") {
  const AdjMatrix truth = adjacency_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(aupr(truth, truth.cast<double>()) == doctest::Approx(1.0));
  CHECK(aupr(truth, Eigen::MatrixXd::Zero(4, 4)) == doctest::Approx(0.25));

  // Two right, one wrong: P1 = R1 = 2/3.
  const AdjMatrix est = adjacency_from_edges(4, {{0, 1}, {1, 2}, {3, 0}});
  CHECK(aupr(truth, est.cast<double>()) == doctest::Approx(2.0 / 3 * 2.0 / 3 + 1.0 / 3 * 0.25));
  CHECK(aupr(truth, est.cast<double>()) == doctest::Approx(0.527777777777).epsilon(1e-9));

  // Graded scores: positives ranked first, second, fourth.
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(4, 4);
  scores(1, 0) = 0.9;
  scores(2, 1) = 0.8;
  scores(0, 3) = 0.7;
  scores(3, 2) = 0.6;
  CHECK(aupr(truth, scores) == doctest::Approx((1.0 + 1.0 + 3.0 / 4.0) / 3.0));

  CHECK(aupr(AdjMatrix::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)) == 1.0);
  CHECK(aupr(AdjMatrix::Zero(3, 3), adjacency_from_edges(3, {{0, 1}}).cast<double>()) == 0.0);
}

TEST_CASE("fixed points and ranges on random graphs") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const int e = 1 + static_cast<int>(seed % (d * (d - 1) / 2));
    const AdjMatrix g = random_dag(d, e, seed).adjacency;
    const AdjMatrix other = random_dag(d, e, seed + 99).adjacency;
    CHECK(sid(g, g) == 0);
    CHECK(shd(confusion(g, g)) == 0);
    if (edge_count(g) > 0) CHECK(aupr(g, g.cast<double>()) == doctest::Approx(1.0));
    const MetricsReport r = evaluate(g, other);
    CHECK(r.sid <= d * (d - 1));
    CHECK(r.aupr >= 0.0);
    CHECK(r.aupr <= 1.0);
    CHECK(r.counts.true_positives + r.counts.false_negatives == edge_count(g));
  }
}

}  // TEST_SUITE
