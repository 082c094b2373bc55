#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "iscan/eval.hpp"

using namespace iscan;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("set metrics") {
  const auto m = set_metrics({1, 2, 3}, {2, 3, 4});
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));

  const auto perfect = set_metrics({0, 5}, {0, 5});
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const std::vector<int> none;
  const auto both_empty = set_metrics(none, none);
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.f1 == 1.0);

  const auto missed = set_metrics(none, {3});
  CHECK(missed.precision == 1.0);
  CHECK(missed.recall == 0.0);
  CHECK(missed.f1 == 0.0);

  const auto spurious = set_metrics({3}, none);
  CHECK(spurious.precision == 0.0);
  CHECK(spurious.recall == 1.0);
  CHECK(spurious.f1 == 0.0);

  const auto disjoint = set_metrics(std::vector<int>{0}, std::vector<int>{1});
  CHECK(disjoint.precision == 0.0);
  CHECK(disjoint.recall == 0.0);
  CHECK(disjoint.f1 == 0.0);

  const auto edges = set_metrics(std::vector<std::pair<int, int>>{{0, 1}, {1, 2}},
                                 std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
  CHECK(edges.precision == doctest::Approx(0.5));
  CHECK(edges.recall == doctest::Approx(0.5));
  CHECK(edges.f1 == doctest::Approx(0.5));
}

TEST_CASE("top k precision") {
  const Eigen::VectorXd stats = vec({0.5, 9.0, 3.0});
  CHECK(top_k_precision(stats, {1}, 1) == doctest::Approx(1.0));
  CHECK(top_k_precision(stats, {1}, 2) == doctest::Approx(0.5));
  CHECK(top_k_precision(stats, {1}, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(top_k_precision(stats, {0, 2}, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(top_k_precision(stats, {1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_k_precision(stats, {1}, 4), std::invalid_argument);
}

TEST_CASE("benchmark grid bookkeeping") {
  BenchCell cell;
  cell.name = "smoke";
  cell.scenario.graph.d = 4;
  cell.scenario.graph.k = 2.0;
  cell.scenario.samples_per_env = {60, 60};

  BenchCell broken = cell;
  broken.name = "too-small";
  broken.scenario.samples_per_env = {2, 2};  // below the detector's minimum

  const auto results = run_benchmark({cell, broken}, 3, 42, 1);
  REQUIRE(results.size() == 2);

  const auto& ok = results[0];
  CHECK(ok.cell.name == "smoke");
  REQUIRE(ok.records.size() == 3);
  for (const auto& rec : ok.records) {
    CHECK_FALSE(rec.failed);
    CHECK(rec.error.empty());
    CHECK(rec.node.f1 >= 0.0);
    CHECK(rec.node.f1 <= 1.0);
    CHECK(rec.seconds > 0.0);
  }
  CHECK(ok.node_f1.count == 3);
  CHECK(ok.seconds.count == 3);
  CHECK(ok.edge_f1.count == 0);  // run_diff off
  CHECK(ok.node_f1.mean >= 0.0);
  CHECK(ok.node_f1.se >= 0.0);

  const auto& bad = results[1];
  REQUIRE(bad.records.size() == 3);
  for (const auto& rec : bad.records) {
    CHECK(rec.failed);
    CHECK_FALSE(rec.error.empty());
  }
  CHECK(bad.node_f1.count == 0);
  CHECK(bad.node_f1.mean == 0.0);

  // seeds pair across cells so cells are compared on the same draws
  for (int s = 0; s < 3; ++s) CHECK(ok.records[s].seed == bad.records[s].seed);

  CHECK_THROWS_AS(run_benchmark({}, 3), std::invalid_argument);
  CHECK_THROWS_AS(run_benchmark({cell}, 0), std::invalid_argument);
}

TEST_CASE("benchmark metrics ignore the thread count") {
  BenchCell cell;
  cell.name = "par";
  cell.scenario.graph.d = 4;
  cell.scenario.graph.k = 2.0;
  cell.scenario.samples_per_env = {50, 50};
  cell.scenario.shift_kind = ShiftKind::EdgeDeletion;
  cell.run_diff = true;
  cell.foci_cutoff = 0.05;

  const auto one = run_benchmark({cell}, 2, 7, 1);
  const auto four = run_benchmark({cell}, 2, 7, 4);
  REQUIRE(one.size() == 1);
  REQUIRE(four.size() == 1);
  CHECK(one[0].edge_f1.count == four[0].edge_f1.count);
  for (int s = 0; s < 2; ++s) {
    const auto& a = one[0].records[s];
    const auto& b = four[0].records[s];
    CHECK(a.seed == b.seed);
    CHECK(a.failed == b.failed);
    CHECK(a.node.precision == b.node.precision);
    CHECK(a.node.recall == b.node.recall);
    CHECK(a.node.f1 == b.node.f1);
    CHECK(a.edge.f1 == b.edge.f1);
  }
  CHECK(one[0].node_f1.mean == four[0].node_f1.mean);
  CHECK(one[0].node_f1.se == four[0].node_f1.se);
}
