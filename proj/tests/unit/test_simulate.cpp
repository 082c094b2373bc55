#include <doctest.h>

#include <cmath>
#include <set>

#include "iscan/errors.hpp"
#include "iscan/rng.hpp"
#include "iscan/simulate.hpp"

using namespace iscan;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("sinc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1.5) == doctest::Approx(std::sin(1.5) / 1.5));
}

TEST_CASE("noise draws are centered with the requested variance") {
  const int n = 100000;
  for (const auto family : {NoiseFamily::Gaussian, NoiseFamily::Gumbel, NoiseFamily::Laplace}) {
    const NoiseSpec spec{family, 1.7};
    auto eng = make_engine(derive_seed(11, "noise-test", static_cast<std::uint64_t>(family)));
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_noise(spec, eng);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CAPTURE(static_cast<int>(family));
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - spec.variance) < 0.05 * spec.variance);
  }
}

TEST_CASE("mechanism formulas at pinned points") {
  const auto sin_sq = MechanismSpec::sin_square(1);
  CHECK(sin_sq(vec1(0.0)) == 0.0);
  CHECK(sin_sq(vec1(1.2)) == doctest::Approx(std::sin(1.44)));

  const auto cos_m = MechanismSpec::cos_mix(1);
  CHECK(cos_m(vec1(0.0)) == 4.0);
  CHECK(cos_m(vec1(0.7)) == doctest::Approx(4 * std::cos(2 * 0.49 - 3 * 0.7)));

  Eigen::VectorXd two(2);
  two << 0.3, -0.4;
  const auto sum2 = MechanismSpec::sin_square(2);
  CHECK(sum2(two) == doctest::Approx(std::sin(0.09) + std::sin(0.16)));

  const auto c3 = MechanismSpec::c3_mix({3.0, -2.5},
                                        {UnivariateTerm::Kind::C3Sinc, UnivariateTerm::Kind::C3Cos});
  const auto inner = [](double x) { return -2 * x * x * x + 3 * x * x + 4 * x; };
  CHECK(c3(two) == doctest::Approx(3.0 * sinc(inner(0.3)) - 2.5 * std::cos(inner(-0.4))));

  CHECK_THROWS_AS(sin_sq(two), std::invalid_argument);  // arity mismatch
  CHECK_THROWS_AS(sin_sq(vec1(std::nan(""))), NonFiniteError);
}

TEST_CASE("gp_rff mechanisms are frozen functions of their seed") {
  const auto f1 = MechanismSpec::gp_rff(2, 42);
  const auto f2 = MechanismSpec::gp_rff(2, 42);
  const auto g = MechanismSpec::gp_rff(2, 43);
  Eigen::VectorXd x(2);
  x << 0.5, -1.0;
  CHECK(f1(x) == f2(x));
  CHECK(f1(x) != g(x));
  CHECK(std::isfinite(f1(x)));

  const auto doubled = MechanismSpec::scaled(MechanismSpec::gp_rff(2, 42), 2.0);
  CHECK(doubled(x) == doctest::Approx(2.0 * f1(x)));
}

TEST_CASE("mechanisms are nonlinear in each coordinate") {
  const double h = 0.25;
  for (int arity : {1, 2}) {
    std::vector<MechanismSpec> mechs{MechanismSpec::sin_square(arity),
                                     MechanismSpec::cos_mix(arity),
                                     MechanismSpec::gp_rff(arity, 5)};
    for (const auto& mech : mechs) {
      for (int c = 0; c < arity; ++c) {
        bool curved = false;
        for (int probe = 0; probe < 5 && !curved; ++probe) {
          auto eng = make_engine(derive_seed(99, "probe", static_cast<std::uint64_t>(probe), c));
          std::normal_distribution<double> dist;
          Eigen::VectorXd x(arity);
          for (int q = 0; q < arity; ++q) x(q) = dist(eng);
          Eigen::VectorXd lo = x, hi = x;
          lo(c) -= h;
          hi(c) += h;
          curved = std::abs(mech(hi) - 2 * mech(x) + mech(lo)) > 1e-6;
        }
        CHECK(curved);
      }
    }
  }
}

TEST_CASE("edgeless sampling is pure noise") {
  const EnvironmentData env =
      sample_environment(Dag(3), {}, NoiseSpec{NoiseFamily::Gaussian, 1.0}, 10000, 21);
  REQUIRE(env.values.rows() == 10000);
  REQUIRE(env.values.cols() == 3);
  CHECK(env.column_names == std::vector<std::string>{"x0", "x1", "x2"});
  for (int c = 0; c < 3; ++c) {
    const auto col = env.values.col(c);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / (col.size() - 1);
    CHECK(std::abs(mean) < 0.05);
    CHECK(var == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("gumbel sampling stays centered") {
  const EnvironmentData env =
      sample_environment(Dag(1), {}, NoiseSpec{NoiseFamily::Gumbel, 1.0}, 10000, 3);
  CHECK(std::abs(env.values.col(0).mean()) < 0.05);
}

TEST_CASE("chain with near-zero noise reproduces the mechanism") {
  Dag chain(2);
  chain.add_edge(0, 1);
  std::map<int, MechanismSpec> mechs;
  mechs.emplace(1, MechanismSpec::sin_square(1));
  const EnvironmentData env =
      sample_environment(chain, mechs, NoiseSpec{NoiseFamily::Gaussian, 1e-12}, 200, 5);
  for (int i = 0; i < 200; ++i) {
    const double x0 = env.values(i, 0);
    CHECK(std::abs(env.values(i, 1) - std::sin(x0 * x0)) < 1e-4);
  }
}

TEST_CASE("sampling is deterministic given the seed") {
  Dag chain(2);
  chain.add_edge(0, 1);
  std::map<int, MechanismSpec> mechs;
  mechs.emplace(1, MechanismSpec::cos_mix(1));
  const auto a = sample_environment(chain, mechs, {}, 50, 9);
  const auto b = sample_environment(chain, mechs, {}, 50, 9);
  const auto c = sample_environment(chain, mechs, {}, 50, 10);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("missing mechanism for a non-root is rejected") {
  Dag chain(2);
  chain.add_edge(0, 1);
  CHECK_THROWS_AS(sample_environment(chain, {}, {}, 10, 0), std::invalid_argument);
}

namespace {

ScenarioSpec five_parent_spec(ShiftKind kind) {
  Dag g(6);
  for (int i = 0; i < 5; ++i) g.add_edge(i, 5);
  ScenarioSpec spec;
  spec.base_dag = g;
  spec.shifted_fraction = 1.0 / 6.0;  // exactly one shifted node
  spec.shift_kind = kind;
  spec.samples_per_env = {50, 50};
  spec.seed = 77;
  return spec;
}

}  // namespace

TEST_CASE("inject_shifts: cardinality and non-root restriction") {
  ScenarioSpec spec;
  spec.base_dag = generate_er(10, 4.0, 123);
  spec.shifted_fraction = 0.2;
  spec.samples_per_env = {10, 10};
  const GroundTruth truth = inject_shifts(spec);
  CHECK(truth.shifted_nodes.size() == 2);
  const auto roots = spec.base_dag.roots();
  for (int j : truth.shifted_nodes)
    CHECK(std::find(roots.begin(), roots.end(), j) == roots.end());
}

TEST_CASE("inject_shifts: functional_only keeps every dag") {
  ScenarioSpec spec = five_parent_spec(ShiftKind::FunctionalOnly);
  const GroundTruth truth = inject_shifts(spec);
  REQUIRE(truth.per_env_dags.size() == 2);
  CHECK(truth.per_env_dags[0] == spec.base_dag);
  CHECK(truth.per_env_dags[1] == spec.base_dag);
  CHECK(truth.structurally_shifted_edges.empty());
  CHECK(truth.deleted_parents.empty());
}

TEST_CASE("inject_shifts: edge deletion removes exactly three of five parents") {
  const ScenarioSpec spec = five_parent_spec(ShiftKind::EdgeDeletion);
  const GroundTruth truth = inject_shifts(spec);
  REQUIRE(truth.shifted_nodes == std::vector<int>{5});
  CHECK(truth.per_env_dags[0] == spec.base_dag);
  CHECK(truth.per_env_dags[1].parents(5).size() == 2);
  REQUIRE(truth.deleted_parents.count(5) == 1);
  CHECK(truth.deleted_parents.at(5).size() == 3);
  REQUIRE(truth.structurally_shifted_edges.size() == 3);
  for (const auto& [from, to] : truth.structurally_shifted_edges) {
    CHECK(to == 5);
    CHECK(spec.base_dag.has_edge(from, to));
    CHECK_FALSE(truth.per_env_dags[1].has_edge(from, to));
  }
}

TEST_CASE("inject_shifts: too few non-roots is an error") {
  ScenarioSpec spec;
  spec.base_dag = Dag(4);  // edgeless: all roots
  spec.shifted_fraction = 0.5;
  spec.samples_per_env = {10, 10};
  CHECK_THROWS_AS(inject_shifts(spec), std::invalid_argument);
}

TEST_CASE("build_scenario: reference protocol shapes") {
  ScenarioSpec spec;
  spec.base_dag = generate_er(10, 4.0, 2024);
  spec.shifted_fraction = 0.2;
  spec.shift_kind = ShiftKind::EdgeDeletion;
  spec.samples_per_env = {500, 500};
  spec.seed = 1;
  const auto [envs, truth] = build_scenario(spec);
  REQUIRE(envs.size() == 2);
  CHECK(envs[0].values.rows() == 500);
  CHECK(envs[1].values.rows() == 500);
  CHECK(envs[0].values.cols() == 10);
  CHECK(envs[0].env_id == 0);
  CHECK(envs[1].env_id == 1);
  CHECK(truth.shifted_nodes.size() == 2);
  CHECK(envs[0].values.allFinite());
  CHECK(envs[1].values.allFinite());

  // determinism: full reproduction from the spec
  const auto [envs2, truth2] = build_scenario(spec);
  CHECK(envs2[0].values == envs[0].values);
  CHECK(envs2[1].values == envs[1].values);
  CHECK(truth2.shifted_nodes == truth.shifted_nodes);
}

TEST_CASE("build_scenario: zero shifted fraction gives a null scenario") {
  ScenarioSpec spec;
  spec.base_dag = generate_er(6, 2.0, 5);
  spec.shifted_fraction = 0.0;
  spec.samples_per_env = {100, 100};
  const auto [envs, truth] = build_scenario(spec);
  CHECK(truth.shifted_nodes.empty());
  CHECK(truth.structurally_shifted_edges.empty());
  // same mechanisms in both environments, fresh noise
  const auto m0 = assign_mechanisms(spec, truth, 0);
  const auto m1 = assign_mechanisms(spec, truth, 1);
  REQUIRE(m0.size() == m1.size());
  Eigen::VectorXd probe(1);
  for (const auto& [node, mech] : m0) {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(mech.arity(), -1.0, 1.0);
    CHECK(mech(x) == m1.at(node)(x));
  }
  CHECK(envs[0].values != envs[1].values);
}

TEST_CASE("build_scenario: gp mechanisms are shared on invariant nodes") {
  ScenarioSpec spec;
  spec.base_dag = generate_er(8, 2.0, 31);
  spec.shifted_fraction = 0.25;
  spec.shift_kind = ShiftKind::FunctionalOnly;
  spec.mechanism = BaseMechanism::GpRff;
  spec.gp_shift = GpShift::Scaled;
  spec.gp_scale_factor = 2.0;
  spec.samples_per_env = {50, 50};
  spec.seed = 4;
  const GroundTruth truth = inject_shifts(spec);
  const auto m0 = assign_mechanisms(spec, truth, 0);
  const auto m1 = assign_mechanisms(spec, truth, 1);
  const std::set<int> shifted(truth.shifted_nodes.begin(), truth.shifted_nodes.end());
  for (const auto& [node, mech] : m0) {
    for (int probe = 0; probe < 5; ++probe) {
      auto eng = make_engine(derive_seed(1, "gp-probe", static_cast<std::uint64_t>(probe),
                                         static_cast<std::uint64_t>(node)));
      std::normal_distribution<double> dist;
      Eigen::VectorXd x(mech.arity());
      for (int q = 0; q < mech.arity(); ++q) x(q) = dist(eng);
      if (shifted.contains(node)) {
        CHECK(m1.at(node)(x) == doctest::Approx(2.0 * mech(x)));
      } else {
        CHECK(m1.at(node)(x) == mech(x));  // bitwise-shared function
      }
    }
  }
}

TEST_CASE("build_scenario: gp base restricted to functional shifts") {
  ScenarioSpec spec;
  spec.base_dag = generate_er(8, 2.0, 31);
  spec.mechanism = BaseMechanism::GpRff;
  spec.shift_kind = ShiftKind::EdgeDeletion;
  spec.samples_per_env = {50, 50};
  CHECK_THROWS_AS(build_scenario(spec), std::invalid_argument);
}

TEST_CASE("scenario templates instantiate deterministically") {
  ScenarioTemplate tmpl;
  tmpl.graph = {GraphSpec::Model::Er, 10, 4.0};
  const ScenarioSpec a = instantiate(tmpl, 9);
  const ScenarioSpec b = instantiate(tmpl, 9);
  const ScenarioSpec c = instantiate(tmpl, 10);
  CHECK(a.base_dag == b.base_dag);
  CHECK(a.base_dag != c.base_dag);
  CHECK(a.seed == 9);
  CHECK(a.samples_per_env == std::vector<int>{500, 500});

  ScenarioTemplate sf;
  sf.graph = {GraphSpec::Model::Sf, 12, 3.0};
  CHECK(instantiate(sf, 0).base_dag == instantiate(sf, 0).base_dag);
}
