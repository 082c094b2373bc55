#include "iscan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "iscan/errors.hpp"

namespace iscan {

namespace {
constexpr double kEulerMascheroni = 0.57721566490153286;
}

double sample_noise(const NoiseSpec& spec, RngEngine& eng) {
  if (!(spec.variance > 0) || !std::isfinite(spec.variance))
    throw std::invalid_argument("sample_noise: variance must be positive and finite");
  switch (spec.family) {
    case NoiseFamily::Gaussian: {
      std::normal_distribution<double> dist(0.0, std::sqrt(spec.variance));
      return dist(eng);
    }
    case NoiseFamily::Gumbel: {
      // variance = pi^2 b^2 / 6, mean = a + b*gamma; center by shifting a.
      const double b = std::sqrt(6.0 * spec.variance) / std::numbers::pi;
      std::extreme_value_distribution<double> dist(-b * kEulerMascheroni, b);
      return dist(eng);
    }
    case NoiseFamily::Laplace: {
      // variance = 2 b^2; inverse-CDF sampling.
      const double b = std::sqrt(spec.variance / 2.0);
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      const double u = unif(eng);
      return u < 0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
    }
  }
  throw std::invalid_argument("sample_noise: unknown noise family");
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

namespace {

double eval_term(const UnivariateTerm& t, double x) {
  switch (t.kind) {
    case UnivariateTerm::Kind::SinSquare:
      return std::sin(x * x);
    case UnivariateTerm::Kind::CosMix:
      return 4.0 * std::cos(2.0 * x * x - 3.0 * x);
    case UnivariateTerm::Kind::C3Sinc:
      return t.c3_coeff * sinc(-2.0 * x * x * x + 3.0 * x * x + 4.0 * x);
    case UnivariateTerm::Kind::C3Cos:
      return t.c3_coeff * std::cos(-2.0 * x * x * x + 3.0 * x * x + 4.0 * x);
  }
  throw std::invalid_argument("eval_term: unknown term kind");
}

}  // namespace

MechanismSpec MechanismSpec::sin_square(int arity) {
  if (arity < 1) throw std::invalid_argument("sin_square: arity must be >= 1");
  MechanismSpec m = additive(
      std::vector<UnivariateTerm>(arity, UnivariateTerm{UnivariateTerm::Kind::SinSquare, 1.0}));
  m.kind_ = MechanismKind::SinSquare;
  return m;
}

MechanismSpec MechanismSpec::cos_mix(int arity) {
  if (arity < 1) throw std::invalid_argument("cos_mix: arity must be >= 1");
  MechanismSpec m = additive(
      std::vector<UnivariateTerm>(arity, UnivariateTerm{UnivariateTerm::Kind::CosMix, 1.0}));
  m.kind_ = MechanismKind::CosMix;
  return m;
}

MechanismSpec MechanismSpec::c3_mix(const std::vector<double>& coeffs,
                                    const std::vector<UnivariateTerm::Kind>& inners) {
  if (coeffs.empty() || coeffs.size() != inners.size())
    throw std::invalid_argument("c3_mix: coeffs/inners must be non-empty and equal length");
  std::vector<UnivariateTerm> terms;
  terms.reserve(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (inners[i] != UnivariateTerm::Kind::C3Sinc && inners[i] != UnivariateTerm::Kind::C3Cos)
      throw std::invalid_argument("c3_mix: inner must be c3 sinc or c3 cos");
    terms.push_back(UnivariateTerm{inners[i], coeffs[i]});
  }
  MechanismSpec m = additive(std::move(terms));
  m.kind_ = MechanismKind::C3Mix;
  return m;
}

MechanismSpec MechanismSpec::gp_rff(int arity, std::uint64_t function_seed, int num_features,
                                    double bandwidth) {
  if (arity < 1) throw std::invalid_argument("gp_rff: arity must be >= 1");
  if (num_features < 1) throw std::invalid_argument("gp_rff: num_features must be >= 1");
  if (!(bandwidth > 0)) throw std::invalid_argument("gp_rff: bandwidth must be > 0");
  MechanismSpec m;
  m.kind_ = MechanismKind::GpRff;
  m.gp_arity_ = arity;
  m.omega_.resize(num_features, arity);
  m.phase_.resize(num_features);
  m.amp_.resize(num_features);
  auto eng = make_engine(derive_seed(function_seed, "gp-rff"));
  std::normal_distribution<double> freq(0.0, 1.0 / bandwidth);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> coef(0.0, 1.0);
  for (int f = 0; f < num_features; ++f) {
    for (int a = 0; a < arity; ++a) m.omega_(f, a) = freq(eng);
    m.phase_(f) = unif(eng);
    m.amp_(f) = coef(eng);
  }
  return m;
}

MechanismSpec MechanismSpec::scaled(MechanismSpec base, double factor) {
  if (!std::isfinite(factor)) throw std::invalid_argument("scaled: factor must be finite");
  MechanismSpec m;
  m.kind_ = MechanismKind::Scaled;
  m.factor_ = factor;
  m.base_ = std::make_shared<const MechanismSpec>(std::move(base));
  return m;
}

MechanismSpec MechanismSpec::additive(std::vector<UnivariateTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("additive: needs at least one term");
  MechanismSpec m;
  m.kind_ = MechanismKind::Additive;
  m.terms_ = std::move(terms);
  return m;
}

int MechanismSpec::arity() const {
  switch (kind_) {
    case MechanismKind::GpRff:
      return gp_arity_;
    case MechanismKind::Scaled:
      return base_->arity();
    default:
      return static_cast<int>(terms_.size());
  }
}

const MechanismSpec& MechanismSpec::base() const {
  if (kind_ != MechanismKind::Scaled)
    throw std::invalid_argument("MechanismSpec::base: only scaled mechanisms have a base");
  return *base_;
}

double MechanismSpec::operator()(const Eigen::VectorXd& parent_values) const {
  if (parent_values.size() != arity())
    throw std::invalid_argument("eval_mechanism: arity mismatch, expected " +
                                std::to_string(arity()) + " parent values, got " +
                                std::to_string(parent_values.size()));
  if (!parent_values.allFinite())
    throw NonFiniteError("eval_mechanism: non-finite parent value");
  switch (kind_) {
    case MechanismKind::GpRff: {
      const Eigen::VectorXd arg = omega_ * parent_values + phase_;
      return std::sqrt(2.0 / omega_.rows()) * amp_.dot(arg.array().cos().matrix());
    }
    case MechanismKind::Scaled:
      return factor_ * (*base_)(parent_values);
    default: {
      double out = 0.0;
      for (std::size_t i = 0; i < terms_.size(); ++i)
        out += eval_term(terms_[i], parent_values(static_cast<Eigen::Index>(i)));
      return out;
    }
  }
}

double eval_mechanism(const MechanismSpec& mech, const Eigen::VectorXd& parent_values) {
  return mech(parent_values);
}

EnvironmentData sample_environment(const Dag& g, const std::map<int, MechanismSpec>& mechanisms,
                                   const NoiseSpec& noise, int num_samples, std::uint64_t seed,
                                   int env_id) {
  if (num_samples < 1) throw std::invalid_argument("sample_environment: num_samples must be >= 1");
  const int d = g.num_nodes();
  for (int j = 0; j < d; ++j) {
    if (g.parents(j).empty()) continue;
    auto it = mechanisms.find(j);
    if (it == mechanisms.end())
      throw std::invalid_argument("sample_environment: missing mechanism for node " +
                                  std::to_string(j));
    if (it->second.arity() != static_cast<int>(g.parents(j).size()))
      throw std::invalid_argument("sample_environment: mechanism arity mismatch at node " +
                                  std::to_string(j));
  }

  EnvironmentData env;
  env.env_id = env_id;
  env.values.resize(num_samples, d);
  env.column_names.reserve(d);
  for (int j = 0; j < d; ++j) env.column_names.push_back("x" + std::to_string(j));

  // Per-node noise streams; results do not depend on traversal order.
  Eigen::MatrixXd noise_draws(num_samples, d);
  for (int j = 0; j < d; ++j) {
    auto eng = make_engine(derive_seed(seed, "noise", static_cast<std::uint64_t>(j)));
    for (int r = 0; r < num_samples; ++r) noise_draws(r, j) = sample_noise(noise, eng);
  }

  const TopologicalOrder topo = topological_sort(g);
  Eigen::VectorXd pa_vals;
  for (int j : topo.order) {
    const auto& pa = g.parents(j);
    if (pa.empty()) {
      env.values.col(j) = noise_draws.col(j);
      continue;
    }
    const MechanismSpec& mech = mechanisms.at(j);
    pa_vals.resize(static_cast<Eigen::Index>(pa.size()));
    for (int r = 0; r < num_samples; ++r) {
      for (std::size_t c = 0; c < pa.size(); ++c)
        pa_vals(static_cast<Eigen::Index>(c)) = env.values(r, pa[c]);
      env.values(r, j) = mech(pa_vals) + noise_draws(r, j);
    }
    if (!env.values.col(j).allFinite())
      throw NonFiniteError("sample_environment: non-finite value produced at node " +
                           std::to_string(j));
  }
  return env;
}

GroundTruth inject_shifts(const ScenarioSpec& spec) {
  const int d = spec.base_dag.num_nodes();
  if (spec.num_envs < 2) throw std::invalid_argument("inject_shifts: need at least 2 environments");
  if (spec.shifted_fraction < 0 || spec.shifted_fraction > 1)
    throw std::invalid_argument("inject_shifts: shifted_fraction must lie in [0,1]");

  GroundTruth truth;
  const int want = static_cast<int>(std::ceil(spec.shifted_fraction * d));
  if (want > 0) {
    std::vector<int> non_roots;
    for (int j = 0; j < d; ++j)
      if (!spec.base_dag.parents(j).empty()) non_roots.push_back(j);
    if (want > static_cast<int>(non_roots.size()))
      throw std::invalid_argument("inject_shifts: graph has only " +
                                  std::to_string(non_roots.size()) +
                                  " non-root nodes, cannot shift " + std::to_string(want));
    auto eng = make_engine(derive_seed(spec.seed, "shift-selection"));
    std::vector<int> pool = non_roots;
    for (int c = 0; c < want; ++c) {
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const std::size_t idx = pick(eng);
      truth.shifted_nodes.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    std::sort(truth.shifted_nodes.begin(), truth.shifted_nodes.end());
  }

  Dag altered = spec.base_dag;
  if (spec.shift_kind != ShiftKind::FunctionalOnly) {
    for (int j : truth.shifted_nodes) {
      const std::vector<int> pa = spec.base_dag.parents(j);
      const int del = std::min<int>(3, static_cast<int>(pa.size()));
      auto eng = make_engine(derive_seed(spec.seed, "edge-deletion", static_cast<std::uint64_t>(j)));
      std::vector<int> pool = pa;
      std::vector<int> deleted;
      for (int c = 0; c < del; ++c) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const std::size_t idx = pick(eng);
        deleted.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
      }
      std::sort(deleted.begin(), deleted.end());
      truth.deleted_parents[j] = deleted;
      for (int i : deleted) {
        altered.remove_edge(i, j);
        truth.structurally_shifted_edges.emplace_back(i, j);
      }
    }
    std::sort(truth.structurally_shifted_edges.begin(), truth.structurally_shifted_edges.end());
  }

  truth.per_env_dags.push_back(spec.base_dag);
  for (int e = 1; e < spec.num_envs; ++e) truth.per_env_dags.push_back(altered);
  return truth;
}

// Mechanism table for one environment of the cited protocols.
std::map<int, MechanismSpec> assign_mechanisms(const ScenarioSpec& spec, const GroundTruth& truth,
                                               int env) {
  const Dag& dag = truth.per_env_dags[static_cast<std::size_t>(env)];
  const int d = dag.num_nodes();
  const bool reference_env = (env == 0);
  auto is_shifted = [&](int j) {
    return std::binary_search(truth.shifted_nodes.begin(), truth.shifted_nodes.end(), j);
  };

  std::map<int, MechanismSpec> out;
  for (int j = 0; j < d; ++j) {
    const auto& pa = dag.parents(j);
    if (pa.empty()) continue;
    const int arity = static_cast<int>(pa.size());

    if (spec.mechanism == BaseMechanism::GpRff) {
      // Invariant nodes share one function draw; shifted nodes either draw a
      // fresh function per environment or scale the shared draw.
      std::uint64_t fseed = derive_seed(spec.seed, "gp-function", static_cast<std::uint64_t>(j), 0);
      if (is_shifted(j) && spec.gp_shift == GpShift::Independent)
        fseed = derive_seed(spec.seed, "gp-function", static_cast<std::uint64_t>(j),
                            static_cast<std::uint64_t>(env) + 1);
      MechanismSpec mech = MechanismSpec::gp_rff(arity, fseed);
      if (is_shifted(j) && spec.gp_shift == GpShift::Scaled && !reference_env)
        mech = MechanismSpec::scaled(std::move(mech), spec.gp_scale_factor);
      out.emplace(j, std::move(mech));
      continue;
    }

    switch (spec.shift_kind) {
      case ShiftKind::FunctionalOnly:
        // Reference env: sin_square everywhere. Later envs swap in cos_mix on
        // shifted nodes; the DAG is unchanged.
        if (!reference_env && is_shifted(j))
          out.emplace(j, MechanismSpec::cos_mix(arity));
        else
          out.emplace(j, MechanismSpec::sin_square(arity));
        break;
      case ShiftKind::EdgeDeletion:
      case ShiftKind::MixedC3: {
        // Reference env keeps the full DAG; edges about to disappear carry a
        // distinct term (cos_mix or a random c3 mix). Later envs are plain
        // sin_square on the reduced parent sets.
        if (!reference_env || !is_shifted(j)) {
          out.emplace(j, MechanismSpec::sin_square(arity));
          break;
        }
        const auto& deleted = truth.deleted_parents.at(j);
        std::vector<UnivariateTerm> terms;
        terms.reserve(pa.size());
        for (int i : pa) {
          const bool on_deleted_edge = std::binary_search(deleted.begin(), deleted.end(), i);
          if (!on_deleted_edge) {
            terms.push_back(UnivariateTerm{UnivariateTerm::Kind::SinSquare, 1.0});
          } else if (spec.shift_kind == ShiftKind::EdgeDeletion) {
            terms.push_back(UnivariateTerm{UnivariateTerm::Kind::CosMix, 1.0});
          } else {
            auto eng = make_engine(derive_seed(spec.seed, "c3-edge", static_cast<std::uint64_t>(i),
                                               static_cast<std::uint64_t>(j)));
            std::uniform_real_distribution<double> mag(2.0, 5.0);
            std::uniform_int_distribution<int> coin(0, 1);
            const double c = (coin(eng) ? 1.0 : -1.0) * mag(eng);
            const auto inner =
                coin(eng) ? UnivariateTerm::Kind::C3Sinc : UnivariateTerm::Kind::C3Cos;
            terms.push_back(UnivariateTerm{inner, c});
          }
        }
        out.emplace(j, MechanismSpec::additive(std::move(terms)));
        break;
      }
    }
  }
  return out;
}

std::pair<std::vector<EnvironmentData>, GroundTruth> build_scenario(const ScenarioSpec& spec) {
  if (spec.num_envs < 2) throw std::invalid_argument("build_scenario: need at least 2 environments");
  if (static_cast<int>(spec.samples_per_env.size()) != spec.num_envs)
    throw std::invalid_argument("build_scenario: samples_per_env must have one entry per env");
  if (spec.mechanism == BaseMechanism::GpRff && spec.shift_kind != ShiftKind::FunctionalOnly)
    throw std::invalid_argument(
        "build_scenario: gp_rff mechanisms support functional_only shifts");

  const GroundTruth truth = inject_shifts(spec);
  std::vector<EnvironmentData> envs;
  envs.reserve(static_cast<std::size_t>(spec.num_envs));
  for (int e = 0; e < spec.num_envs; ++e) {
    const auto mechanisms = assign_mechanisms(spec, truth, e);
    envs.push_back(sample_environment(truth.per_env_dags[static_cast<std::size_t>(e)], mechanisms,
                                      spec.noise, spec.samples_per_env[static_cast<std::size_t>(e)],
                                      derive_seed(spec.seed, "env", static_cast<std::uint64_t>(e)),
                                      e));
  }
  return {std::move(envs), truth};
}

Dag make_graph(const GraphSpec& gspec, std::uint64_t seed) {
  switch (gspec.model) {
    case GraphSpec::Model::Er:
      return generate_er(gspec.d, gspec.k, seed);
    case GraphSpec::Model::Sf:
      return generate_sf(gspec.d, static_cast<int>(gspec.k), seed);
  }
  throw std::invalid_argument("make_graph: unknown graph model");
}

ScenarioSpec instantiate(const ScenarioTemplate& tmpl, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.base_dag = make_graph(tmpl.graph, derive_seed(seed, "graph"));
  spec.num_envs = tmpl.num_envs;
  spec.shifted_fraction = tmpl.shifted_fraction;
  spec.shift_kind = tmpl.shift_kind;
  spec.mechanism = tmpl.mechanism;
  spec.gp_shift = tmpl.gp_shift;
  spec.gp_scale_factor = tmpl.gp_scale_factor;
  spec.samples_per_env = tmpl.samples_per_env;
  spec.noise = tmpl.noise;
  spec.seed = seed;
  return spec;
}

}  // namespace iscan
