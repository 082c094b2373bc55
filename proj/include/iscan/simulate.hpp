#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "iscan/graph.hpp"
#include "iscan/rng.hpp"

namespace iscan {

enum class NoiseFamily { Gaussian, Gumbel, Laplace };

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Gaussian;
  double variance = 1.0;
};

// One draw, centered at zero with the requested variance regardless of family.
double sample_noise(const NoiseSpec& spec, RngEngine& eng);

// sin(x)/x extended continuously with sinc(0) = 1.
double sinc(double x);

enum class MechanismKind { SinSquare, CosMix, C3Mix, GpRff, Scaled, Additive };

// Per-parent term of an additive mechanism: f(x), one of
//   sin_square: sin(x^2)
//   cos_mix:    4*cos(2x^2 - 3x)
//   c3:         c * inner(-2x^3 + 3x^2 + 4x), inner in {sinc, cos}
struct UnivariateTerm {
  enum class Kind { SinSquare, CosMix, C3Sinc, C3Cos } kind = Kind::SinSquare;
  double c3_coeff = 1.0;
};

// A fixed function R^arity -> R assigned to one node in one environment.
// Construction freezes all randomness (random-feature draws, c3 coefficients),
// so evaluation is deterministic and shareable across environments.
class MechanismSpec {
 public:
  static MechanismSpec sin_square(int arity);
  static MechanismSpec cos_mix(int arity);
  // One (coefficient, inner) pair per parent, ascending parent order.
  static MechanismSpec c3_mix(const std::vector<double>& coeffs,
                              const std::vector<UnivariateTerm::Kind>& inners);
  // Random-feature expansion of a squared-exponential GP draw:
  //   f(x) = sqrt(2/F) * sum_f a_f cos(w_f . x + b_f),
  // w_f ~ N(0, I/bandwidth^2), b_f ~ U[0,2pi), a_f ~ N(0,1), all frozen from
  // function_seed, so equal seeds give bitwise-equal functions.
  static MechanismSpec gp_rff(int arity, std::uint64_t function_seed, int num_features = 128,
                              double bandwidth = 0.5);
  static MechanismSpec scaled(MechanismSpec base, double factor);
  static MechanismSpec additive(std::vector<UnivariateTerm> terms);

  MechanismKind kind() const { return kind_; }
  int arity() const;
  double scale_factor() const { return factor_; }
  const MechanismSpec& base() const;

  // parent_values in ascending parent-index order; length must equal arity.
  double operator()(const Eigen::VectorXd& parent_values) const;

 private:
  MechanismSpec() = default;

  MechanismKind kind_ = MechanismKind::Additive;
  std::vector<UnivariateTerm> terms_;
  // gp_rff state
  Eigen::MatrixXd omega_;  // F x arity
  Eigen::VectorXd phase_;  // F
  Eigen::VectorXd amp_;    // F
  int gp_arity_ = 0;
  // scaled state
  double factor_ = 1.0;
  std::shared_ptr<const MechanismSpec> base_;
};

double eval_mechanism(const MechanismSpec& mech, const Eigen::VectorXd& parent_values);

struct EnvironmentData {
  Eigen::MatrixXd values;  // samples x nodes
  int env_id = 0;
  std::vector<std::string> column_names;
};

enum class ShiftKind { FunctionalOnly, EdgeDeletion, MixedC3 };
enum class BaseMechanism { SinSquare, GpRff };
// How shifted nodes change under gp_rff: fresh independent draws per
// environment, or the shared draw scaled by gp_scale_factor.
enum class GpShift { Independent, Scaled };

struct ScenarioSpec {
  Dag base_dag;
  int num_envs = 2;
  double shifted_fraction = 0.2;  // |S| = ceil(fraction * d), 0 means no shifts
  ShiftKind shift_kind = ShiftKind::FunctionalOnly;
  BaseMechanism mechanism = BaseMechanism::SinSquare;
  GpShift gp_shift = GpShift::Independent;
  double gp_scale_factor = 2.0;
  std::vector<int> samples_per_env;  // length num_envs
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  std::vector<int> shifted_nodes;  // ascending
  std::vector<Dag> per_env_dags;   // length num_envs
  // For deletion-style shifts: node -> parents whose edges exist only in the
  // first environment. Lexicographically sorted edge list mirrors it.
  std::map<int, std::vector<int>> deleted_parents;
  std::vector<std::pair<int, int>> structurally_shifted_edges;
};

// Chooses the shifted node set S among non-root nodes and derives the
// per-environment DAGs for the requested shift kind. Pure function of spec.
GroundTruth inject_shifts(const ScenarioSpec& spec);

// Ancestral sampling of one environment: roots are pure noise, non-roots are
// mechanism(parents) + noise. Mechanisms must be provided for every node
// that has parents. Throws NonFiniteError naming the node if a value blows up.
EnvironmentData sample_environment(const Dag& g, const std::map<int, MechanismSpec>& mechanisms,
                                   const NoiseSpec& noise, int num_samples, std::uint64_t seed,
                                   int env_id = 0);

// Mechanism table for one environment under the protocol matching the
// scenario's shift kind. Invariant nodes receive the same function object in
// every environment (same frozen randomness).
std::map<int, MechanismSpec> assign_mechanisms(const ScenarioSpec& spec, const GroundTruth& truth,
                                               int env);

// Full scenario: shift injection + per-environment mechanism assignment +
// sampling. Environment 0 plays the "reference" role of the two-environment
// protocols; environments >= 1 carry the shifted mechanisms/DAG.
std::pair<std::vector<EnvironmentData>, GroundTruth> build_scenario(const ScenarioSpec& spec);

// Graph-model parameters, so scenario grids can resample a fresh DAG per seed.
struct GraphSpec {
  enum class Model { Er, Sf } model = Model::Er;
  int d = 10;
  double k = 4.0;
};

Dag make_graph(const GraphSpec& gspec, std::uint64_t seed);

// ScenarioSpec minus the concrete DAG and seed; instantiate() fills both.
struct ScenarioTemplate {
  GraphSpec graph;
  int num_envs = 2;
  double shifted_fraction = 0.2;
  ShiftKind shift_kind = ShiftKind::FunctionalOnly;
  BaseMechanism mechanism = BaseMechanism::SinSquare;
  GpShift gp_shift = GpShift::Independent;
  double gp_scale_factor = 2.0;
  std::vector<int> samples_per_env = {500, 500};
  NoiseSpec noise;
};

ScenarioSpec instantiate(const ScenarioTemplate& tmpl, std::uint64_t seed);

}  // namespace iscan
