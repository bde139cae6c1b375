#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rafc/fem1d.hpp"
#include "rafc/galerkin.hpp"
#include "rafc/risk.hpp"
#include "rafc/sqp.hpp"

namespace rafc {

/// Named spatial profile.
///   "shifted-cosine": offset - amplitude cos(2 pi frequency x)
///   "constant":       offset
struct FunctionSpec {
  std::string kind = "shifted-cosine";
  double offset = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;

  ScalarField make() const;
  friend bool operator==(const FunctionSpec &, const FunctionSpec &) = default;
};

struct PdeConfig {
  double diffusion = 0.5;
  double reaction_mean = 0.2;
  double decay = 2.0; // of the trigonometric reaction modes
  int parameters = 2;
  double horizon = 0.5;
  friend bool operator==(const PdeConfig &, const PdeConfig &) = default;
};

struct DiscretizationConfig {
  double h = 1.0 / 32.0;
  int time_steps = 200;
  int degree = 2;
  friend bool operator==(const DiscretizationConfig &, const DiscretizationConfig &) = default;
};

struct RiskConfig {
  double theta = 10.0;
  int samples = 100;
  std::uint64_t seed = 20240601;
  std::string node_rule = "monte-carlo"; // or "tensor-gauss"
  int gauss_points = 3;                  // per dimension, tensor-gauss only
  double terminal_weight = 0.0;
  friend bool operator==(const RiskConfig &, const RiskConfig &) = default;
};

struct ActuatorConfig {
  std::vector<std::array<double, 2>> intervals{{0.1, 0.3}, {0.4, 0.6}, {0.7, 0.9}};
  double scaling = 3.1622776601683795;
  friend bool operator==(const ActuatorConfig &, const ActuatorConfig &) = default;
};

struct TargetConfig {
  FunctionSpec initial{"shifted-cosine", 4.0, 1.0, 1.0};
  FunctionSpec expansion_initial{"shifted-cosine", 1.0, 1.0, 1.0};
  FunctionSpec target_initial{"shifted-cosine", 1.25, 1.0, 1.0};
  double target_reaction = 0.0;
  std::optional<FunctionSpec> terminal; // unset: g(T)
  friend bool operator==(const TargetConfig &, const TargetConfig &) = default;
};

struct SolverConfig {
  double tolerance = 1e-6;
  int max_iterations = 20;
  int gd_iterations = 200;
  std::string gd_rule = "armijo"; // or "fixed"
  double gd_step = 1.0;
  friend bool operator==(const SolverConfig &, const SolverConfig &) = default;
};

struct ValidationConfig {
  int realizations = 10000;
  std::uint64_t seed = 7;
  std::vector<double> report_times; // empty: six equispaced times
  std::vector<double> percentiles{5.0, 95.0};
  std::vector<double> noise_levels{0.0, 0.5, 1.0, 1.5, 2.0};
  bool noise = true; // false: y0 +- level without the random part
  friend bool operator==(const ValidationConfig &, const ValidationConfig &) = default;
};

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  PdeConfig pde;
  DiscretizationConfig discretization;
  RiskConfig risk;
  ActuatorConfig actuators;
  TargetConfig targets;
  SolverConfig solver;
  ValidationConfig validation;

  friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

nlohmann::ordered_json to_json(const ExperimentConfig &config);

/// Parses and validates a config document. Errors carry `origin:line:` and the
/// dotted field name. Missing fields keep their defaults; unknown fields are
/// rejected.
ExperimentConfig parse_config(std::string_view text, std::string_view origin = "config");
ExperimentConfig load_config(const std::filesystem::path &path);

/// Throws ConfigError naming the first invalid field.
void validate_config(const ExperimentConfig &config);

/// psi_{2j-1} = (2j-1)^-decay cos(j pi x), psi_{2j} = (2j)^-decay sin(j pi x).
std::vector<ScalarField> trig_decay_modes(int count, double decay);

/// Everything derived from a config: discretization, system, tracking
/// problem and the initial expansion trajectory.
struct Experiment {
  ExperimentConfig config;
  Mesh1D mesh;
  std::shared_ptr<const GalerkinSystem> system;
  TrackingProblem problem;
  Eigen::VectorXd expansion_initial;
  std::vector<int> report_nodes;

  const TimeGrid &grid() const { return problem.grid(); }
  PceTrajectory initial_expansion() const;
  SqpOptions sqp_options() const;
  GdOptions gd_options() const;
};

Experiment build_experiment(const ExperimentConfig &config);

/// Grid indices of the report times (exact grid nodes required).
std::vector<int> report_nodes(const ValidationConfig &validation, const TimeGrid &grid);

/// `count` i.i.d. uniform points in [-1,1]^s from the named stream.
Eigen::MatrixXd draw_parameters(int count, int dimension, std::uint64_t seed,
                                std::string_view stream);

/// Tracking errors ||C(y(sigma_i; t_k) - g(t_k))||_H of deterministic
/// realizations under a fixed control (row i, column = position in `nodes`).
Eigen::MatrixXd realization_errors(const Experiment &exp, const ControlTrajectory &u,
                                   const Eigen::VectorXd &initial, const Eigen::MatrixXd &sigmas,
                                   const std::vector<int> &nodes);

/// All grid nodes 0..n_t.
std::vector<int> all_nodes(const TimeGrid &grid);

/// Linear-interpolation percentile (q in [0, 100]).
double percentile(std::vector<double> values, double q);

/// Percentile over the rows of one column.
double column_percentile(const Eigen::MatrixXd &m, Eigen::Index col, double q);

/// Perturbed initial condition y0 + sign (level + 0.01 level xi).
Eigen::VectorXd perturbed_initial(const Eigen::VectorXd &y0, double level, int sign,
                                  const Eigen::VectorXd &xi);

} // namespace rafc
