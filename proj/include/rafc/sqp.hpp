#pragma once

#include <string>
#include <vector>

#include "rafc/galerkin.hpp"
#include "rafc/riccati.hpp"
#include "rafc/risk.hpp"

namespace rafc {

/// Objective, its gradient representer and the state it was computed from.
struct GradientResult {
  double objective = 0.0;
  ControlTrajectory gradient;
  double gradient_norm = 0.0; // trapezoid norm
  PceTrajectory state;
};

/// Exact gradient of the discrete objective by a backward Crank-Nicolson
/// adjoint sweep. Risk weights come from the state generated by u. The
/// representer is taken in the trapezoid inner product, so that
/// J(u + e v) = J(u) + e sum_k w_k <grad_k, v_k> + O(e^2).
GradientResult reduced_gradient(const TrackingProblem &problem, const ControlTrajectory &u);

/// Chaos projection of omega W (y(sigma_i) - g) over the nodes for one time
/// node: block m = sum_i w_i omega_i L_m(sigma_i) W (y(sigma_i) - g).
Eigen::VectorXd weighted_residual(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                  const Eigen::VectorXd &omega, const SampleNodeSet &nodes,
                                  const Eigen::MatrixXd &weight, int dofs);

/// Uncontrolled Galerkin trajectory from a deterministic initial condition.
PceTrajectory uncontrolled_expansion(const GalerkinSystem &sys, const TimeGrid &grid,
                                     const Eigen::VectorXd &initial);

struct SqpOptions {
  double tolerance = 1e-6;
  int max_iterations = 20;
};

struct SqpRecord {
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double control_change = 0.0;
  double min_eigenvalue = 0.0; // smallest eigenvalue of the risk operators before clipping
};

enum class Termination { tolerance, max_iterations };

const char *to_string(Termination t);

struct SqpReport {
  std::vector<SqpRecord> records;
  Termination termination = Termination::max_iterations;
  std::vector<std::string> warnings;
};

struct SqpState {
  int iteration = 0;
  PceTrajectory expansion; // closed-loop state of the last subproblem
  ControlTrajectory control;
  double objective_value = 0.0;
  double gradient_norm = 0.0;
};

struct SqpResult {
  SqpState state;
  RiccatiSolution riccati;
  SqpReport report;
  std::vector<ControlTrajectory> iterates; // control after each iteration
};

/// Outer loop: linearize the risk at the current expansion trajectory, solve
/// the Riccati equation, close the loop from the true initial state and test
/// the reduced gradient of the closed-loop control.
SqpResult run_sqp(const TrackingProblem &problem, const PceTrajectory &initial_expansion,
                  const SqpOptions &options = {});

enum class StepRule { armijo, fixed };

struct GdOptions {
  int iterations = 200;
  StepRule rule = StepRule::armijo;
  double initial_step = 1.0; // also the step of the fixed rule
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_shrinks = 40;
  double tolerance = 0.0; // stop once the gradient norm drops below
};

struct GdRecord {
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

struct GdResult {
  ControlTrajectory control;
  std::vector<GdRecord> records;
  std::string termination;
};

/// Open-loop gradient descent u <- u - alpha grad J(u).
GdResult run_openloop_gd(const TrackingProblem &problem, const ControlTrajectory &initial,
                         const GdOptions &options = {});

} // namespace rafc
