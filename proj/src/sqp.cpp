#include "rafc/sqp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rafc/errors.hpp"
#include "rafc/parallel.hpp"

namespace rafc {

Eigen::VectorXd weighted_residual(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                  const Eigen::VectorXd &omega, const SampleNodeSet &nodes,
                                  const Eigen::MatrixXd &weight, int dofs) {
  const auto modes = nodes.basis.cols();
  const Eigen::Map<const Eigen::MatrixXd> blocks(expansion.data(), dofs, modes);
  const Eigen::MatrixXd residual =
      weight * ((blocks * nodes.basis.transpose()).colwise() - target);
  const Eigen::VectorXd tilt = nodes.weights.cwiseProduct(omega);
  const Eigen::MatrixXd projected = residual * tilt.asDiagonal() * nodes.basis;
  return Eigen::Map<const Eigen::VectorXd>(projected.data(), projected.size());
}

PceTrajectory uncontrolled_expansion(const GalerkinSystem &sys, const TimeGrid &grid,
                                     const Eigen::VectorXd &initial) {
  return forward_solve(sys, ControlTrajectory::zero(grid, sys.actuators()), initial);
}

GradientResult reduced_gradient(const TrackingProblem &problem, const ControlTrajectory &u) {
  const GalerkinSystem &sys = *problem.system;
  const TimeGrid &grid = u.grid;
  const int N = grid.steps, d = sys.dofs(), n = sys.size();
  const double dt = grid.dt();
  const Eigen::VectorXd w = grid.trapezoid_weights();

  GradientResult out;
  out.state = forward_solve(sys, u, problem.initial_state);
  const PceTrajectory &y = out.state;
  const SampledErrors errors = sample_errors(problem, y);
  const WeightField weights =
      compute_weights(errors.running, errors.terminal, problem.theta, problem.nodes);

  // Objective from the same errors.
  double running = 0.0;
  for (int k = 0; k <= N; ++k) {
    const auto col = errors.running.col(k);
    running += w[k] * (entropic_risk({col.data(), static_cast<std::size_t>(col.size())},
                                     problem.nodes.weight_span(), problem.theta) +
                       u.values.col(k).squaredNorm());
  }
  double terminal = 0.0;
  if (problem.has_terminal_term())
    terminal = entropic_risk(
        {errors.terminal.data(), static_cast<std::size_t>(errors.terminal.size())},
        problem.nodes.weight_span(), problem.theta);
  out.objective = 0.5 * (running + terminal);

  // State sensitivities of the discrete objective per node.
  const Eigen::MatrixXd weight = problem.running_weight();
  Eigen::MatrixXd source(n, grid.nodes());
  parallel_for(grid.nodes(), [&](int k) {
    source.col(k) = w[k] * weighted_residual(y.coeffs.col(k), problem.target.values.col(k),
                                             weights.values.col(k), problem.nodes, weight, d);
  });
  if (problem.has_terminal_term())
    source.col(N) += weighted_residual(y.coeffs.col(N), problem.terminal_target, weights.terminal,
                                       problem.nodes, problem.terminal_weight_matrix(), d);

  const CrankNicolson cn(sys.block_mass, sys.op, dt);
  const Eigen::MatrixXd explicit_t = cn.explicit_part().transpose();
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, grid.nodes()); // column 0 unused
  lambda.col(N) = cn.solve_transposed(source.col(N));
  for (int k = N - 1; k >= 1; --k)
    lambda.col(k) = cn.solve_transposed(explicit_t * lambda.col(k + 1) + source.col(k));

  const Eigen::MatrixXd input_t = (0.5 * dt) * sys.input_block.transpose();
  out.gradient = ControlTrajectory{grid, Eigen::MatrixXd(sys.actuators(), grid.nodes())};
  for (int k = 0; k <= N; ++k) {
    Eigen::VectorXd adj = Eigen::VectorXd::Zero(n);
    if (k >= 1)
      adj += lambda.col(k);
    if (k < N)
      adj += lambda.col(k + 1);
    out.gradient.values.col(k) = u.values.col(k) + (input_t * adj) / w[k];
  }
  out.gradient_norm = control_norm(out.gradient);
  return out;
}

const char *to_string(Termination t) {
  switch (t) {
  case Termination::tolerance:
    return "tolerance";
  case Termination::max_iterations:
    return "max_iterations";
  }
  return "unknown";
}

SqpResult run_sqp(const TrackingProblem &problem, const PceTrajectory &initial_expansion,
                  const SqpOptions &options) {
  if (!(options.tolerance >= 0.0) || options.max_iterations < 1)
    throw std::invalid_argument("SQP needs a non-negative tolerance and at least one iteration");
  const GalerkinSystem &sys = *problem.system;
  const TimeGrid &grid = problem.grid();

  SqpResult result;
  PceTrajectory expansion = initial_expansion;
  ControlTrajectory previous = ControlTrajectory::zero(grid, sys.actuators());
  int rising = 0;
  double last_objective = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= options.max_iterations; ++k) {
    try {
      const RiskAdjustedOperators ops = build_risk_operators(problem, expansion);
      result.riccati = solve_dre(sys, ops, grid);
      auto [state, control] = closed_loop_solve(sys, result.riccati, problem.initial_state);
      const GradientResult grad = reduced_gradient(problem, control);

      SqpRecord rec;
      rec.iteration = k;
      rec.objective = grad.objective;
      rec.gradient_norm = grad.gradient_norm;
      rec.control_change = control_norm(ControlTrajectory{grid, control.values - previous.values});
      rec.min_eigenvalue = ops.min_eigenvalue;
      result.report.records.push_back(rec);

      const bool moved = rec.control_change > 1e-10 * std::max(1.0, control_norm(control));
      rising = (moved && grad.objective >= last_objective) ? rising + 1 : 0;
      if (rising == 3)
        result.report.warnings.push_back(
            "objective did not decrease for 3 consecutive iterations (ending at iteration " +
            std::to_string(k) + "); the initial expansion may be too far from the solution");
      last_objective = grad.objective;

      result.state.iteration = k;
      result.state.expansion = std::move(state);
      result.state.control = control;
      result.state.objective_value = grad.objective;
      result.state.gradient_norm = grad.gradient_norm;
      result.iterates.push_back(control);
      previous = std::move(control);
      expansion = result.state.expansion;
    } catch (const SolverError &e) {
      throw SolverError("SQP iteration " + std::to_string(k) + ": " + e.what());
    }
    if (result.state.gradient_norm < options.tolerance) {
      result.report.termination = Termination::tolerance;
      return result;
    }
  }
  result.report.termination = Termination::max_iterations;
  return result;
}

GdResult run_openloop_gd(const TrackingProblem &problem, const ControlTrajectory &initial,
                         const GdOptions &options) {
  if (options.iterations < 0 || !(options.initial_step > 0.0) || !(options.shrink > 0.0) ||
      !(options.shrink < 1.0))
    throw std::invalid_argument("invalid gradient descent options");
  GdResult result;
  result.control = initial;
  result.termination = "iterations";
  GradientResult current = reduced_gradient(problem, result.control);
  for (int it = 1; it <= options.iterations; ++it) {
    if (current.gradient_norm <= options.tolerance) {
      result.termination = "tolerance";
      break;
    }
    const double g2 = current.gradient_norm * current.gradient_norm;
    double alpha = options.initial_step;
    ControlTrajectory trial{result.control.grid, result.control.values - alpha * current.gradient.values};
    if (options.rule == StepRule::armijo) {
      int shrinks = 0;
      bool stalled = false;
      while (objective(problem, trial) > current.objective - options.sufficient_decrease * alpha * g2) {
        if (options.sufficient_decrease * alpha * g2 <
            1e-15 * std::max(1.0, std::abs(current.objective))) {
          stalled = true;
          break;
        }
        if (++shrinks > options.max_shrinks)
          throw SolverError("Armijo line search failed after " + std::to_string(options.max_shrinks) +
                            " reductions at iteration " + std::to_string(it) +
                            " (gradient norm " + std::to_string(current.gradient_norm) + ")");
        alpha *= options.shrink;
        trial.values = result.control.values - alpha * current.gradient.values;
      }
      if (stalled) {
        result.termination = "stalled";
        break;
      }
    }
    result.control = std::move(trial);
    current = reduced_gradient(problem, result.control);
    result.records.push_back({it, current.objective, current.gradient_norm, alpha});
  }
  return result;
}

} // namespace rafc
