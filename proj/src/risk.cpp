#include "rafc/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rafc/errors.hpp"
#include "rafc/parallel.hpp"

namespace rafc {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("risk aversion theta must be finite and non-negative");
}

} // namespace

double entropic_risk(std::span<const double> samples, std::span<const double> weights,
                     double theta) {
  check_theta(theta);
  if (samples.empty())
    throw std::invalid_argument("entropic risk of an empty sample set");
  if (weights.size() != samples.size())
    throw std::invalid_argument("sample and weight counts differ");
  double top = -std::numeric_limits<double>::infinity();
  for (double x : samples) {
    if (!std::isfinite(x))
      throw std::invalid_argument("non-finite sample in entropic risk");
    top = std::max(top, x);
  }
  if (theta == 0.0) {
    double mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
      mean += weights[i] * samples[i];
    return mean;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    acc += weights[i] * std::exp(theta * (samples[i] - top));
  return top + std::log(acc) / theta;
}

double entropic_risk(std::span<const double> samples, double theta) {
  const std::vector<double> w(samples.size(), samples.empty() ? 0.0 : 1.0 / samples.size());
  return entropic_risk(samples, w, theta);
}

Eigen::VectorXd tilt_weights(std::span<const double> errors, std::span<const double> weights,
                             double theta) {
  check_theta(theta);
  const auto n = static_cast<Eigen::Index>(errors.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double e : errors) {
    if (!std::isfinite(e))
      throw SolverError("non-finite tracking error while computing risk weights");
    top = std::max(top, e);
  }
  Eigen::VectorXd omega(n);
  double denom = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    omega[i] = std::exp(theta * (errors[static_cast<std::size_t>(i)] - top));
    denom += weights[static_cast<std::size_t>(i)] * omega[i];
  }
  return omega / denom;
}

SampleNodeSet SampleNodeSet::monte_carlo(const TotalDegreeIndexSet &set, int count,
                                         CounterRng &rng) {
  if (count < 1)
    throw std::invalid_argument("node count must be positive");
  Eigen::MatrixXd points(count, set.dimension());
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < set.dimension(); ++j)
      points(i, j) = rng.uniform(-1.0, 1.0);
  return from_points(set, points);
}

SampleNodeSet SampleNodeSet::from_points(const TotalDegreeIndexSet &set,
                                         const Eigen::MatrixXd &points) {
  if (points.cols() != set.dimension())
    throw std::invalid_argument("node points have wrong dimension");
  SampleNodeSet nodes;
  nodes.rule = NodeRule::monte_carlo;
  nodes.points = points;
  const auto n = points.rows();
  nodes.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  nodes.basis.resize(n, static_cast<Eigen::Index>(set.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd row = points.row(i);
    nodes.basis.row(i) = basis_values(set, {row.data(), static_cast<std::size_t>(row.size())});
  }
  return nodes;
}

SampleNodeSet SampleNodeSet::tensor_gauss(const TotalDegreeIndexSet &set, int per_dimension) {
  const GaussRule rule = gauss_legendre(per_dimension);
  const int s = set.dimension();
  int total = 1;
  for (int j = 0; j < s; ++j)
    total *= per_dimension;
  Eigen::MatrixXd points(total, s);
  Eigen::VectorXd weights(total);
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    double w = 1.0;
    for (int j = 0; j < s; ++j) {
      const int q = rem % per_dimension;
      rem /= per_dimension;
      points(flat, j) = rule.nodes[static_cast<std::size_t>(q)];
      w *= 0.5 * rule.weights[static_cast<std::size_t>(q)];
    }
    weights[flat] = w;
  }
  SampleNodeSet nodes = from_points(set, points);
  nodes.rule = NodeRule::tensor_gauss;
  nodes.weights = weights;
  return nodes;
}

WeightField compute_weights(const Eigen::MatrixXd &running_errors,
                            const Eigen::VectorXd &terminal_errors, double theta,
                            const SampleNodeSet &nodes) {
  if (running_errors.rows() != nodes.size())
    throw std::invalid_argument("error matrix rows must match the node count");
  WeightField field;
  field.values.resize(running_errors.rows(), running_errors.cols());
  for (Eigen::Index k = 0; k < running_errors.cols(); ++k) {
    const auto col = running_errors.col(k);
    field.values.col(k) = tilt_weights({col.data(), static_cast<std::size_t>(col.size())},
                                       nodes.weight_span(), theta);
  }
  if (terminal_errors.size() == 0) {
    field.terminal = Eigen::VectorXd::Ones(nodes.size());
  } else {
    field.terminal = tilt_weights(
        {terminal_errors.data(), static_cast<std::size_t>(terminal_errors.size())},
        nodes.weight_span(), theta);
  }
  return field;
}

Eigen::MatrixXd weighted_covariance_matrix(const Eigen::VectorXd &omega) {
  const auto n = omega.size();
  if (n < 2)
    throw std::invalid_argument("weighted covariance needs at least two samples");
  const double N = static_cast<double>(n);
  Eigen::MatrixXd c = -omega * omega.transpose();
  c.diagonal() += N * omega;
  return c / (N * (N - 1.0));
}

Eigen::MatrixXd covariance_matrix(const SampleNodeSet &nodes, const Eigen::VectorXd &omega) {
  if (nodes.rule == NodeRule::monte_carlo)
    return weighted_covariance_matrix(omega);
  const Eigen::VectorXd p = nodes.weights.cwiseProduct(omega);
  Eigen::MatrixXd c = -p * p.transpose();
  c.diagonal() += p;
  return c;
}

Eigen::MatrixXd assemble_frak_M(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                const SampleNodeSet &nodes, const Eigen::MatrixXd &weight,
                                int dofs) {
  const auto modes = nodes.basis.cols();
  if (expansion.size() != dofs * modes)
    throw std::invalid_argument("expansion vector does not match the chaos layout");
  const Eigen::Map<const Eigen::MatrixXd> blocks(expansion.data(), dofs, modes);
  const Eigen::MatrixXd samples = blocks * nodes.basis.transpose(); // d x N
  const Eigen::MatrixXd residual = weight * (samples.colwise() - target);
  Eigen::MatrixXd frak(nodes.size(), dofs * modes);
  for (int i = 0; i < nodes.size(); ++i)
    for (Eigen::Index m = 0; m < modes; ++m)
      frak.row(i).segment(m * dofs, dofs) = nodes.basis(i, m) * residual.col(i).transpose();
  return frak;
}

double clip_to_psd(Eigen::MatrixXd &Q) {
  Q = 0.5 * (Q + Q.transpose()).eval();
  if (Q.size() == 0)
    return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> values(Q, Eigen::EigenvaluesOnly);
  const double lowest = values.eigenvalues().minCoeff();
  if (lowest >= 0.0)
    return lowest;
  const double norm1 = Q.cwiseAbs().colwise().sum().maxCoeff();
  if (lowest < -1e-10 * norm1)
    throw SolverError("risk-adjusted operator has eigenvalue " + std::to_string(lowest) +
                      " below the clipping floor; sampling is inconsistent");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Q = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  Q = 0.5 * (Q + Q.transpose()).eval();
  return lowest;
}

QuadraticTerm assemble_Q_running(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                 const Eigen::VectorXd &omega, const SampleNodeSet &nodes,
                                 double theta, const Eigen::MatrixXd &weight, int dofs) {
  check_theta(theta);
  const auto modes = nodes.basis.cols();
  const Eigen::VectorXd tilt = nodes.weights.cwiseProduct(omega);
  const Eigen::MatrixXd gram = nodes.basis.transpose() * tilt.asDiagonal() * nodes.basis;

  QuadraticTerm term;
  term.Q = Eigen::MatrixXd::Zero(dofs * modes, dofs * modes);
  for (Eigen::Index nu = 0; nu < modes; ++nu)
    for (Eigen::Index m = 0; m < modes; ++m)
      if (gram(nu, m) != 0.0)
        term.Q.block(nu * dofs, m * dofs, dofs, dofs) = gram(nu, m) * weight;

  const Eigen::MatrixXd frak = assemble_frak_M(expansion, target, nodes, weight, dofs);
  term.affine = frak.transpose() * tilt;
  if (theta > 0.0 && nodes.size() >= 2) {
    const Eigen::MatrixXd cov = covariance_matrix(nodes, omega);
    term.Q.noalias() += (2.0 * theta) * (frak.transpose() * (cov * frak));
  }
  term.min_eigenvalue = clip_to_psd(term.Q);
  return term;
}

SampledErrors sample_errors(const TrackingProblem &problem, const PceTrajectory &y) {
  const SampleNodeSet &nodes = problem.nodes;
  const Eigen::MatrixXd weight = problem.running_weight();
  const int steps = y.grid.nodes();
  SampledErrors out;
  out.running.resize(nodes.size(), steps);
  for (int k = 0; k < steps; ++k) {
    const Eigen::Map<const Eigen::MatrixXd> blocks(y.coeffs.col(k).data(), y.dofs, y.modes);
    const Eigen::MatrixXd diff =
        (blocks * nodes.basis.transpose()).colwise() - problem.target.values.col(k);
    out.running.col(k) = diff.cwiseProduct(weight * diff).colwise().sum().transpose();
  }
  if (problem.has_terminal_term()) {
    const Eigen::MatrixXd wt = problem.terminal_weight_matrix();
    const int last = y.grid.steps;
    const Eigen::Map<const Eigen::MatrixXd> blocks(y.coeffs.col(last).data(), y.dofs, y.modes);
    const Eigen::MatrixXd diff =
        (blocks * nodes.basis.transpose()).colwise() - problem.terminal_target;
    out.terminal = diff.cwiseProduct(wt * diff).colwise().sum().transpose();
  }
  return out;
}

RiskAdjustedOperators build_risk_operators(const TrackingProblem &problem,
                                           const PceTrajectory &expansion) {
  const GalerkinSystem &sys = *problem.system;
  const int d = sys.dofs();
  const int steps = expansion.grid.nodes();
  const SampledErrors errors = sample_errors(problem, expansion);

  RiskAdjustedOperators ops;
  ops.weights = compute_weights(errors.running, errors.terminal, problem.theta, problem.nodes);
  ops.Q_running.resize(static_cast<std::size_t>(steps));
  ops.affine_running.resize(static_cast<std::size_t>(steps));
  ops.source_running.resize(static_cast<std::size_t>(steps));
  std::vector<double> lowest(static_cast<std::size_t>(steps), 0.0);

  const Eigen::MatrixXd weight = problem.running_weight();
  parallel_for(steps, [&](int k) {
    const auto idx = static_cast<std::size_t>(k);
    const Eigen::VectorXd ybar = expansion.coeffs.col(k);
    QuadraticTerm term =
        assemble_Q_running(ybar, problem.target.values.col(k), ops.weights.values.col(k),
                           problem.nodes, problem.theta, weight, d);
    ops.source_running[idx] = term.Q * ybar - term.affine;
    ops.Q_running[idx] = std::move(term.Q);
    ops.affine_running[idx] = std::move(term.affine);
    lowest[idx] = term.min_eigenvalue;
  });
  ops.min_eigenvalue = *std::min_element(lowest.begin(), lowest.end());

  const int n = sys.size();
  if (problem.has_terminal_term()) {
    const Eigen::VectorXd ybar = expansion.coeffs.col(expansion.grid.steps);
    QuadraticTerm term = assemble_Q_running(ybar, problem.terminal_target, ops.weights.terminal,
                                            problem.nodes, problem.theta,
                                            problem.terminal_weight_matrix(), d);
    ops.source_terminal = term.Q * ybar - term.affine;
    ops.Q_terminal = std::move(term.Q);
    ops.affine_terminal = std::move(term.affine);
    ops.min_eigenvalue = std::min(ops.min_eigenvalue, term.min_eigenvalue);
  } else {
    ops.Q_terminal = Eigen::MatrixXd::Zero(n, n);
    ops.affine_terminal = Eigen::VectorXd::Zero(n);
    ops.source_terminal = Eigen::VectorXd::Zero(n);
  }
  return ops;
}

double control_norm(const ControlTrajectory &v) {
  const Eigen::VectorXd w = v.grid.trapezoid_weights();
  return std::sqrt((v.values.colwise().squaredNorm().transpose().cwiseProduct(w)).sum());
}

double objective_from_state(const TrackingProblem &problem, const PceTrajectory &y,
                            const ControlTrajectory &u) {
  const SampledErrors errors = sample_errors(problem, y);
  const Eigen::VectorXd w = y.grid.trapezoid_weights();
  double running = 0.0;
  for (int k = 0; k < y.grid.nodes(); ++k) {
    const auto col = errors.running.col(k);
    const double risk = entropic_risk({col.data(), static_cast<std::size_t>(col.size())},
                                      problem.nodes.weight_span(), problem.theta);
    running += w[k] * (risk + u.values.col(k).squaredNorm());
  }
  double terminal = 0.0;
  if (problem.has_terminal_term())
    terminal = entropic_risk({errors.terminal.data(), static_cast<std::size_t>(errors.terminal.size())},
                             problem.nodes.weight_span(), problem.theta);
  return 0.5 * (running + terminal);
}

double objective(const TrackingProblem &problem, const ControlTrajectory &u) {
  const PceTrajectory y = forward_solve(*problem.system, u, problem.initial_state);
  return objective_from_state(problem, y, u);
}

} // namespace rafc
