#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rafc/galerkin.hpp"
#include "rafc/pce_basis.hpp"
#include "rafc/rng.hpp"

namespace rafc {

// ---------------------------------------------------------------------------
// Entropic risk and exponential tilting
// ---------------------------------------------------------------------------

/// (1/theta) log mean exp(theta x_i), evaluated with a max shift; the sample
/// mean for theta = 0.
double entropic_risk(std::span<const double> samples, double theta);

/// Same with quadrature weights w_i (summing to one).
double entropic_risk(std::span<const double> samples, std::span<const double> weights,
                     double theta);

/// Tilt weights omega_i = exp(theta e_i) / sum_j w_j exp(theta e_j), so that
/// sum_i w_i omega_i = 1.
Eigen::VectorXd tilt_weights(std::span<const double> errors, std::span<const double> weights,
                             double theta);

// ---------------------------------------------------------------------------
// Parameter nodes
// ---------------------------------------------------------------------------

enum class NodeRule { monte_carlo, tensor_gauss };

/// Fixed quadrature nodes in [-1,1]^s with weights summing to one, plus the
/// chaos basis evaluated at every node.
struct SampleNodeSet {
  NodeRule rule = NodeRule::monte_carlo;
  Eigen::MatrixXd points;  // N x s
  Eigen::VectorXd weights; // N
  Eigen::MatrixXd basis;   // N x (K+1), L_nu(sigma_i)

  int size() const { return static_cast<int>(points.rows()); }
  std::span<const double> weight_span() const {
    return {weights.data(), static_cast<std::size_t>(weights.size())};
  }

  /// N i.i.d. uniform draws with equal weights 1/N.
  static SampleNodeSet monte_carlo(const TotalDegreeIndexSet &set, int count, CounterRng &rng);
  /// Tensor Gauss-Legendre rule with `per_dimension` points per axis.
  static SampleNodeSet tensor_gauss(const TotalDegreeIndexSet &set, int per_dimension);
  /// Explicit equal-weight nodes (rows of `points`).
  static SampleNodeSet from_points(const TotalDegreeIndexSet &set, const Eigen::MatrixXd &points);
};

// ---------------------------------------------------------------------------
// Weights, covariance and risk-adjusted operators
// ---------------------------------------------------------------------------

/// Tilt weights per node and time: values(i, k) = omega_i(t_k); terminal(i)
/// holds the terminal weights (all ones when the terminal term is off).
struct WeightField {
  Eigen::MatrixXd values;
  Eigen::VectorXd terminal;
};

/// `running_errors` holds squared tracking errors (node x time node).
/// An empty `terminal_errors` selects the P = 0 convention.
WeightField compute_weights(const Eigen::MatrixXd &running_errors,
                            const Eigen::VectorXd &terminal_errors, double theta,
                            const SampleNodeSet &nodes);

/// Unbiased weighted empirical covariance matrix
/// c_ii = (N w_i - w_i^2) / (N (N - 1)), c_ij = -w_i w_j / (N (N - 1)).
Eigen::MatrixXd weighted_covariance_matrix(const Eigen::VectorXd &omega);

/// Covariance matrix matching the node rule: the unbiased form above for
/// equal-weight Monte Carlo nodes, diag(w o omega) - (w o omega)(w o omega)^T
/// for weighted quadrature.
Eigen::MatrixXd covariance_matrix(const SampleNodeSet &nodes, const Eigen::VectorXd &omega);

/// Matrix whose row i pairs a chaos direction with the observed residual at
/// node i: row i, block m = L_m(sigma_i) (W (ybar(sigma_i) - g))^T.
Eigen::MatrixXd assemble_frak_M(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                const SampleNodeSet &nodes, const Eigen::MatrixXd &weight,
                                int dofs);

/// Quadratic and linear part of the second-order expansion at one time node.
struct QuadraticTerm {
  Eigen::MatrixXd Q;      // symmetric, clipped to be PSD
  Eigen::VectorXd affine; // chaos projection of omega * W (ybar - g)
  double min_eigenvalue = 0.0; // before clipping
};

/// Q = sum_i w_i omega_i L(sigma_i) L(sigma_i)^T (x) W + 2 theta Mfrak^T Cov Mfrak.
/// `weight` is the observation weight W (C^T M C, or P^T M P at the end time).
QuadraticTerm assemble_Q_running(const Eigen::VectorXd &expansion, const Eigen::VectorXd &target,
                                 const Eigen::VectorXd &omega, const SampleNodeSet &nodes,
                                 double theta, const Eigen::MatrixXd &weight, int dofs);

/// Symmetrizes Q and sets small negative eigenvalues (above
/// -1e-10 ||Q||_1) to zero; returns the smallest eigenvalue seen. Throws
/// SolverError below that floor.
double clip_to_psd(Eigen::MatrixXd &Q);

/// Tracking problem shared by the objective, gradient, SQP and baselines.
struct TrackingProblem {
  std::shared_ptr<const GalerkinSystem> system;
  Eigen::VectorXd initial_state;   // y0 (nodal, deterministic)
  NodalTrajectory target;          // g on the time grid
  Eigen::VectorXd terminal_target; // g_T
  double theta = 0.0;
  double terminal_weight = 0.0;    // P = terminal_weight * identity
  SampleNodeSet nodes;

  const TimeGrid &grid() const { return target.grid; }
  Eigen::MatrixXd running_weight() const { return system->fem.observation_weight(); }
  Eigen::MatrixXd terminal_weight_matrix() const {
    return terminal_weight * terminal_weight * system->fem.mass;
  }
  bool has_terminal_term() const { return terminal_weight != 0.0; }
};

/// Squared tracking errors of the chaos surrogate at the problem's nodes.
struct SampledErrors {
  Eigen::MatrixXd running; // N x (n_t + 1)
  Eigen::VectorXd terminal; // N (empty without terminal term)
};

SampledErrors sample_errors(const TrackingProblem &problem, const PceTrajectory &y);

/// Discrete risk-adjusted operators along an expansion trajectory.
struct RiskAdjustedOperators {
  std::vector<Eigen::MatrixXd> Q_running;
  std::vector<Eigen::VectorXd> affine_running;
  Eigen::MatrixXd Q_terminal;
  Eigen::VectorXd affine_terminal;
  /// Q ybar - q, the product form of Q times the shifted target.
  std::vector<Eigen::VectorXd> source_running;
  Eigen::VectorXd source_terminal;
  WeightField weights;
  double min_eigenvalue = 0.0;
};

RiskAdjustedOperators build_risk_operators(const TrackingProblem &problem,
                                           const PceTrajectory &expansion);

/// J(u) with trapezoid time integration and entropic risk over the nodes.
double objective(const TrackingProblem &problem, const ControlTrajectory &u);

/// J evaluated for a state already computed from u.
double objective_from_state(const TrackingProblem &problem, const PceTrajectory &y,
                            const ControlTrajectory &u);

/// sqrt(sum_k w_k |v_k|^2) with trapezoid weights.
double control_norm(const ControlTrajectory &v);

} // namespace rafc
