#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rafc/galerkin.hpp"
#include "rafc/risk.hpp"

namespace rafc {

/// Tabulated feedback law u = -Bt^T (Pi y + h), Bt = (I (x) M)^{-1} input_block.
///
/// Pi[k] and h[k] hold the value-function data at t_k in the coordinates of
/// the chaos coefficient vector; Pi[n_t] is the terminal weight.
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> Pi;
  std::vector<Eigen::VectorXd> h;
  Eigen::MatrixXd scaled_input; // Bt
  int substeps = 1;             // RK4 steps per grid interval

  /// Feedback gain Bt^T Pi[k] (N_a x n).
  Eigen::MatrixXd gain(int k) const { return (Pi[static_cast<std::size_t>(k)] * scaled_input).transpose(); }
  /// Feedback offset Bt^T h[k].
  Eigen::VectorXd offset(int k) const { return scaled_input.transpose() * h[static_cast<std::size_t>(k)]; }
};

/// Gains and offsets of a tabulated feedback law u_k = -gain[k] y - offset[k];
/// all a closed-loop simulation needs from the Riccati solution.
struct FeedbackLaw {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> gain;   // N_a x n
  std::vector<Eigen::VectorXd> offset; // N_a
};

FeedbackLaw feedback_law(const RiccatiSolution &ric);

/// Backward RK4 sweep of
///   -Pi' = Pi A + A^T Pi - Pi Bt Bt^T Pi + Q,
///   -h'  = (A - Bt Bt^T Pi)^T h + Pi f - (Q ybar - q),
/// with A = (I (x) M)^{-1} K, Pi(T) = Q_T and h(T) = -(Q_T ybar_T - q_T).
/// Each grid interval is split into enough RK4 substeps to keep the stiff
/// diffusion modes inside the stability region.
RiccatiSolution solve_dre(const GalerkinSystem &sys, const RiskAdjustedOperators &ops,
                          const TimeGrid &grid);

/// u_k = -Bt^T (Pi[k] y + h[k]); only the mean block of Pi y + h contributes.
Eigen::VectorXd feedback_control(const RiccatiSolution &ric, int k, const Eigen::VectorXd &y,
                                 const GalerkinSystem &sys);

/// Crank-Nicolson sweep with the feedback closed at both ends of each step,
/// u_{k+1} = -G_{k+1} y_{k+1} - o_{k+1}. The step matrix is factored once and
/// the feedback enters by a low-rank (Woodbury) correction. The returned
/// state equals forward_solve() with the returned control.
std::pair<PceTrajectory, ControlTrajectory>
closed_loop_solve(const GalerkinSystem &sys, const FeedbackLaw &law, const Eigen::VectorXd &y0);

std::pair<PceTrajectory, ControlTrajectory>
closed_loop_solve(const GalerkinSystem &sys, const RiccatiSolution &ric, const Eigen::VectorXd &y0);

} // namespace rafc
