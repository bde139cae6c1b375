#pragma once

#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "rafc/experiment.hpp"
#include "rafc/rng.hpp"

namespace rafc::testing {

/// Default physics with a reduced discretization.
ExperimentConfig small_config(int cells, int parameters, int degree, int steps, int samples,
                              double theta);

/// Entries uniform in [-1, 1].
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng &rng);

/// Trapezoid pairing sum_k w_k <a_k, b_k>.
double trapezoid_dot(const ControlTrajectory &a, const ControlTrajectory &b);

/// Default physics on a coarse mesh, assembled without a config.
std::shared_ptr<GalerkinSystem> small_system(int cells, int s, int p, double cbar = 0.2,
                                             bool zero_psi = false);

/// Second-order form of half the sampled risk, evaluated node by node.
double bilinear_oracle(const GalerkinSystem &sys, const SampleNodeSet &nodes,
                       const Eigen::VectorXd &ybar, const Eigen::VectorXd &g,
                       const Eigen::VectorXd &omega, double theta, const Eigen::VectorXd &d1,
                       const Eigen::VectorXd &d2);

/// Scalar Riccati pair x' = a x + b u with running weight q, terminal weight
/// qT, source 1 + t and terminal source cT, integrated backward by plain RK4.
struct ScalarRiccati {
  double a, b, q, qT, cT;
  double source(double t) const { return 1.0 + t; }
  /// (Pi, h) at t_end after `steps` RK4 steps from T.
  std::pair<double, double> at(double T, double t_end, int steps) const;
};

} // namespace rafc::testing
