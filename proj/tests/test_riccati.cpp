#include "doctest.h"

#include <cmath>

#include "rafc/riccati.hpp"
#include "rafc/sqp.hpp"
#include "support.hpp"

using namespace rafc;

namespace {

RiskAdjustedOperators constant_operators(int n, int nodes, const Eigen::MatrixXd &Q,
                                         const Eigen::MatrixXd &QT) {
  RiskAdjustedOperators ops;
  ops.Q_running.assign(nodes, Q);
  ops.source_running.assign(nodes, Eigen::VectorXd::Zero(n));
  ops.affine_running.assign(nodes, Eigen::VectorXd::Zero(n));
  ops.Q_terminal = QT;
  ops.source_terminal = Eigen::VectorXd::Zero(n);
  ops.affine_terminal = Eigen::VectorXd::Zero(n);
  return ops;
}

} // namespace

TEST_SUITE("riccati") {

TEST_CASE("zero data gives a zero solution") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 20, 5, 1.0));
  const int n = exp.system->size();
  const auto ops = constant_operators(n, exp.grid().nodes(), Eigen::MatrixXd::Zero(n, n),
                                      Eigen::MatrixXd::Zero(n, n));
  const RiccatiSolution ric = solve_dre(*exp.system, ops, exp.grid());
  for (int k = 0; k < exp.grid().nodes(); ++k) {
    CHECK(ric.Pi[k].cwiseAbs().maxCoeff() == 0.0);
    CHECK(ric.h[k].cwiseAbs().maxCoeff() == 0.0);
  }
  const auto [y, u] = closed_loop_solve(*exp.system, ric, exp.problem.initial_state);
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
  const PceTrajectory free = forward_solve(*exp.system, u, exp.problem.initial_state);
  CHECK((y.coeffs - free.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar equation against a fine reference") {
  const testing::ScalarRiccati ref{-0.5, 0.75, 2.0, 1.5, 0.3};
  // mass 2: A = -1/2 and B = 3/4 in Euclidean coordinates
  const GalerkinSystem sys = make_deterministic_system(Eigen::MatrixXd::Constant(1, 1, 2.0),
                                                       Eigen::MatrixXd::Constant(1, 1, -1.0),
                                                       Eigen::MatrixXd::Constant(1, 1, 1.5));
  const TimeGrid grid(1.0, 200);
  RiskAdjustedOperators ops = constant_operators(1, grid.nodes(), Eigen::MatrixXd::Constant(1, 1, ref.q),
                                                 Eigen::MatrixXd::Constant(1, 1, ref.qT));
  for (int k = 0; k < grid.nodes(); ++k)
    ops.source_running[k][0] = ref.source(grid.time(k));
  ops.source_terminal[0] = ref.cT;
  const RiccatiSolution ric = solve_dre(sys, ops, grid);
  CHECK(ric.substeps == 1);
  for (int k : {0, 40, 100, 199}) {
    const auto [P, h] = ref.at(1.0, grid.time(k), 100 * (grid.steps - k));
    CHECK(std::abs(ric.Pi[k](0, 0) - P) < 1e-8);
    CHECK(std::abs(ric.h[k][0] - h) < 1e-8);
  }
  CHECK(ric.Pi[grid.steps](0, 0) == ref.qT);
  CHECK(ric.h[grid.steps][0] == -ref.cT);
}

TEST_CASE("symmetry, terminal value and semidefiniteness") {
  const Experiment exp = build_experiment(testing::small_config(16, 2, 2, 50, 30, 5.0));
  const RiskAdjustedOperators ops = build_risk_operators(exp.problem, exp.initial_expansion());
  const RiccatiSolution ric = solve_dre(*exp.system, ops, exp.grid());
  CHECK(ric.substeps >= 1);
  CHECK((ric.Pi[exp.grid().steps] - ops.Q_terminal).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < exp.grid().nodes(); k += 5) {
    CHECK((ric.Pi[k] - ric.Pi[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ric.Pi[k]);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
    CHECK(ric.Pi[k].allFinite());
  }
}

TEST_CASE("stiff default resolution stays stable") {
  const Experiment exp = build_experiment(testing::small_config(32, 1, 1, 200, 20, 10.0));
  const RiskAdjustedOperators ops = build_risk_operators(exp.problem, exp.initial_expansion());
  const RiccatiSolution ric = solve_dre(*exp.system, ops, exp.grid());
  MESSAGE("RK4 substeps per interval: " << ric.substeps);
  CHECK(ric.substeps > 1);
  CHECK(ric.Pi[0].allFinite());
  CHECK(ric.h[0].allFinite());
}

TEST_CASE("time refinement converges at fourth order") {
  const testing::ScalarRiccati ref{-0.5, 0.75, 2.0, 1.5, 0.3};
  const GalerkinSystem sys = make_deterministic_system(Eigen::MatrixXd::Constant(1, 1, 2.0),
                                                       Eigen::MatrixXd::Constant(1, 1, -1.0),
                                                       Eigen::MatrixXd::Constant(1, 1, 1.5));
  const auto [P_ref, h_ref] = ref.at(1.0, 0.0, 20000);
  std::vector<double> errors;
  for (int steps : {5, 10, 20}) {
    const TimeGrid grid(1.0, steps);
    RiskAdjustedOperators ops = constant_operators(1, grid.nodes(), Eigen::MatrixXd::Constant(1, 1, ref.q),
                                                   Eigen::MatrixXd::Constant(1, 1, ref.qT));
    for (int k = 0; k < grid.nodes(); ++k)
      ops.source_running[k][0] = ref.source(grid.time(k));
    ops.source_terminal[0] = ref.cT;
    const RiccatiSolution ric = solve_dre(sys, ops, grid);
    errors.push_back(std::abs(ric.Pi[0](0, 0) - P_ref) + std::abs(ric.h[0][0] - h_ref));
  }
  MESSAGE("errors at 5/10/20 steps: " << errors[0] << " " << errors[1] << " " << errors[2]);
  CHECK(errors[0] / errors[1] > 10.0);
  CHECK(errors[1] / errors[2] > 10.0);
}

TEST_CASE("feedback control") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 20, 5, 1.0));
  const RiskAdjustedOperators ops = build_risk_operators(exp.problem, exp.initial_expansion());
  const RiccatiSolution ric = solve_dre(*exp.system, ops, exp.grid());
  const int n = exp.system->size();
  CHECK(feedback_control(ric, 3, Eigen::VectorXd::Zero(n), *exp.system).isApprox(-ric.offset(3)));
  CounterRng rng(3);
  const Eigen::VectorXd y = testing::random_matrix(n, 1, rng);
  const Eigen::VectorXd expect = -(ric.gain(7) * y + ric.offset(7));
  CHECK((feedback_control(ric, 7, y, *exp.system) - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(feedback_control(ric, 0, Eigen::VectorXd::Zero(3), *exp.system), std::invalid_argument);
}

TEST_CASE("closed loop is consistent with the forward solve") {
  const Experiment exp = build_experiment(testing::small_config(16, 2, 2, 40, 30, 5.0));
  const RiskAdjustedOperators ops = build_risk_operators(exp.problem, exp.initial_expansion());
  const RiccatiSolution ric = solve_dre(*exp.system, ops, exp.grid());
  const auto [y, u] = closed_loop_solve(*exp.system, ric, exp.problem.initial_state);
  const PceTrajectory again = forward_solve(*exp.system, u, exp.problem.initial_state);
  CHECK((y.coeffs - again.coeffs).cwiseAbs().maxCoeff() < 1e-10 * y.coeffs.cwiseAbs().maxCoeff());
  for (int k = 0; k < exp.grid().nodes(); k += 7)
    CHECK((u.values.col(k) - feedback_control(ric, k, y.coeffs.col(k), *exp.system)).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("deterministic LQR agrees with the open-loop optimum") {
  const Experiment exp = build_experiment(testing::small_config(8, 0, 0, 100, 2, 0.0));
  SqpOptions opts;
  opts.max_iterations = 1;
  const SqpResult sqp = run_sqp(exp.problem, exp.initial_expansion(), opts);
  GdOptions gd;
  gd.iterations = 5000;
  gd.tolerance = 1e-10;
  const GdResult ol = run_openloop_gd(exp.problem, ControlTrajectory::zero(exp.grid(), 3), gd);
  const double J_fb = objective(exp.problem, sqp.state.control);
  const double J_ol = objective(exp.problem, ol.control);
  const double gap = control_norm({exp.grid(), sqp.state.control.values - ol.control.values}) /
                     control_norm(ol.control);
  MESSAGE("LQR vs open loop: relative control gap " << gap << ", objectives " << J_fb << " / " << J_ol
                                                     << " (" << ol.termination << ")");
  CHECK(gap < 1e-3);
  CHECK(J_fb <= J_ol * (1.0 + 1e-6));
}

}
