#include "doctest.h"

#include <cmath>

#include "rafc/parallel.hpp"
#include "rafc/sqp.hpp"
#include "support.hpp"

using namespace rafc;

namespace {

TrackingProblem unobserved(const TrackingProblem &p) {
  auto sys = std::make_shared<GalerkinSystem>(*p.system);
  sys->fem.observation.setZero();
  TrackingProblem out = p;
  out.system = sys;
  return out;
}

ControlTrajectory random_control(const TimeGrid &grid, CounterRng &rng, double scale = 1.0) {
  return {grid, scale * testing::random_matrix(3, grid.nodes(), rng)};
}

} // namespace

TEST_SUITE("sqp") {

TEST_CASE("gradient without observation is the control") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 10, 20, 1.0));
  const TrackingProblem p = unobserved(exp.problem);
  CounterRng rng(1);
  const ControlTrajectory u = random_control(exp.grid(), rng);
  const GradientResult g = reduced_gradient(p, u);
  CHECK((g.gradient.values - u.values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(g.objective == doctest::Approx(0.5 * std::pow(control_norm(u), 2)).epsilon(1e-14));
}

TEST_CASE("gradient matches central differences") {
  for (double theta : {0.0, 1.0}) {
    for (double terminal : {0.0, 1.0}) {
      ExperimentConfig c = testing::small_config(8, 1, 1, 10, 20, theta);
      c.risk.terminal_weight = terminal;
      const Experiment exp = build_experiment(c);
      CounterRng rng(17);
      const ControlTrajectory u = random_control(exp.grid(), rng);
      const GradientResult g = reduced_gradient(exp.problem, u);
      CHECK(g.objective == doctest::Approx(objective(exp.problem, u)).epsilon(1e-13));
      for (int dir = 0; dir < 10; ++dir) {
        const ControlTrajectory v = random_control(exp.grid(), rng);
        const double eps = 1e-5;
        const ControlTrajectory up{exp.grid(), u.values + eps * v.values};
        const ControlTrajectory down{exp.grid(), u.values - eps * v.values};
        const double fd = (objective(exp.problem, up) - objective(exp.problem, down)) / (2 * eps);
        const double analytic = testing::trapezoid_dot(g.gradient, v);
        CHECK(std::abs(fd - analytic) <= 1e-5 * std::abs(fd));
      }
    }
  }
}

TEST_CASE("weighted residual is the chaos projection") {
  const Experiment exp = build_experiment(testing::small_config(8, 2, 2, 10, 25, 2.0));
  CounterRng rng(6);
  const int d = exp.system->dofs();
  const Eigen::VectorXd y = testing::random_matrix(exp.system->size(), 1, rng);
  const Eigen::VectorXd g = testing::random_matrix(d, 1, rng);
  Eigen::VectorXd omega = (testing::random_matrix(25, 1, rng).array() + 2.0).matrix();
  const Eigen::MatrixXd W = exp.system->fem.observation_weight();
  const Eigen::VectorXd r = weighted_residual(y, g, omega, exp.problem.nodes, W, d);
  const Eigen::MatrixXd frak = assemble_frak_M(y, g, exp.problem.nodes, W, d);
  const Eigen::VectorXd expect = frak.transpose() * exp.problem.nodes.weights.cwiseProduct(omega);
  CHECK((r - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("gradient descent without observation stops after one step") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 10, 20, 1.0));
  const TrackingProblem p = unobserved(exp.problem);
  CounterRng rng(2);
  GdOptions opts;
  opts.iterations = 3;
  opts.tolerance = 1e-12;
  const GdResult r = run_openloop_gd(p, random_control(exp.grid(), rng), opts);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].step == 1.0);
  CHECK(r.records[0].objective < 1e-15);
  CHECK(r.control.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.termination == "tolerance");
}

TEST_CASE("armijo steps decrease the objective") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 20, 20, 10.0));
  const ControlTrajectory u0 = ControlTrajectory::zero(exp.grid(), 3);
  GdOptions opts;
  opts.iterations = 10;
  const GdResult r = run_openloop_gd(exp.problem, u0, opts);
  REQUIRE(r.records.size() == 10);
  double last = objective(exp.problem, u0);
  for (const auto &rec : r.records) {
    CHECK(rec.objective < last);
    CHECK(rec.step > 0.0);
    last = rec.objective;
  }

  GdOptions fixed;
  fixed.rule = StepRule::fixed;
  fixed.initial_step = 0.01;
  fixed.iterations = 3;
  const GdResult f = run_openloop_gd(exp.problem, u0, fixed);
  for (const auto &rec : f.records)
    CHECK(rec.step == 0.01);
  GdOptions bad;
  bad.shrink = 1.5;
  CHECK_THROWS_AS(run_openloop_gd(exp.problem, u0, bad), std::invalid_argument);
}

TEST_CASE("sqp report") {
  const Experiment exp = build_experiment(testing::small_config(8, 1, 1, 20, 20, 5.0));
  SqpOptions opts;
  opts.max_iterations = 4;
  opts.tolerance = 0.0;
  const SqpResult r = run_sqp(exp.problem, exp.initial_expansion(), opts);
  REQUIRE(r.report.records.size() == 4);
  CHECK(r.report.termination == Termination::max_iterations);
  CHECK(std::string(to_string(Termination::tolerance)) == "tolerance");
  CHECK(r.iterates.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const SqpRecord &rec = r.report.records[i];
    CHECK(rec.iteration == static_cast<int>(i) + 1);
    CHECK(std::isfinite(rec.objective));
    CHECK(rec.control_change >= 0.0);
    CHECK(rec.min_eigenvalue > -1e-6);
  }
  CHECK(r.report.records[0].control_change == doctest::Approx(control_norm(r.iterates[0])));
  CHECK(r.state.objective_value == doctest::Approx(objective(exp.problem, r.state.control)).epsilon(1e-13));
  CHECK(r.state.objective_value < objective(exp.problem, ControlTrajectory::zero(exp.grid(), 3)));

  SqpOptions loose;
  loose.tolerance = 1e6;
  const SqpResult once = run_sqp(exp.problem, exp.initial_expansion(), loose);
  CHECK(once.report.records.size() == 1);
  CHECK(once.report.termination == Termination::tolerance);
}

TEST_CASE("sqp on a deterministic problem is one Riccati solve") {
  const Experiment exp = build_experiment(testing::small_config(8, 0, 0, 100, 2, 0.0));
  const double g0 = reduced_gradient(exp.problem, ControlTrajectory::zero(exp.grid(), 3)).gradient_norm;
  SqpOptions opts;
  opts.max_iterations = 2;
  opts.tolerance = 0.0;
  const SqpResult r = run_sqp(exp.problem, exp.initial_expansion(), opts);
  CHECK(r.report.records[0].gradient_norm < 1e-2 * g0);
  // the linearization does not depend on the expansion
  CHECK(r.report.records[1].control_change < 1e-12 * control_norm(r.state.control));
}

TEST_CASE("results do not depend on the thread count") {
  const Experiment exp = build_experiment(testing::small_config(8, 2, 2, 20, 40, 10.0));
  SqpOptions opts;
  opts.max_iterations = 2;
  set_thread_count(1);
  const SqpResult serial = run_sqp(exp.problem, exp.initial_expansion(), opts);
  set_thread_count(4);
  const SqpResult threaded = run_sqp(exp.problem, exp.initial_expansion(), opts);
  set_thread_count(0);
  CHECK((serial.state.control.values - threaded.state.control.values).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < serial.report.records.size(); ++i)
    CHECK(serial.report.records[i].objective == threaded.report.records[i].objective);
}

}
