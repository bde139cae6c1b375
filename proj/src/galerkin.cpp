#include "rafc/galerkin.hpp"

#include <cmath>
#include <stdexcept>

#include "rafc/errors.hpp"

namespace rafc {

TimeGrid::TimeGrid(double horizon, int steps) : horizon(horizon), steps(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("time horizon must be positive");
  if (steps < 1)
    throw std::invalid_argument("time grid needs at least one step");
}

Eigen::VectorXd TimeGrid::trapezoid_weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(nodes(), dt());
  w[0] *= 0.5;
  w[steps] *= 0.5;
  return w;
}

ControlTrajectory ControlTrajectory::zero(const TimeGrid &grid, int actuators) {
  return ControlTrajectory{grid, Eigen::MatrixXd::Zero(actuators, grid.nodes())};
}

Eigen::VectorXd GalerkinSystem::apply(const Eigen::VectorXd &y) const {
  const int d = dofs(), K1 = modes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (int m = 0; m < K1; ++m)
    out.segment(m * d, d) = base_operator * y.segment(m * d, d);
  for (std::size_t j = 0; j < parameter_operators.size(); ++j) {
    const Eigen::MatrixXd &Mj = multiplication[j];
    for (int m = 0; m < K1; ++m) {
      Eigen::VectorXd mixed = Eigen::VectorXd::Zero(d);
      for (int nu = 0; nu < K1; ++nu)
        if (Mj(m, nu) != 0.0)
          mixed += Mj(m, nu) * y.segment(nu * d, d);
      out.segment(m * d, d) += parameter_operators[j] * mixed;
    }
  }
  return out;
}

Eigen::MatrixXd GalerkinSystem::realization_operator(std::span<const double> sigma) const {
  if (sigma.size() != parameter_operators.size())
    throw std::invalid_argument("parameter point has wrong dimension");
  Eigen::MatrixXd a = base_operator;
  for (std::size_t j = 0; j < sigma.size(); ++j)
    a += sigma[j] * parameter_operators[j];
  return a;
}

Eigen::VectorXd GalerkinSystem::forcing_at(double t) const {
  if (!forcing)
    return Eigen::VectorXd::Zero(dofs());
  return forcing(t);
}

namespace {

void finalize(GalerkinSystem &sys) {
  const int d = sys.dofs(), K1 = sys.modes();
  const int n = d * K1;
  sys.block_mass = Eigen::MatrixXd::Zero(n, n);
  sys.op = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < K1; ++m) {
    sys.block_mass.block(m * d, m * d, d, d) = sys.fem.mass;
    sys.op.block(m * d, m * d, d, d) = sys.base_operator;
  }
  for (std::size_t j = 0; j < sys.parameter_operators.size(); ++j)
    for (int m = 0; m < K1; ++m)
      for (int nu = 0; nu < K1; ++nu)
        if (sys.multiplication[j](m, nu) != 0.0)
          sys.op.block(m * d, nu * d, d, d) +=
              sys.multiplication[j](m, nu) * sys.parameter_operators[j];
  sys.input_block = Eigen::MatrixXd::Zero(n, sys.fem.input.cols());
  sys.input_block.topRows(d) = sys.fem.input;
  sys.mass_factor.compute(sys.fem.mass);
  if (sys.mass_factor.info() != Eigen::Success)
    throw SolverError("mass matrix is not positive definite");
}

} // namespace

GalerkinSystem assemble_system(const TotalDegreeIndexSet &set, const FemMatrices &fem,
                               double diffusion, Forcing forcing) {
  if (set.dimension() != fem.parameters())
    throw std::invalid_argument("index set dimension differs from the number of reaction modes");
  GalerkinSystem sys;
  sys.index_set = set;
  sys.fem = fem;
  sys.diffusion = diffusion;
  sys.forcing = std::move(forcing);
  sys.base_operator = -(diffusion * fem.stiffness + fem.reaction_mean);
  for (int j = 0; j < set.dimension(); ++j) {
    sys.parameter_operators.push_back(-fem.reaction[static_cast<std::size_t>(j)]);
    sys.multiplication.push_back(multiplication_matrix(j, set));
  }
  finalize(sys);
  return sys;
}

GalerkinSystem make_deterministic_system(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &op,
                                         const Eigen::MatrixXd &input) {
  GalerkinSystem sys;
  sys.index_set = TotalDegreeIndexSet(0, 0);
  sys.fem.mass = mass;
  sys.fem.stiffness = Eigen::MatrixXd::Zero(mass.rows(), mass.cols());
  sys.fem.reaction_mean = -op;
  sys.fem.input = input;
  sys.fem.observation = Eigen::MatrixXd::Identity(mass.rows(), mass.cols());
  sys.base_operator = op;
  finalize(sys);
  return sys;
}

CrankNicolson::CrankNicolson(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &op, double dt) {
  const Eigen::MatrixXd lhs = mass - 0.5 * dt * op;
  lu_.compute(lhs);
  const double rc = lu_.rcond();
  if (!(rc > 1e-14))
    throw SolverError("Crank-Nicolson step matrix is singular (rcond = " + std::to_string(rc) +
                      "); check the time step against the operator");
  rhs_matrix_ = mass + 0.5 * dt * op;
}

Eigen::VectorXd CrankNicolson::step(const Eigen::VectorXd &x, const Eigen::VectorXd &load) const {
  return lu_.solve(rhs_matrix_ * x + load);
}

Eigen::MatrixXd crank_nicolson_solve(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &op,
                                     const Eigen::MatrixXd &input, const ControlTrajectory &u,
                                     const Eigen::VectorXd &x0, const Forcing &forcing) {
  const TimeGrid &grid = u.grid;
  const double dt = grid.dt();
  const CrankNicolson cn(mass, op, dt);
  Eigen::MatrixXd x(x0.size(), grid.nodes());
  x.col(0) = x0;
  for (int k = 0; k < grid.steps; ++k) {
    Eigen::VectorXd load = (0.5 * dt) * (input * (u.values.col(k) + u.values.col(k + 1)));
    if (forcing) {
      Eigen::VectorXd f = 0.5 * dt * (forcing(grid.time(k)) + forcing(grid.time(k + 1)));
      load.head(f.size()) += f;
    }
    x.col(k + 1) = cn.step(x.col(k), load);
  }
  if (!x.allFinite())
    throw SolverError("non-finite state in Crank-Nicolson solve");
  return x;
}

PceTrajectory forward_solve(const GalerkinSystem &sys, const ControlTrajectory &u,
                            const Eigen::VectorXd &y0) {
  if (y0.size() != sys.dofs())
    throw std::invalid_argument("initial condition has wrong size");
  if (u.values.rows() != sys.actuators())
    throw std::invalid_argument("control has wrong number of actuators");
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sys.size());
  x0.head(sys.dofs()) = y0;
  PceTrajectory y;
  y.grid = u.grid;
  y.modes = sys.modes();
  y.dofs = sys.dofs();
  y.coeffs = crank_nicolson_solve(sys.block_mass, sys.op, sys.input_block, u, x0, sys.forcing);
  return y;
}

NodalTrajectory sample_path_solve(const GalerkinSystem &sys, std::span<const double> sigma,
                                  const ControlTrajectory &u, const Eigen::VectorXd &y0) {
  for (double s : sigma)
    if (!(std::abs(s) <= 1.0))
      throw std::domain_error("parameter sample outside [-1, 1]");
  NodalTrajectory path;
  path.grid = u.grid;
  path.values = crank_nicolson_solve(sys.fem.mass, sys.realization_operator(sigma), sys.fem.input,
                                     u, y0, sys.forcing);
  return path;
}

Eigen::VectorXd surrogate_at(const PceTrajectory &y, int k, const Eigen::VectorXd &basis) {
  const Eigen::Map<const Eigen::MatrixXd> blocks(y.coeffs.col(k).data(), y.dofs, y.modes);
  return blocks * basis;
}

NodalTrajectory surrogate_eval(const PceTrajectory &y, const TotalDegreeIndexSet &set,
                               std::span<const double> sigma) {
  const Eigen::VectorXd basis = basis_values(set, sigma);
  if (basis.size() != y.modes)
    throw std::invalid_argument("index set does not match the trajectory");
  NodalTrajectory out;
  out.grid = y.grid;
  out.values.resize(y.dofs, y.grid.nodes());
  for (int k = 0; k < y.grid.nodes(); ++k)
    out.values.col(k) = surrogate_at(y, k, basis);
  return out;
}

Eigen::VectorXd tracking_error(const NodalTrajectory &path, const NodalTrajectory &target,
                               const FemMatrices &fem) {
  if (!(path.grid == target.grid) || path.values.rows() != target.values.rows())
    throw std::invalid_argument("trajectory and target live on different grids");
  const Eigen::MatrixXd weight = fem.observation_weight();
  Eigen::VectorXd err(path.grid.nodes());
  for (int k = 0; k < path.grid.nodes(); ++k) {
    const Eigen::VectorXd diff = path.values.col(k) - target.values.col(k);
    err[k] = std::sqrt(std::max(0.0, diff.dot(weight * diff)));
  }
  return err;
}

} // namespace rafc
