#include "rafc/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "rafc/errors.hpp"

namespace rafc {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Largest |z| on which classical RK4 is used; the real-axis limit is ~2.785.
constexpr double kRk4Radius = 2.5;

double spectral_radius(const GalerkinSystem &sys) {
  const Eigen::MatrixXd a = sys.block_mass.ldlt().solve(sys.op);
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Right-hand sides of the backward equations in tau = T - t.
class RiccatiField {
public:
  RiccatiField(const GalerkinSystem &sys, Eigen::MatrixXd scaled_input)
      : op_(sys.op.sparseView()), op_t_(op_.transpose()), input_(std::move(scaled_input)) {
    mass_.compute(SparseMatrix(sys.block_mass.sparseView()));
    if (mass_.info() != Eigen::Success)
      throw SolverError("block mass matrix factorization failed");
  }

  // Pi A + A^T Pi - Pi Bt Bt^T Pi + Q
  Eigen::MatrixXd matrix(const Eigen::MatrixXd &P, const Eigen::MatrixXd &Q) const {
    const Eigen::MatrixXd PMinv = mass_.solve(P).transpose();
    const Eigen::MatrixXd PA = PMinv * op_;
    const Eigen::MatrixXd X = P * input_;
    Eigen::MatrixXd out = PA + PA.transpose();
    out.noalias() -= X * X.transpose();
    out += Q;
    return out;
  }

  // A^T h - Pi Bt Bt^T h + Pi ft - c
  Eigen::VectorXd vector(const Eigen::MatrixXd &P, const Eigen::VectorXd &h,
                         const Eigen::VectorXd &source, const Eigen::VectorXd *scaled_forcing) const {
    Eigen::VectorXd out = op_t_ * mass_.solve(h);
    out.noalias() -= P * (input_ * (input_.transpose() * h));
    if (scaled_forcing)
      out.noalias() += P * *scaled_forcing;
    out -= source;
    return out;
  }

  Eigen::VectorXd scaled_forcing(const GalerkinSystem &sys, double t) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.size());
    f.head(sys.dofs()) = sys.forcing_at(t);
    return mass_.solve(f);
  }

private:
  SparseMatrix op_;
  SparseMatrix op_t_;
  Eigen::MatrixXd input_;
  Eigen::SimplicialLDLT<SparseMatrix> mass_;
};

void symmetrize(Eigen::MatrixXd &P) { P = 0.5 * (P + P.transpose()).eval(); }

} // namespace

RiccatiSolution solve_dre(const GalerkinSystem &sys, const RiskAdjustedOperators &ops,
                          const TimeGrid &grid) {
  const int n = sys.size();
  const auto nodes = static_cast<std::size_t>(grid.nodes());
  if (ops.Q_running.size() != nodes || ops.source_running.size() != nodes)
    throw std::invalid_argument("risk operators are not tabulated on the Riccati grid");

  RiccatiSolution ric;
  ric.grid = grid;
  ric.scaled_input = Eigen::MatrixXd::Zero(n, sys.actuators());
  ric.scaled_input.topRows(sys.dofs()) = sys.mass_factor.solve(sys.fem.input);
  const double dt = grid.dt();
  ric.substeps = std::max(1, static_cast<int>(std::ceil(2.0 * spectral_radius(sys) * dt / kRk4Radius)));

  const RiccatiField field(sys, ric.scaled_input);
  const bool forced = static_cast<bool>(sys.forcing);

  ric.Pi.resize(nodes);
  ric.h.resize(nodes);
  ric.Pi[grid.steps] = ops.Q_terminal;
  ric.h[grid.steps] = -ops.source_terminal;

  Eigen::MatrixXd P = ops.Q_terminal;
  Eigen::VectorXd h = -ops.source_terminal;
  const int m = ric.substeps;
  const double step = dt / m;
  for (int k = grid.steps - 1; k >= 0; --k) {
    const auto lo = static_cast<std::size_t>(k), hi = lo + 1;
    const Eigen::MatrixXd dQ = ops.Q_running[lo] - ops.Q_running[hi];
    const Eigen::VectorXd dc = ops.source_running[lo] - ops.source_running[hi];
    const double t_hi = grid.time(k + 1);

    auto stage = [&](const Eigen::MatrixXd &Ps, const Eigen::VectorXd &hs, double alpha,
                     Eigen::MatrixXd &kP, Eigen::VectorXd &kh) {
      const Eigen::MatrixXd Q = ops.Q_running[hi] + alpha * dQ;
      const Eigen::VectorXd c = ops.source_running[hi] + alpha * dc;
      kP = field.matrix(Ps, Q);
      if (forced) {
        const Eigen::VectorXd f = field.scaled_forcing(sys, t_hi - alpha * dt);
        kh = field.vector(Ps, hs, c, &f);
      } else {
        kh = field.vector(Ps, hs, c, nullptr);
      }
    };

    Eigen::MatrixXd k1P, k2P, k3P, k4P;
    Eigen::VectorXd k1h, k2h, k3h, k4h;
    for (int j = 0; j < m; ++j) {
      const double a0 = static_cast<double>(j) / m;
      const double am = (j + 0.5) / m;
      const double a1 = static_cast<double>(j + 1) / m;
      stage(P, h, a0, k1P, k1h);
      stage(P + 0.5 * step * k1P, h + 0.5 * step * k1h, am, k2P, k2h);
      stage(P + 0.5 * step * k2P, h + 0.5 * step * k2h, am, k3P, k3h);
      stage(P + step * k3P, h + step * k3h, a1, k4P, k4h);
      P += (step / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P);
      h += (step / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
      symmetrize(P);
    }
    if (!P.allFinite() || !h.allFinite())
      throw SolverError("Riccati sweep blew up at t = " + std::to_string(grid.time(k)) +
                        "; reduce the time step");
    ric.Pi[lo] = P;
    ric.h[lo] = h;
  }
  return ric;
}

Eigen::VectorXd feedback_control(const RiccatiSolution &ric, int k, const Eigen::VectorXd &y,
                                 const GalerkinSystem &sys) {
  if (y.size() != sys.size())
    throw std::invalid_argument("state has wrong size for the feedback law");
  const auto idx = static_cast<std::size_t>(k);
  const int d = sys.dofs();
  const Eigen::VectorXd mean_block = ric.Pi[idx].topRows(d) * y + ric.h[idx].head(d);
  return -ric.scaled_input.topRows(d).transpose() * mean_block;
}

FeedbackLaw feedback_law(const RiccatiSolution &ric) {
  FeedbackLaw law;
  law.grid = ric.grid;
  for (int k = 0; k < ric.grid.nodes(); ++k) {
    law.gain.push_back(ric.gain(k));
    law.offset.push_back(ric.offset(k));
  }
  return law;
}

std::pair<PceTrajectory, ControlTrajectory>
closed_loop_solve(const GalerkinSystem &sys, const RiccatiSolution &ric, const Eigen::VectorXd &y0) {
  return closed_loop_solve(sys, feedback_law(ric), y0);
}

std::pair<PceTrajectory, ControlTrajectory>
closed_loop_solve(const GalerkinSystem &sys, const FeedbackLaw &law, const Eigen::VectorXd &y0) {
  if (y0.size() != sys.dofs())
    throw std::invalid_argument("initial condition has wrong size");
  if (static_cast<int>(law.gain.size()) != law.grid.nodes() ||
      static_cast<int>(law.offset.size()) != law.grid.nodes())
    throw std::invalid_argument("feedback law is not tabulated on its grid");
  const TimeGrid &grid = law.grid;
  const double dt = grid.dt();
  const int n = sys.size(), d = sys.dofs(), na = sys.actuators();
  const CrankNicolson cn(sys.block_mass, sys.op, dt);
  const Eigen::MatrixXd U = (0.5 * dt) * sys.input_block;
  Eigen::MatrixXd Z(n, na);
  for (int i = 0; i < na; ++i)
    Z.col(i) = cn.solve(U.col(i));

  PceTrajectory y;
  y.grid = grid;
  y.modes = sys.modes();
  y.dofs = d;
  y.coeffs.resize(n, grid.nodes());
  ControlTrajectory u{grid, Eigen::MatrixXd(na, grid.nodes())};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x.head(d) = y0;
  y.coeffs.col(0) = x;
  u.values.col(0) = -(law.gain[0] * x + law.offset[0]);

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(na, na);
  for (int k = 0; k < grid.steps; ++k) {
    const Eigen::MatrixXd &G = law.gain[static_cast<std::size_t>(k + 1)];
    const Eigen::VectorXd &off = law.offset[static_cast<std::size_t>(k + 1)];
    Eigen::VectorXd rhs = cn.explicit_part() * x + U * (u.values.col(k) - off);
    if (sys.forcing)
      rhs.head(d) += 0.5 * dt * (sys.forcing_at(grid.time(k)) + sys.forcing_at(grid.time(k + 1)));
    const Eigen::VectorXd v = cn.solve(rhs);
    const Eigen::MatrixXd capacitance = identity + G * Z;
    x = v - Z * capacitance.partialPivLu().solve(G * v);
    y.coeffs.col(k + 1) = x;
    u.values.col(k + 1) = -(G * x + off);
  }
  if (!y.coeffs.allFinite() || !u.values.allFinite())
    throw SolverError("non-finite state in the closed-loop solve");
  return {std::move(y), std::move(u)};
}

} // namespace rafc
