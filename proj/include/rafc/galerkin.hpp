#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rafc/fem1d.hpp"
#include "rafc/pce_basis.hpp"

namespace rafc {

/// Uniform time grid t_k = k T / n_t, k = 0..n_t.
struct TimeGrid {
  double horizon = 0.0;
  int steps = 0;

  TimeGrid() = default;
  TimeGrid(double horizon, int steps);

  double dt() const { return horizon / steps; }
  double time(int k) const { return horizon * k / steps; }
  int nodes() const { return steps + 1; }

  /// Trapezoid weights, dt/2 at the ends and dt inside.
  Eigen::VectorXd trapezoid_weights() const;

  friend bool operator==(const TimeGrid &, const TimeGrid &) = default;
};

/// Chaos coefficients per time node. Column k stacks the K+1 mode blocks of
/// length d (mode-major); block 0 is the mean mode.
struct PceTrajectory {
  TimeGrid grid;
  int modes = 0;
  int dofs = 0;
  Eigen::MatrixXd coeffs;

  auto block(int mode, int k) const { return coeffs.col(k).segment(mode * dofs, dofs); }
};

/// Actuator signal per time node (N_a x (n_t + 1)).
struct ControlTrajectory {
  TimeGrid grid;
  Eigen::MatrixXd values;

  static ControlTrajectory zero(const TimeGrid &grid, int actuators);
};

/// FEM nodal values per time node (d x (n_t + 1)).
struct NodalTrajectory {
  TimeGrid grid;
  Eigen::MatrixXd values;
};

/// Weak-form load f(t) acting on the mean mode; empty means f = 0.
using Forcing = std::function<Eigen::VectorXd(double)>;

/// Stochastic Galerkin system (I (x) M) y' = K y + B u + f e_0 for an operator
/// with affine parameter dependence A(sigma) = A_0 + sum_j sigma_j A_j.
struct GalerkinSystem {
  TotalDegreeIndexSet index_set{0, 0};
  FemMatrices fem;
  double diffusion = 0.0;

  Eigen::MatrixXd base_operator;                 // A_0
  std::vector<Eigen::MatrixXd> parameter_operators; // A_j
  std::vector<Eigen::MatrixXd> multiplication;   // M_j in the chaos basis

  Eigen::MatrixXd block_mass;  // I (x) M
  Eigen::MatrixXd op;          // assembled coupled operator
  Eigen::MatrixXd input_block; // B_h injected into mode 0
  Forcing forcing;

  Eigen::LLT<Eigen::MatrixXd> mass_factor; // of the FEM mass M

  int dofs() const { return static_cast<int>(fem.mass.rows()); }
  int modes() const { return static_cast<int>(index_set.size()); }
  int size() const { return dofs() * modes(); }
  int actuators() const { return static_cast<int>(fem.input.cols()); }

  /// Structured apply of the coupled operator without the dense matrix.
  Eigen::VectorXd apply(const Eigen::VectorXd &y) const;

  /// Operator A(sigma) of one deterministic realization.
  Eigen::MatrixXd realization_operator(std::span<const double> sigma) const;

  Eigen::VectorXd forcing_at(double t) const;
};

/// A_0 = -(diffusion S + reaction_mean), A_j = -reaction_j.
GalerkinSystem assemble_system(const TotalDegreeIndexSet &set, const FemMatrices &fem,
                               double diffusion, Forcing forcing = {});

/// Deterministic system of dimension d with one chaos mode; used for plain
/// LQR problems (mass, operator and input given directly).
GalerkinSystem make_deterministic_system(const Eigen::MatrixXd &mass,
                                         const Eigen::MatrixXd &op,
                                         const Eigen::MatrixXd &input);

/// Crank-Nicolson stepper for mass x' = op x + input u + f with one fixed
/// factorization of (mass - dt/2 op).
class CrankNicolson {
public:
  CrankNicolson(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &op, double dt);

  /// x_{k+1} given x_k and an already scaled load dt * (B u + f)_{k+1/2}.
  Eigen::VectorXd step(const Eigen::VectorXd &x, const Eigen::VectorXd &load) const;

  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const { return lu_.solve(rhs); }
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd &rhs) const {
    return lu_.transpose().solve(rhs);
  }
  const Eigen::MatrixXd &explicit_part() const { return rhs_matrix_; }

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd rhs_matrix_;
};

/// Solves mass x' = op x + input u + f from x(0) = x0 with midpoint loads.
Eigen::MatrixXd crank_nicolson_solve(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &op,
                                     const Eigen::MatrixXd &input, const ControlTrajectory &u,
                                     const Eigen::VectorXd &x0, const Forcing &forcing);

/// Galerkin forward solve; y0 is deterministic and enters mode 0 only.
PceTrajectory forward_solve(const GalerkinSystem &sys, const ControlTrajectory &u,
                            const Eigen::VectorXd &y0);

/// Deterministic solve of one realization A(sigma).
NodalTrajectory sample_path_solve(const GalerkinSystem &sys, std::span<const double> sigma,
                                  const ControlTrajectory &u, const Eigen::VectorXd &y0);

/// Evaluates sum_nu y_nu(t) L_nu(sigma) at every time node.
NodalTrajectory surrogate_eval(const PceTrajectory &y, const TotalDegreeIndexSet &set,
                               std::span<const double> sigma);

/// Nodal vector of the surrogate at one node for precomputed basis values.
Eigen::VectorXd surrogate_at(const PceTrajectory &y, int k, const Eigen::VectorXd &basis);

/// ||C (y(t_k) - g(t_k))||_H per time node.
Eigen::VectorXd tracking_error(const NodalTrajectory &path, const NodalTrajectory &target,
                               const FemMatrices &fem);

} // namespace rafc
