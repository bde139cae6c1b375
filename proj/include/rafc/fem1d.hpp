#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rafc {

/// Uniform mesh of the unit interval.
struct Mesh1D {
  double h = 0.0;
  std::vector<double> nodes;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int cell_count() const { return node_count() - 1; }

  static Mesh1D uniform(int cells);
};

/// Builds the uniform mesh with width h; 1/h must be an integer >= 2.
Mesh1D build_mesh(double h);

/// Disjoint actuator supports O_i inside [0, 1] with a common gain.
struct ActuatorSet {
  std::vector<std::pair<double, double>> intervals;
  double scaling = 1.0;

  int count() const { return static_cast<int>(intervals.size()); }
  void validate() const;
};

using ScalarField = std::function<double(double)>;

/// P1 matrices for the Neumann problem on (0, 1).
struct FemMatrices {
  Eigen::MatrixXd mass;                 // M
  Eigen::MatrixXd stiffness;            // S
  Eigen::MatrixXd reaction_mean;        // int cbar phi_k phi_l
  std::vector<Eigen::MatrixXd> reaction; // int psi_j phi_k phi_l
  Eigen::MatrixXd input;                // B_h, d x N_a (load vectors)
  Eigen::MatrixXd observation;          // C in nodal coordinates (identity)

  int dofs() const { return static_cast<int>(mass.rows()); }
  int actuators() const { return static_cast<int>(input.cols()); }
  int parameters() const { return static_cast<int>(reaction.size()); }

  /// Matrix of the form <Cv, Cw>_H, i.e. C^T M C.
  Eigen::MatrixXd observation_weight() const;
};

/// Reaction matrix int c(x) phi_k phi_l dx by 4-point Gauss per element.
Eigen::MatrixXd reaction_matrix(const Mesh1D &mesh, const ScalarField &c);

FemMatrices assemble(const Mesh1D &mesh, const ScalarField &reaction_mean,
                     const std::vector<ScalarField> &psi, const ActuatorSet &actuators);

/// sqrt(v^T M v).
double h_norm(const Eigen::VectorXd &v, const Eigen::MatrixXd &mass);

/// Nodal interpolant of f on the mesh.
Eigen::VectorXd interpolate(const Mesh1D &mesh, const ScalarField &f);

} // namespace rafc
