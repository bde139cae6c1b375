#include "rafc/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rafc/pce_basis.hpp"

namespace rafc {

Mesh1D Mesh1D::uniform(int cells) {
  if (cells < 2)
    throw std::invalid_argument("mesh needs at least two cells");
  Mesh1D mesh;
  mesh.h = 1.0 / cells;
  mesh.nodes.resize(cells + 1);
  for (int k = 0; k <= cells; ++k)
    mesh.nodes[k] = static_cast<double>(k) / cells;
  return mesh;
}

Mesh1D build_mesh(double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("mesh width must be positive");
  const double cells = 1.0 / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * rounded)
    throw std::invalid_argument("1/h must be an integer, got 1/h = " + std::to_string(cells));
  return Mesh1D::uniform(static_cast<int>(rounded));
}

void ActuatorSet::validate() const {
  if (!(scaling > 0.0) || !std::isfinite(scaling))
    throw std::invalid_argument("actuator scaling must be positive");
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [a, b] = sorted[i];
    if (!(0.0 <= a && a < b && b <= 1.0))
      throw std::invalid_argument("actuator interval must satisfy 0 <= a < b <= 1");
    if (i > 0 && sorted[i - 1].second > a)
      throw std::invalid_argument("actuator intervals overlap");
  }
}

Eigen::MatrixXd FemMatrices::observation_weight() const {
  return observation.transpose() * mass * observation;
}

Eigen::MatrixXd reaction_matrix(const Mesh1D &mesh, const ScalarField &c) {
  const int d = mesh.node_count();
  const GaussRule rule = gauss_legendre(4);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int e = 0; e < mesh.cell_count(); ++e) {
    const double x0 = mesh.nodes[e], x1 = mesh.nodes[e + 1];
    const double len = x1 - x0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (rule.nodes[q] + 1.0); // local coordinate in [0,1]
      const double x = x0 + s * len;
      const double w = 0.5 * rule.weights[q] * len * c(x);
      const double phi[2] = {1.0 - s, s};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          out(e + a, e + b) += w * phi[a] * phi[b];
    }
  }
  return out;
}

FemMatrices assemble(const Mesh1D &mesh, const ScalarField &reaction_mean,
                     const std::vector<ScalarField> &psi, const ActuatorSet &actuators) {
  actuators.validate();
  const int d = mesh.node_count();
  const double h = mesh.h;

  FemMatrices fem;
  fem.mass = Eigen::MatrixXd::Zero(d, d);
  fem.stiffness = Eigen::MatrixXd::Zero(d, d);
  for (int e = 0; e < mesh.cell_count(); ++e) {
    fem.mass(e, e) += h / 3.0;
    fem.mass(e + 1, e + 1) += h / 3.0;
    fem.mass(e, e + 1) += h / 6.0;
    fem.mass(e + 1, e) += h / 6.0;
    fem.stiffness(e, e) += 1.0 / h;
    fem.stiffness(e + 1, e + 1) += 1.0 / h;
    fem.stiffness(e, e + 1) -= 1.0 / h;
    fem.stiffness(e + 1, e) -= 1.0 / h;
  }

  fem.reaction_mean = reaction_matrix(mesh, reaction_mean);
  fem.reaction.reserve(psi.size());
  for (const auto &f : psi)
    fem.reaction.push_back(reaction_matrix(mesh, f));

  // Exact integrals of hat functions over the covered part of each element.
  fem.input = Eigen::MatrixXd::Zero(d, actuators.count());
  for (int i = 0; i < actuators.count(); ++i) {
    const auto [a, b] = actuators.intervals[static_cast<std::size_t>(i)];
    for (int e = 0; e < mesh.cell_count(); ++e) {
      const double x0 = mesh.nodes[e], x1 = mesh.nodes[e + 1];
      const double lo = std::max(a, x0), hi = std::min(b, x1);
      if (hi <= lo)
        continue;
      const double mid = 0.5 * (lo + hi);
      const double len = hi - lo;
      fem.input(e, i) += actuators.scaling * len * (x1 - mid) / h;
      fem.input(e + 1, i) += actuators.scaling * len * (mid - x0) / h;
    }
  }

  fem.observation = Eigen::MatrixXd::Identity(d, d);
  return fem;
}

double h_norm(const Eigen::VectorXd &v, const Eigen::MatrixXd &mass) {
  return std::sqrt(std::max(0.0, v.dot(mass * v)));
}

Eigen::VectorXd interpolate(const Mesh1D &mesh, const ScalarField &f) {
  Eigen::VectorXd v(mesh.node_count());
  for (int k = 0; k < mesh.node_count(); ++k)
    v[k] = f(mesh.nodes[k]);
  return v;
}

} // namespace rafc
