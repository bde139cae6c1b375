#include "support.hpp"

#include <cmath>

namespace rafc::testing {

ExperimentConfig small_config(int cells, int parameters, int degree, int steps, int samples,
                              double theta) {
  ExperimentConfig c;
  c.discretization.h = 1.0 / cells;
  c.discretization.time_steps = steps;
  c.discretization.degree = degree;
  c.pde.parameters = parameters;
  c.risk.samples = samples;
  c.risk.theta = theta;
  return c;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng &rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

double trapezoid_dot(const ControlTrajectory &a, const ControlTrajectory &b) {
  const Eigen::VectorXd w = a.grid.trapezoid_weights();
  return (a.values.cwiseProduct(b.values).colwise().sum().transpose().cwiseProduct(w)).sum();
}

std::shared_ptr<GalerkinSystem> small_system(int cells, int s, int p, double cbar,
                                             bool zero_psi) {
  const Mesh1D mesh = build_mesh(1.0 / cells);
  auto psi = trig_decay_modes(s, 2.0);
  if (zero_psi)
    for (auto &f : psi)
      f = [](double) { return 0.0; };
  ActuatorSet act;
  act.intervals = {{0.1, 0.3}, {0.4, 0.6}, {0.7, 0.9}};
  act.scaling = std::sqrt(10.0);
  const FemMatrices fem = assemble(mesh, [cbar](double) { return cbar; }, psi, act);
  return std::make_shared<GalerkinSystem>(assemble_system(build_index_set(s, p), fem, 0.5));
}

// Direct evaluation of the second-derivative bilinear form at the nodes:
// sum_i w_i om_i <W d1(s_i), d2(s_i)> + 2 theta Cov_om(<W r_i, d1(s_i)>, <W r_i, d2(s_i)>).
double bilinear_oracle(const GalerkinSystem &sys, const SampleNodeSet &nodes,
                       const Eigen::VectorXd &ybar, const Eigen::VectorXd &g,
                       const Eigen::VectorXd &omega, double theta, const Eigen::VectorXd &d1,
                       const Eigen::VectorXd &d2) {
  const int d = sys.dofs(), N = nodes.size();
  const Eigen::MatrixXd W = sys.fem.observation_weight();
  auto at = [&](const Eigen::VectorXd &coeffs, int i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    const Eigen::RowVectorXd pt = nodes.points.row(i);
    for (std::size_t m = 0; m < sys.index_set.size(); ++m)
      v += tensor_legendre_eval(sys.index_set[m], {pt.data(), static_cast<std::size_t>(pt.size())}) *
           coeffs.segment(static_cast<Eigen::Index>(m) * d, d);
    return v;
  };
  double mean_part = 0.0;
  Eigen::VectorXd a(N), b(N);
  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd e1 = at(d1, i), e2 = at(d2, i), r = at(ybar, i) - g;
    mean_part += nodes.weights[i] * omega[i] * e1.dot(W * e2);
    a[i] = r.dot(W * e1);
    b[i] = r.dot(W * e2);
  }
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (int i = 0; i < N; ++i) {
    sab += omega[i] * a[i] * b[i];
    sa += omega[i] * a[i];
    sb += omega[i] * b[i];
  }
  const double cov = (N * sab - sa * sb) / (static_cast<double>(N) * (N - 1));
  return mean_part + 2.0 * theta * cov;
}

std::pair<double, double> ScalarRiccati::at(double T, double t_end, int steps) const {
  double P = qT, h = -cT;
  const double dtau = (T - t_end) / steps;
  auto fP = [&](double p) { return 2 * a * p - b * b * p * p + q; };
  auto fh = [&](double p, double x, double t) { return (a - b * b * p) * x - source(t); };
  for (int i = 0; i < steps; ++i) {
    const double t = T - i * dtau;
    const double k1 = fP(P), l1 = fh(P, h, t);
    const double k2 = fP(P + 0.5 * dtau * k1), l2 = fh(P + 0.5 * dtau * k1, h + 0.5 * dtau * l1, t - 0.5 * dtau);
    const double k3 = fP(P + 0.5 * dtau * k2), l3 = fh(P + 0.5 * dtau * k2, h + 0.5 * dtau * l2, t - 0.5 * dtau);
    const double k4 = fP(P + dtau * k3), l4 = fh(P + dtau * k3, h + dtau * l3, t - dtau);
    P += dtau / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    h += dtau / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
  }
  return {P, h};
}

} // namespace rafc::testing
