#include "rafc/pce_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rafc {

int MultiIndex::order() const {
  return std::accumulate(entries.begin(), entries.end(), 0);
}

namespace {

void enumerate(int dimension, int budget, std::vector<int> &prefix,
               std::vector<MultiIndex> &out) {
  if (static_cast<int>(prefix.size()) == dimension) {
    out.push_back(MultiIndex{prefix});
    return;
  }
  for (int k = 0; k <= budget; ++k) {
    prefix.push_back(k);
    enumerate(dimension, budget - k, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

TotalDegreeIndexSet::TotalDegreeIndexSet(int dimension, int max_degree)
    : dimension_(dimension), max_degree_(max_degree) {
  if (dimension < 0)
    throw std::invalid_argument("index set dimension must be non-negative");
  if (max_degree < 0)
    throw std::invalid_argument("index set degree must be non-negative");
  std::vector<int> prefix;
  enumerate(dimension, max_degree, prefix, members_);
  std::stable_sort(members_.begin(), members_.end(),
                   [](const MultiIndex &a, const MultiIndex &b) {
                     const int oa = a.order(), ob = b.order();
                     if (oa != ob)
                       return oa < ob;
                     return a.entries < b.entries;
                   });
}

std::size_t TotalDegreeIndexSet::find(const MultiIndex &nu) const {
  auto it = std::find(members_.begin(), members_.end(), nu);
  return static_cast<std::size_t>(it - members_.begin());
}

TotalDegreeIndexSet build_index_set(int dimension, int max_degree) {
  return TotalDegreeIndexSet(dimension, max_degree);
}

GaussRule gauss_legendre(int points) {
  if (points < 1)
    throw std::invalid_argument("Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-type initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = points == 1 ? x : p1;
      const double pnm1 = points == 1 ? 1.0 : p0;
      dp = points * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = points == 1 ? x : p1;
    const double pnm1 = points == 1 ? 1.0 : p0;
    dp = points * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1)
    rule.nodes[points / 2] = 0.0;
  return rule;
}

double legendre_eval(int n, double xi) {
  if (n < 0)
    throw std::invalid_argument("Legendre degree must be non-negative");
  if (!(std::abs(xi) <= 1.0))
    throw std::domain_error("Legendre argument outside [-1, 1]: " + std::to_string(xi));
  if (n == 0)
    return 1.0;
  double p0 = 1.0, p1 = xi;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return std::sqrt(2.0 * n + 1.0) * p1;
}

double tensor_legendre_eval(const MultiIndex &nu, std::span<const double> sigma) {
  if (nu.dimension() != sigma.size())
    throw std::invalid_argument("multi-index and parameter point differ in dimension");
  double value = 1.0;
  for (std::size_t j = 0; j < sigma.size(); ++j)
    value *= legendre_eval(nu.entries[j], sigma[j]);
  return value;
}

Eigen::VectorXd basis_values(const TotalDegreeIndexSet &set, std::span<const double> sigma) {
  if (static_cast<int>(sigma.size()) != set.dimension())
    throw std::invalid_argument("parameter point has wrong dimension");
  // Tabulate univariate values once per component.
  const int p = set.max_degree();
  Eigen::MatrixXd table(set.dimension(), p + 1);
  for (int j = 0; j < set.dimension(); ++j)
    for (int n = 0; n <= p; ++n)
      table(j, n) = legendre_eval(n, sigma[j]);
  Eigen::VectorXd values(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    double v = 1.0;
    for (int j = 0; j < set.dimension(); ++j)
      v *= table(j, set[i].entries[j]);
    values[static_cast<Eigen::Index>(i)] = v;
  }
  return values;
}

Eigen::MatrixXd multiplication_matrix(int component, const TotalDegreeIndexSet &set) {
  if (component < 0 || component >= set.dimension())
    throw std::out_of_range("multiplication matrix component out of range");
  const int p = set.max_degree();
  const GaussRule rule = gauss_legendre(p + 2);

  // Univariate table <xi L_a, L_b> for degrees up to p.
  Eigen::MatrixXd univariate = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double xi = rule.nodes[q];
    const double w = 0.5 * rule.weights[q];
    for (int a = 0; a <= p; ++a)
      for (int b = 0; b <= p; ++b)
        univariate(a, b) += w * xi * legendre_eval(a, xi) * legendre_eval(b, xi);
  }

  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto &nu = set[static_cast<std::size_t>(r)].entries;
      const auto &m = set[static_cast<std::size_t>(c)].entries;
      bool others_agree = true;
      for (int i = 0; i < set.dimension(); ++i)
        if (i != component && nu[i] != m[i])
          others_agree = false;
      if (!others_agree || std::abs(nu[component] - m[component]) != 1)
        continue;
      result(r, c) = univariate(nu[component], m[component]);
    }
  }
  return result;
}

} // namespace rafc
