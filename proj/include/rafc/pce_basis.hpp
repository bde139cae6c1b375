#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rafc {

/// Multi-index nu = (nu_1, ..., nu_s) labelling one tensorized Legendre polynomial.
struct MultiIndex {
  std::vector<int> entries;

  int order() const;
  std::size_t dimension() const { return entries.size(); }

  friend bool operator==(const MultiIndex &, const MultiIndex &) = default;
};

/// Total-degree set {nu : |nu| <= p} in graded lexicographic order.
///
/// Position 0 always holds the zero multi-index; the Galerkin layout relies on
/// it to carry the mean (deterministic) chaos mode.
class TotalDegreeIndexSet {
public:
  TotalDegreeIndexSet(int dimension, int max_degree);

  int dimension() const { return dimension_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return members_.size(); }
  const MultiIndex &operator[](std::size_t i) const { return members_[i]; }
  const std::vector<MultiIndex> &members() const { return members_; }

  /// Position of `nu` in the ordering, or size() when absent.
  std::size_t find(const MultiIndex &nu) const;

private:
  int dimension_;
  int max_degree_;
  std::vector<MultiIndex> members_;
};

TotalDegreeIndexSet build_index_set(int dimension, int max_degree);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int points);

/// Legendre polynomial of degree n normalized so that its mean square over
/// [-1, 1] under d(xi)/2 equals one. Throws std::domain_error for |xi| > 1.
double legendre_eval(int n, double xi);

/// Product of normalized univariate Legendre polynomials.
double tensor_legendre_eval(const MultiIndex &nu, std::span<const double> sigma);

/// Values of all basis polynomials at one parameter point, in index-set order.
Eigen::VectorXd basis_values(const TotalDegreeIndexSet &set, std::span<const double> sigma);

/// Galerkin matrix of multiplication by sigma_j (0-based component) in the
/// chaos basis: entry (nu, m) = <sigma_j L_nu, L_m>.
Eigen::MatrixXd multiplication_matrix(int component, const TotalDegreeIndexSet &set);

} // namespace rafc
