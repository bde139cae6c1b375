#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rafc/pce_basis.hpp"

using namespace rafc;

namespace {

// Mean of f over [-1,1] by a dense composite midpoint rule; independent of
// the Gauss routine under test.
template <class F> double midpoint_mean(F f, int cells = 20000) {
  double sum = 0.0;
  for (int i = 0; i < cells; ++i)
    sum += f(-1.0 + (i + 0.5) * 2.0 / cells);
  return sum / cells;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

} // namespace

TEST_SUITE("pce_basis") {

TEST_CASE("index set sizes") {
  CHECK(build_index_set(2, 2).size() == 6);
  CHECK(build_index_set(3, 2).size() == 10);
  const auto trivial = build_index_set(1, 0);
  REQUIRE(trivial.size() == 1);
  CHECK(trivial[0].entries == std::vector<int>{0});
  for (int s = 1; s <= 4; ++s)
    for (int p = 0; p <= 4; ++p)
      CHECK(build_index_set(s, p).size() == static_cast<std::size_t>(binomial(s + p, s)));
}

TEST_CASE("graded order with the zero index first") {
  const auto set = build_index_set(3, 3);
  CHECK(set[0].order() == 0);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const auto &a = set[i - 1];
    const auto &b = set[i];
    CHECK((a.order() < b.order() || (a.order() == b.order() && a.entries < b.entries)));
    CHECK(b.order() <= 3);
    for (int e : b.entries)
      CHECK(e >= 0);
  }
  const auto two = build_index_set(2, 2);
  const std::vector<std::vector<int>> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(two[i].entries == expected[i]);
  CHECK(two.find(MultiIndex{{1, 1}}) == 4);
  CHECK(two.find(MultiIndex{{3, 0}}) == two.size());
}

TEST_CASE("legendre values") {
  CHECK(legendre_eval(0, 0.3) == 1.0);
  CHECK(legendre_eval(0, -1.0) == 1.0);
  CHECK(legendre_eval(1, 0.5) == doctest::Approx(0.8660254037844386).epsilon(1e-15));
  CHECK(legendre_eval(2, 1.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(legendre_eval(2, 1.0000001), std::domain_error);
  CHECK_THROWS_AS(legendre_eval(0, -2.0), std::domain_error);
}

TEST_CASE("normalization against an independent rule") {
  for (int n = 0; n <= 4; ++n) {
    const double mean_sq = midpoint_mean([n](double x) { return std::pow(legendre_eval(n, x), 2); });
    CHECK(mean_sq == doctest::Approx(1.0).epsilon(1e-7));
  }
  // 64-point Gauss for degree 2, cross-checked against the midpoint result above.
  const GaussRule g = gauss_legendre(64);
  double s = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q)
    s += 0.5 * g.weights[q] * std::pow(legendre_eval(2, g.nodes[q]), 2);
  CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("gauss rule integrates polynomials exactly") {
  for (int n = 1; n <= 8; ++n) {
    const GaussRule g = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : g.weights)
      wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int q = 0; q < n; ++q)
        s += g.weights[q] * std::pow(g.nodes[q], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("tensor legendre") {
  const double sigma[2] = {0.5, 0.9};
  CHECK(tensor_legendre_eval(MultiIndex{{0, 0}}, sigma) == 1.0);
  CHECK(tensor_legendre_eval(MultiIndex{{1, 0}}, sigma) == doctest::Approx(legendre_eval(1, 0.5)));
  const double ab[2] = {-0.3, 0.7};
  CHECK(tensor_legendre_eval(MultiIndex{{1, 1}}, ab) == doctest::Approx(3 * -0.3 * 0.7));
  const double one[1] = {0.1};
  CHECK_THROWS_AS(tensor_legendre_eval(MultiIndex{{1, 1}}, one), std::invalid_argument);
  const auto set = build_index_set(2, 2);
  const Eigen::VectorXd v = basis_values(set, ab);
  for (std::size_t i = 0; i < set.size(); ++i)
    CHECK(v[static_cast<Eigen::Index>(i)] == doctest::Approx(tensor_legendre_eval(set[i], ab)));
}

TEST_CASE("orthonormality of the tensor basis") {
  for (int s = 1; s <= 2; ++s) {
    for (int p = 0; p <= 3; ++p) {
      const auto set = build_index_set(s, p);
      const GaussRule g = gauss_legendre(p + 1);
      const int q = static_cast<int>(g.nodes.size());
      const int total = s == 1 ? q : q * q;
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(set.size(), set.size());
      for (int flat = 0; flat < total; ++flat) {
        std::vector<double> sigma(s);
        double w = 1.0;
        int rem = flat;
        for (int j = 0; j < s; ++j) {
          sigma[j] = g.nodes[rem % q];
          w *= 0.5 * g.weights[rem % q];
          rem /= q;
        }
        const Eigen::VectorXd b = basis_values(set, sigma);
        gram += w * b * b.transpose();
      }
      const double err = (gram - Eigen::MatrixXd::Identity(set.size(), set.size())).cwiseAbs().maxCoeff();
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("multiplication matrix") {
  const Eigen::MatrixXd m = multiplication_matrix(0, build_index_set(1, 1));
  CHECK(m(0, 0) == 0.0);
  CHECK(m(1, 1) == 0.0);
  CHECK(m(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(m(1, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  const auto set = build_index_set(2, 2);
  const Eigen::MatrixXd m0 = multiplication_matrix(0, set);
  CHECK(m0(set.find(MultiIndex{{2, 0}}), set.find(MultiIndex{{0, 0}})) == 0.0);
  CHECK_THROWS(multiplication_matrix(2, set));

  for (int s = 1; s <= 3; ++s) {
    const auto big = build_index_set(s, 3);
    for (int j = 0; j < s; ++j) {
      const Eigen::MatrixXd mj = multiplication_matrix(j, big);
      CHECK((mj - mj.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (std::size_t a = 0; a < big.size(); ++a) {
        for (std::size_t b = 0; b < big.size(); ++b) {
          bool neighbours = true;
          for (int i = 0; i < s; ++i) {
            const int diff = std::abs(big[a].entries[i] - big[b].entries[i]);
            neighbours = neighbours && (i == j ? diff == 1 : diff == 0);
          }
          const double v = mj(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          if (!neighbours) {
            CHECK(v == 0.0);
          } else {
            // Oracle: mean of sigma_j L_a L_b by the midpoint rule.
            const int na = big[a].entries[j], nb = big[b].entries[j];
            const double ref = midpoint_mean(
                [na, nb](double x) { return x * legendre_eval(na, x) * legendre_eval(nb, x); });
            CHECK(v == doctest::Approx(ref).epsilon(1e-7));
          }
        }
      }
    }
  }
}

TEST_CASE("zero-dimensional set") {
  const auto set = build_index_set(0, 3);
  REQUIRE(set.size() == 1);
  const Eigen::VectorXd b = basis_values(set, {});
  CHECK(b.size() == 1);
  CHECK(b[0] == 1.0);
}

}
