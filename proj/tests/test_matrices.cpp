#include <doctest.h>

#include <random>

#include "colmet/errors.hpp"
#include "colmet/matrices.hpp"
#include "helpers/oracles.hpp"

using namespace colmet;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(gen);
  return m;
}

}  // namespace

TEST_CASE("demean_rows") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 3, 0, 0, 2, 2;
  const Eigen::MatrixXd d = demean_rows(m);
  CHECK(d(0, 0) == doctest::Approx(-1.0));
  CHECK(d(0, 1) == doctest::Approx(1.0));
  CHECK(d(1, 0) == 0.0);  // all-zero row is a fixed point
  CHECK(d(2, 0) == 0.0);  // constant row
  CHECK(d(2, 1) == 0.0);
}

TEST_CASE("demeaned rows sum to zero within tolerance") {
  const Eigen::MatrixXd d = demean_rows(random_matrix(6, 42, 3));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    CHECK(std::abs(d.row(i).sum()) < 1e-12 * 42);
  }
}

TEST_CASE("standardize_rows uses the 1/T convention") {
  Eigen::MatrixXd m(2, 2);
  m << -1, 1, 0, 4;
  const StandardizeResult r = standardize_rows(m);
  CHECK(r.degenerate_rows.empty());
  // Row [-1,1]: mean 0, std over T = 1 -> unchanged.
  CHECK(r.values(0, 0) == doctest::Approx(-1.0));
  CHECK(r.values(0, 1) == doctest::Approx(1.0));
  // Row [0,4]: demeaned [-2,2], std = 2 -> [-1,1].
  CHECK(r.values(1, 0) == doctest::Approx(-1.0));
  CHECK(r.values(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("constant row is flagged degenerate and zeroed") {
  Eigen::MatrixXd m(2, 3);
  m << 5, 5, 5, 1, 2, 3;
  const StandardizeResult r = standardize_rows(m);
  REQUIRE(r.degenerate_rows == std::vector<Eigen::Index>{0});
  CHECK(r.values.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardized rows have unit standard deviation") {
  const StandardizeResult r = standardize_rows(random_matrix(5, 42, 4));
  for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
    const double sd = std::sqrt(r.values.row(i).squaredNorm() / 42.0);
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("covariance of tiny analytic matrices") {
  Eigen::MatrixXd a(2, 2);
  SUBCASE("identical rows") {
    a << -1, 1, -1, 1;
    const SymmetricMatrix s = covariance(a);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(0, 1) == doctest::Approx(1.0));
    CHECK(s(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("anti-aligned rows") {
    a << -1, 1, 1, -1;
    const SymmetricMatrix s = covariance(a);
    CHECK(s(0, 1) == doctest::Approx(-1.0));
  }
}

TEST_CASE("covariance matches the elementwise oracle") {
  const Eigen::MatrixXd a = demean_rows(random_matrix(4, 10, 5));
  const SymmetricMatrix s = covariance(a);
  const oracle::Matrix expected = oracle::covariance(oracle::from_eigen(a));
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK(s(i, j) == doctest::Approx(expected[std::size_t(i)][std::size_t(j)]).epsilon(1e-12));
}

TEST_CASE("correlation basics") {
  SUBCASE("identical rows are perfectly correlated") {
    Eigen::MatrixXd m(2, 4);
    m << 1, -1, 1, -1, 1, -1, 1, -1;
    const SymmetricMatrix c = correlation(standardize_rows(m).values);
    CHECK(c(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal rows are uncorrelated") {
    Eigen::MatrixXd m(2, 4);
    m << 1, -1, 1, -1, 1, 1, -1, -1;
    const SymmetricMatrix c = correlation(standardize_rows(m).values);
    CHECK(c(0, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("correlation equals the oracle correlation of raw rows") {
  const Eigen::MatrixXd raw = random_matrix(5, 42, 6);
  const SymmetricMatrix c = correlation(standardize_rows(raw).values);
  const oracle::Matrix expected = oracle::correlation(oracle::from_eigen(raw));
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(c(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(c(i, j) == doctest::Approx(expected[std::size_t(i)][std::size_t(j)]).epsilon(1e-10));
      CHECK(std::abs(c(i, j)) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("degenerate row yields zero column with unit diagonal") {
  Eigen::MatrixXd m(3, 4);
  m << 7, 7, 7, 7, 1, 2, 3, 4, 4, 3, 2, 1;
  const SymmetricMatrix c = correlation(standardize_rows(m).values);
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(0, 2) == 0.0);
  CHECK(c(1, 2) == doctest::Approx(-1.0));
}

TEST_CASE("mean_with_diagonal") {
  CHECK(mean_with_diagonal(SymmetricMatrix(Eigen::MatrixXd::Identity(4, 4),
                                           MatrixKind::Covariance)) == doctest::Approx(0.25));
  CHECK(mean_with_diagonal(SymmetricMatrix(Eigen::MatrixXd::Ones(5, 5),
                                           MatrixKind::Covariance)) == doctest::Approx(1.0));
  const Eigen::MatrixXd g = random_matrix(6, 6, 7);
  const SymmetricMatrix s(g * g.transpose(), MatrixKind::Covariance);
  CHECK(mean_with_diagonal(s) ==
        doctest::Approx(oracle::mean_withdiag(oracle::from_eigen(s.matrix()))).epsilon(1e-12));
}

TEST_CASE("mean_offdiagonal") {
  CHECK(mean_offdiagonal(SymmetricMatrix(Eigen::MatrixXd::Identity(4, 4),
                                         MatrixKind::Covariance)) == doctest::Approx(0.0));
  CHECK(mean_offdiagonal(SymmetricMatrix(Eigen::MatrixXd::Ones(5, 5),
                                         MatrixKind::Covariance)) == doctest::Approx(1.0));
  CHECK(mean_offdiagonal(SymmetricMatrix(Eigen::MatrixXd::Ones(2, 2),
                                         MatrixKind::Covariance)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mean_offdiagonal(SymmetricMatrix(Eigen::MatrixXd::Ones(1, 1),
                                                   MatrixKind::Covariance)),
                  ConfigError);
}

TEST_CASE("with-diagonal mean decomposes into off-diagonal mean and trace") {
  std::mt19937 gen(8);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index k = 2 + Eigen::Index(gen() % 7);
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) m(i, j) = normal(gen);
    const SymmetricMatrix s(m, MatrixKind::Covariance);
    const double kk = double(k);
    const double expected = ((kk - 1.0) / kk) * mean_offdiagonal(s) +
                            s.matrix().trace() / (kk * kk);
    CHECK(mean_with_diagonal(s) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("covariance is invariant under constant row shifts") {
  const Eigen::MatrixXd raw = random_matrix(4, 20, 9);
  Eigen::MatrixXd shifted = raw;
  shifted.row(2).array() += 17.5;
  const SymmetricMatrix s1 = covariance(demean_rows(raw));
  const SymmetricMatrix s2 = covariance(demean_rows(shifted));
  CHECK((s1.matrix() - s2.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-square input is rejected") {
  CHECK_THROWS_AS(SymmetricMatrix(Eigen::MatrixXd::Ones(2, 3), MatrixKind::Covariance),
                  ConfigError);
}
