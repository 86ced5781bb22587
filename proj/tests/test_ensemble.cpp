#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "colmet/ensemble.hpp"
#include "colmet/errors.hpp"
#include "colmet/rng.hpp"
#include "colmet/spectral.hpp"
#include "helpers/oracles.hpp"

using namespace colmet;

namespace {

BlockSpec make_spec(std::vector<Eigen::Index> sizes, std::vector<double> values, double offset,
                    double diag = 1.0) {
  BlockSpec spec;
  spec.block_sizes = std::move(sizes);
  spec.block_values = std::move(values);
  spec.market_offset = offset;
  spec.diagonal_value = diag;
  return spec;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

}  // namespace

TEST_CASE("build_population") {
  SUBCASE("two blocks, no offset") {
    const SymmetricMatrix sigma0 = build_population(make_spec({2, 2}, {0.5, 0.5}, 0.0));
    Eigen::MatrixXd expected(4, 4);
    expected << 1, 0.5, 0, 0, 0.5, 1, 0, 0, 0, 0, 1, 0.5, 0, 0, 0.5, 1;
    CHECK((sigma0.matrix() - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("offset fills the off-block entries but not the diagonal") {
    const SymmetricMatrix sigma0 = build_population(make_spec({2, 2}, {0.3, 0.4}, 0.2));
    CHECK(sigma0(0, 1) == doctest::Approx(0.5));
    CHECK(sigma0(2, 3) == doctest::Approx(0.6));
    CHECK(sigma0(0, 2) == doctest::Approx(0.2));
    CHECK(sigma0(1, 3) == doctest::Approx(0.2));
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(sigma0(i, i) == doctest::Approx(1.0));
  }
  SUBCASE("zero block value gives an offset-only population") {
    const SymmetricMatrix sigma0 = build_population(make_spec({4}, {0.0}, 0.25));
    CHECK(sigma0(0, 3) == doctest::Approx(0.25));
    CHECK(sigma0(1, 2) == doctest::Approx(0.25));
    CHECK(sigma0(2, 2) == doctest::Approx(1.0));
  }
  SUBCASE("indefinite population is rejected with its smallest eigenvalue") {
    // Size-2 block with b=2 and unit diagonal has eigenvalues 1±2.
    CHECK_THROWS_WITH_AS(build_population(make_spec({2}, {2.0}, 0.0)),
                         doctest::Contains("positive semidefinite"), ConfigError);
    CHECK_THROWS_WITH_AS(build_population(make_spec({2}, {2.0}, 0.0)),
                         doctest::Contains("smallest eigenvalue -"), ConfigError);
  }
  SUBCASE("spec validation") {
    CHECK_THROWS_AS(build_population(make_spec({}, {}, 0.0)), ConfigError);
    CHECK_THROWS_AS(build_population(make_spec({2, 2}, {0.5}, 0.0)), ConfigError);
    CHECK_THROWS_AS(build_population(make_spec({0}, {0.5}, 0.0)), ConfigError);
    CHECK_THROWS_AS(build_population(make_spec({2}, {-0.1}, 0.0)), ConfigError);
    CHECK(make_spec({3, 4, 5}, {0.1, 0.1, 0.1}, 0.0).dimension() == 12);
  }
}

TEST_CASE("sample_wishart") {
  SUBCASE("zero population draws the zero matrix") {
    const SymmetricMatrix zero(Eigen::MatrixXd::Zero(3, 3), MatrixKind::Covariance);
    const SymmetricMatrix sample = sample_wishart(zero, 10, 42);
    CHECK(sample.matrix().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("deterministic per seed") {
    const SymmetricMatrix sigma0 = build_population(make_spec({2, 2}, {0.3, 0.4}, 0.1));
    const SymmetricMatrix a = sample_wishart(sigma0, 42, 7);
    const SymmetricMatrix b = sample_wishart(sigma0, 42, 7);
    const SymmetricMatrix c = sample_wishart(sigma0, 42, 8);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 0.0);
  }
  SUBCASE("samples are symmetric and positive semidefinite") {
    const SymmetricMatrix sigma0 = build_population(make_spec({3, 2}, {0.4, 0.2}, 0.1));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SymmetricMatrix sample = sample_wishart(sigma0, 12, seed);
      CHECK((sample.matrix() - sample.matrix().transpose()).cwiseAbs().maxCoeff() < 1e-12);
      const oracle::Eigensystem eigen = oracle::jacobi(oracle::from_eigen(sample.matrix()));
      CHECK(eigen.values.front() > -1e-10);
    }
  }
  SUBCASE("single column gives a rank-one matrix") {
    const SymmetricMatrix sigma0 = build_population(make_spec({4}, {0.2}, 0.0));
    const SymmetricMatrix sample = sample_wishart(sigma0, 1, 3);
    const oracle::Eigensystem eigen = oracle::jacobi(oracle::from_eigen(sample.matrix()));
    CHECK(eigen.values.back() > 0.0);
    CHECK(std::abs(eigen.values[2]) < 1e-12 * eigen.values.back());
  }
  SUBCASE("t must be positive") {
    const SymmetricMatrix sigma0 = build_population(make_spec({2}, {0.2}, 0.0));
    CHECK_THROWS_AS(sample_wishart(sigma0, 0, 1), ConfigError);
  }
}

TEST_CASE("ensemble_mean_check") {
  SUBCASE("needs at least two samples") {
    CHECK_THROWS_AS(ensemble_mean_check(make_spec({2}, {0.2}, 0.0), 42, 1, 1), ConfigError);
  }
  SUBCASE("scalar mean matches the analytic value within five standard errors") {
    const BlockSpec spec = make_spec({3, 3}, {0.4, 0.4}, 0.1);
    const EnsembleReport report = ensemble_mean_check(spec, 42, 5000, 1);
    CHECK(report.sample_count == 5000);
    // Analytic scalar: (1/K^2) * sum of sigma0 entries.
    const SymmetricMatrix sigma0 = build_population(spec);
    CHECK(report.scalar_mean_analytic == doctest::Approx(sigma0.matrix().sum() / 36.0));
    CHECK(std::abs(report.scalar_mean_estimate - report.scalar_mean_analytic) <=
          5.0 * report.scalar_standard_error);
  }
  SUBCASE("every entry sits within five standard errors of the population") {
    const BlockSpec spec = make_spec({3, 3}, {0.4, 0.4}, 0.1);
    const EnsembleReport report = ensemble_mean_check(spec, 42, 2000, 11);
    const SymmetricMatrix sigma0 = build_population(spec);
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        const double deviation = std::abs(report.mean_estimate(i, j) - sigma0(i, j));
        CHECK(deviation <= 5.0 * report.standard_errors(i, j));
        CHECK(deviation <= report.max_abs_deviation);
      }
    }
  }
  SUBCASE("identity population keeps off-diagonal means near zero") {
    const EnsembleReport report = ensemble_mean_check(make_spec({5}, {0.0}, 0.0), 30, 2000, 2);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) {
        if (i == j) continue;
        CHECK(std::abs(report.mean_estimate(i, j)) <= 5.0 * report.standard_errors(i, j));
      }
    }
  }
  SUBCASE("standard errors shrink with the sample count") {
    const BlockSpec spec = make_spec({2, 2}, {0.3, 0.3}, 0.1);
    const EnsembleReport small = ensemble_mean_check(spec, 42, 200, 3);
    const EnsembleReport large = ensemble_mean_check(spec, 42, 5000, 3);
    CHECK(large.standard_errors.mean() < 0.5 * small.standard_errors.mean());
    CHECK(large.scalar_standard_error < 0.5 * small.scalar_standard_error);
  }
  SUBCASE("deterministic per seed") {
    const BlockSpec spec = make_spec({2, 2}, {0.3, 0.3}, 0.1);
    const EnsembleReport a = ensemble_mean_check(spec, 10, 50, 9);
    const EnsembleReport b = ensemble_mean_check(spec, 10, 50, 9);
    CHECK((a.mean_estimate - b.mean_estimate).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.scalar_mean_estimate == b.scalar_mean_estimate);
  }
}

TEST_CASE("pooled ensemble-mean z-scores look standard normal") {
  const std::vector<BlockSpec> specs = {
      make_spec({2, 2}, {0.3, 0.2}, 0.1),
      make_spec({3, 2}, {0.4, 0.1}, 0.05),
      make_spec({2, 2, 2}, {0.2, 0.2, 0.2}, 0.15),
  };
  std::vector<double> zs;
  std::uint64_t seed = 100;
  for (const BlockSpec& spec : specs) {
    const EnsembleReport report = ensemble_mean_check(spec, 30, 5000, seed++);
    const SymmetricMatrix sigma0 = build_population(spec);
    for (Eigen::Index i = 0; i < sigma0.dim(); ++i) {
      for (Eigen::Index j = i; j < sigma0.dim(); ++j) {
        zs.push_back((report.mean_estimate(i, j) - sigma0(i, j)) / report.standard_errors(i, j));
      }
    }
  }
  CHECK(oracle::ks_pvalue_normal(zs) > 0.001);
}

TEST_CASE("self_averaging_check") {
  SUBCASE("specs must come in strictly increasing dimension") {
    const std::vector<BlockSpec> bad = {make_spec({4}, {0.2}, 0.0), make_spec({4}, {0.2}, 0.0)};
    CHECK_THROWS_AS(self_averaging_check(bad, 42, 1), ConfigError);
    CHECK_THROWS_AS(self_averaging_check({}, 42, 1), ConfigError);
  }
  SUBCASE("a single block has no off-block entries") {
    const SelfAveragingReport report =
        self_averaging_check({make_spec({6}, {0.3}, 0.0)}, 42, 5);
    REQUIRE(report.points.size() == 1);
    CHECK(!report.points[0].applicable);
    CHECK(report.points[0].offblock_mean == 0.0);
  }
  SUBCASE("off-block mean contracts as the dimension grows") {
    // Fixed block size 10, b = 0.5, offset 0; the block count grows with K,
    // so the off-block entries mix ever more independent sector factors.
    std::vector<BlockSpec> specs;
    for (const Eigen::Index k : {20, 80, 320}) {
      specs.push_back(make_spec(std::vector<Eigen::Index>(std::size_t(k / 10), 10),
                                std::vector<double>(std::size_t(k / 10), 0.5), 0.0));
    }
    std::vector<double> mag20, mag80, mag320;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const SelfAveragingReport report = self_averaging_check(specs, 42, seed);
      REQUIRE(report.points.size() == 3);
      CHECK(report.points[0].dimension == 20);
      CHECK(report.points[2].dimension == 320);
      mag20.push_back(std::abs(report.points[0].offblock_mean));
      mag80.push_back(std::abs(report.points[1].offblock_mean));
      mag320.push_back(std::abs(report.points[2].offblock_mean));
    }
    const double m20 = median_of(mag20), m80 = median_of(mag80), m320 = median_of(mag320);
    CHECK(m80 < m20);
    CHECK(m320 < m80);
  }
  SUBCASE("long samples pin the off-block mean near zero") {
    const BlockSpec spec = make_spec(std::vector<Eigen::Index>(8, 10),
                                     std::vector<double>(8, 0.5), 0.0);
    const SelfAveragingReport report = self_averaging_check({spec}, 10000, 21);
    REQUIRE(report.points.size() == 1);
    CHECK(report.points[0].applicable);
    CHECK(std::abs(report.points[0].offblock_mean) < 1e-2);
  }
  SUBCASE("offset is subtracted before averaging") {
    const BlockSpec spec = make_spec({10, 10}, {0.3, 0.3}, 0.2);
    const SelfAveragingReport report = self_averaging_check({spec}, 20000, 4);
    REQUIRE(report.points.size() == 1);
    // Raw off-block entries hover near 0.2; the reported value is centered.
    CHECK(std::abs(report.points[0].offblock_mean) < 0.1);
  }
}

TEST_CASE("market share of a sampled matrix grows with the offset") {
  // With block structure held fixed, a larger market overlay widens the gap
  // between the top eigenvalue and the sector modes; the top dyadic then
  // carries more of the off-diagonal mass of a finite sample.
  const std::vector<double> offsets = {0.002, 0.02, 0.2};
  std::vector<double> medians;
  for (const double offset : offsets) {
    const BlockSpec spec = make_spec(std::vector<Eigen::Index>(20, 10),
                                     std::vector<double>(20, 0.5), offset);
    const SymmetricMatrix sigma0 = build_population(spec);
    std::vector<double> rels;
    for (std::uint64_t seed = 0; seed < 11; ++seed) {
      const SymmetricMatrix sample = sample_wishart(sigma0, 42, stream_seed(500, seed));
      const ModeSplit split = split_market_mode(eigendecompose(sample, "sample"));
      rels.push_back(mean_offdiagonal(split.leading) / mean_offdiagonal(sample));
    }
    medians.push_back(median_of(rels));
  }
  CHECK(medians[0] < medians[1]);
  CHECK(medians[1] < medians[2]);
}
