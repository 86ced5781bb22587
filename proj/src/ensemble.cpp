#include "colmet/ensemble.hpp"

#include <cmath>
#include <sstream>

#include "colmet/errors.hpp"
#include "colmet/rng.hpp"
#include "colmet/spectral.hpp"

namespace colmet {

Eigen::Index BlockSpec::dimension() const {
  Eigen::Index total = 0;
  for (const Eigen::Index size : block_sizes) {
    total += size;
  }
  return total;
}

void BlockSpec::validate() const {
  if (block_sizes.empty()) {
    throw ConfigError("block spec needs at least one block");
  }
  if (block_sizes.size() != block_values.size()) {
    std::ostringstream msg;
    msg << "block spec has " << block_sizes.size() << " sizes but " << block_values.size()
        << " values";
    throw ConfigError(msg.str());
  }
  for (const Eigen::Index size : block_sizes) {
    if (size < 1) {
      throw ConfigError("block sizes must be positive");
    }
  }
  for (const double value : block_values) {
    if (value < 0.0) {
      throw ConfigError("in-block covariances must be non-negative");
    }
  }
}

SymmetricMatrix build_population(const BlockSpec& spec) {
  spec.validate();
  const Eigen::Index k = spec.dimension();
  Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Constant(k, k, spec.market_offset);
  Eigen::Index offset = 0;
  for (std::size_t block = 0; block < spec.block_sizes.size(); ++block) {
    const Eigen::Index size = spec.block_sizes[block];
    sigma0.block(offset, offset, size, size).array() += spec.block_values[block];
    offset += size;
  }
  sigma0.diagonal().setConstant(spec.diagonal_value);

  SymmetricMatrix population(std::move(sigma0), MatrixKind::Covariance);
  const SpectralDecomposition decomposition = eigendecompose(population, "population covariance");
  const double smallest = decomposition.eigenvalues[0];
  const double scale = std::max(1.0, std::abs(decomposition.market_eigenvalue()));
  if (smallest < -1e-10 * scale) {
    std::ostringstream msg;
    msg << "population covariance is not positive semidefinite (smallest eigenvalue " << smallest
        << ")";
    throw ConfigError(msg.str());
  }
  return population;
}

SymmetricMatrix sample_wishart(const SymmetricMatrix& sigma0, Eigen::Index t, std::uint64_t seed) {
  if (t < 1) {
    throw ConfigError("wishart sample needs at least one column");
  }
  const SpectralDecomposition decomposition = eigendecompose(sigma0, "wishart factor");
  Eigen::VectorXd roots = decomposition.eigenvalues;
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    roots[i] = roots[i] > 0.0 ? std::sqrt(roots[i]) : 0.0;
  }
  const Eigen::MatrixXd factor = decomposition.eigenvectors * roots.asDiagonal() *
                                 decomposition.eigenvectors.transpose();

  const Eigen::Index k = sigma0.dim();
  NormalSampler normal(mix_seed(seed));
  Eigen::MatrixXd z(k, t);
  for (Eigen::Index i = 0; i < k; ++i) {  // row-major fill, part of the seed contract
    for (Eigen::Index j = 0; j < t; ++j) {
      z(i, j) = normal();
    }
  }

  const Eigen::MatrixXd sample = factor * z;
  return SymmetricMatrix((sample * sample.transpose()) / double(t), MatrixKind::Covariance);
}

EnsembleReport ensemble_mean_check(const BlockSpec& spec, Eigen::Index t, Eigen::Index n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 2) {
    throw ConfigError("ensemble mean check needs at least two samples");
  }
  const SymmetricMatrix sigma0 = build_population(spec);
  const Eigen::Index k = sigma0.dim();

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(k, k);
  double scalar_sum = 0.0;
  double scalar_sum_sq = 0.0;

  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const SymmetricMatrix sample = sample_wishart(sigma0, t, stream_seed(seed, std::uint64_t(i)));
    sum += sample.matrix();
    sum_sq += sample.matrix().cwiseProduct(sample.matrix());
    const double scalar = mean_with_diagonal(sample);
    scalar_sum += scalar;
    scalar_sum_sq += scalar * scalar;
  }

  const double n = double(n_samples);
  EnsembleReport report;
  report.sample_count = n_samples;
  report.mean_estimate = sum / n;
  // Sample variance of each entry, then the standard error of its mean.
  const Eigen::MatrixXd variance =
      (sum_sq / n - report.mean_estimate.cwiseProduct(report.mean_estimate)) * (n / (n - 1.0));
  report.standard_errors = (variance / n).cwiseMax(0.0).cwiseSqrt();
  report.max_abs_deviation = (report.mean_estimate - sigma0.matrix()).cwiseAbs().maxCoeff();

  report.scalar_mean_estimate = scalar_sum / n;
  report.scalar_mean_analytic = mean_with_diagonal(sigma0);
  const double scalar_mean = report.scalar_mean_estimate;
  const double scalar_var = (scalar_sum_sq / n - scalar_mean * scalar_mean) * (n / (n - 1.0));
  report.scalar_standard_error = std::sqrt(std::max(scalar_var, 0.0) / n);
  return report;
}

SelfAveragingReport self_averaging_check(const std::vector<BlockSpec>& specs, Eigen::Index t,
                                         std::uint64_t seed) {
  if (specs.empty()) {
    throw ConfigError("self-averaging check needs at least one spec");
  }
  for (std::size_t i = 1; i < specs.size(); ++i) {
    if (specs[i].dimension() <= specs[i - 1].dimension()) {
      throw ConfigError("self-averaging specs must have strictly increasing dimension");
    }
  }

  SelfAveragingReport report;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const BlockSpec& spec = specs[s];
    const SymmetricMatrix sigma0 = build_population(spec);
    const SymmetricMatrix sample = sample_wishart(sigma0, t, stream_seed(seed, std::uint64_t(s)));

    // Block membership per instrument.
    std::vector<Eigen::Index> block_of(std::size_t(spec.dimension()));
    Eigen::Index row = 0;
    for (std::size_t block = 0; block < spec.block_sizes.size(); ++block) {
      for (Eigen::Index inner = 0; inner < spec.block_sizes[block]; ++inner) {
        block_of[std::size_t(row++)] = Eigen::Index(block);
      }
    }

    SelfAveragingPoint point;
    point.dimension = spec.dimension();
    double total = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < sample.dim(); ++i) {
      for (Eigen::Index j = 0; j < sample.dim(); ++j) {
        if (i != j && block_of[std::size_t(i)] != block_of[std::size_t(j)]) {
          total += sample(i, j) - spec.market_offset;
          ++count;
        }
      }
    }
    point.applicable = count > 0;
    point.offblock_mean = count > 0 ? total / double(count) : 0.0;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace colmet
