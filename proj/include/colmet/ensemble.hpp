#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "colmet/matrices.hpp"

namespace colmet {

// Population (structure) covariance: block-diagonal sector structure plus a
// uniform market overlay. block_values[k] may be zero, giving an offset-only
// population; the overlay is added to every off-diagonal entry while the
// diagonal stays at diagonal_value.
struct BlockSpec {
  std::vector<Eigen::Index> block_sizes;
  std::vector<double> block_values;
  double market_offset = 0.0;
  double diagonal_value = 1.0;

  Eigen::Index dimension() const;
  void validate() const;
};

SymmetricMatrix build_population(const BlockSpec& spec);

// One draw: A = L Z with L the eigendecomposition square root of sigma0 and
// Z standard normal K x T, returning (1/T) A A^T. Deterministic per seed.
SymmetricMatrix sample_wishart(const SymmetricMatrix& sigma0, Eigen::Index t, std::uint64_t seed);

struct EnsembleReport {
  Eigen::Index sample_count = 0;
  Eigen::MatrixXd mean_estimate;            // elementwise Monte Carlo mean
  Eigen::MatrixXd standard_errors;          // elementwise SE of the mean
  double max_abs_deviation = 0.0;           // max |mean - sigma0|
  double scalar_mean_estimate = 0.0;        // mean over samples of <cov> incl. diagonal
  double scalar_mean_analytic = 0.0;        // (1/K^2) sum of sigma0 entries
  double scalar_standard_error = 0.0;
};

// Draws n_samples matrices and compares their elementwise and scalar means
// to the population values.
EnsembleReport ensemble_mean_check(const BlockSpec& spec, Eigen::Index t, Eigen::Index n_samples,
                                   std::uint64_t seed);

struct SelfAveragingPoint {
  Eigen::Index dimension = 0;
  double offblock_mean = 0.0;  // offset-subtracted mean over off-block entries
  bool applicable = false;     // false when the spec has a single block
};

struct SelfAveragingReport {
  std::vector<SelfAveragingPoint> points;
};

// One sample per spec; specs must be ordered by strictly increasing
// dimension. With growing K the off-block mean of a single sample contracts
// toward the ensemble value.
SelfAveragingReport self_averaging_check(const std::vector<BlockSpec>& specs, Eigen::Index t,
                                         std::uint64_t seed);

}  // namespace colmet
