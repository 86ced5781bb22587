#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "colmet/collectivity.hpp"
#include "colmet/ingest.hpp"
#include "colmet/regression.hpp"

namespace colmet {

struct AnalysisOptions {
  Eigen::Index window_length = 42;
  Eigen::Index stride = 1;
  Thresholds thresholds{};
  int modes = 1;  // 1 = market mode only, 2 also fills cov_B2 / cov_L2
  int threads = 1;

  void validate(Eigen::Index instrument_count) const;
};

// Full per-window measurement: covariance and correlation splits,
// collectivity record, market-mode IPR, criterion labels.
CollectivityRecord analyze_window(const WindowView& window, const Thresholds& thresholds,
                                  int modes);

// All sliding windows, ordered by window index. Windows are independent, so
// they are distributed over `threads` workers; the output order does not
// depend on scheduling.
std::vector<CollectivityRecord> analyze_all(const ReturnMatrix& returns,
                                            const AnalysisOptions& options);

// Regression baseline per window: the off-diagonal mean of the residual
// correlation matrix, next to cov_LLE from the unregressed correlation split.
struct RegressionRecord {
  Date center_date{};
  std::optional<double> residual_corr_mean;
  double cov_lle = 0.0;
  bool mediator_degenerate = false;
};

std::vector<RegressionRecord> regress_all(const ReturnMatrix& returns,
                                          const ReturnMatrix* index_returns, MediatorKind kind,
                                          const AnalysisOptions& options);

// Uniform draw of `count` distinct row indices out of `total`, returned in
// ascending order; deterministic per seed.
std::vector<Eigen::Index> subsample_rows(Eigen::Index total, Eigen::Index count,
                                         std::uint64_t seed);

struct WindowMatrices {
  SymmetricMatrix cov;
  SymmetricMatrix corr;
  Date center_date{};
};

// The two matrices backing one window, for inspection dumps.
WindowMatrices window_matrices(const ReturnMatrix& returns, Eigen::Index window_index,
                               Eigen::Index window_length, Eigen::Index stride);

void write_regression_records(std::ostream& out, std::span<const RegressionRecord> records,
                              MediatorKind kind);

}  // namespace colmet
