#pragma once

#include <Eigen/Core>
#include <optional>

#include "colmet/ingest.hpp"
#include "colmet/matrices.hpp"

namespace colmet {

enum class MediatorKind { AverageReturn, IndexReturn };

// Common series regressed out of each instrument inside one window.
struct MediatorSeries {
  Eigen::VectorXd values;  // length = window length
  MediatorKind kind = MediatorKind::AverageReturn;
};

// Per-instrument ordinary least squares fit against the mediator:
// return_i(t) = intercept_i + slope_i * mediator(t) + residual_i(t).
struct RegressionFit {
  Eigen::VectorXd intercepts;
  Eigen::VectorXd slopes;
  Eigen::MatrixXd residuals;  // K x T
  bool mediator_degenerate = false;
};

// Cross-sectional average return, one value per day of the window.
MediatorSeries mediator_average(const WindowView& window);

// Slice of an externally supplied index return series aligned to the
// window's dates. The index series must have exactly one instrument and
// cover every window date; missing dates are an error naming them.
MediatorSeries mediator_index(const ReturnMatrix& index_returns, const WindowView& window);

// Closed-form univariate OLS per instrument. A mediator with variance below
// 1e-15 degenerates to slope zero with demeaned returns as residuals.
RegressionFit regress_residuals(const WindowView& window, const MediatorSeries& mediator);

// Off-diagonal mean of the residual correlation matrix; degenerate residual
// rows follow the standard zero-row policy. Unset when every row is
// degenerate (or the fit has fewer than two instruments).
std::optional<double> residual_collectivity(const RegressionFit& fit,
                                            double sigma_floor = kDefaultSigmaFloor);

}  // namespace colmet
