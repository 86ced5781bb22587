#include "colmet/regression.hpp"

#include <sstream>
#include <vector>

#include "colmet/dates.hpp"
#include "colmet/errors.hpp"

namespace colmet {

namespace {

constexpr double kMediatorVarianceFloor = 1e-15;

}  // namespace

MediatorSeries mediator_average(const WindowView& window) {
  if (window.instrument_count() == 0) {
    throw ConfigError("mediator_average: window has no instruments");
  }
  MediatorSeries out;
  out.kind = MediatorKind::AverageReturn;
  out.values = window.block().colwise().mean().transpose();
  return out;
}

MediatorSeries mediator_index(const ReturnMatrix& index_returns, const WindowView& window) {
  if (index_returns.values.rows() != 1) {
    std::ostringstream msg;
    msg << "index return series must hold exactly one instrument, got "
        << index_returns.values.rows();
    throw ConfigError(msg.str());
  }
  MediatorSeries out;
  out.kind = MediatorKind::IndexReturn;
  out.values.resize(window.length);

  // Align by date: the index series may span a different range than the panel.
  std::size_t cursor = 0;
  std::vector<Date> missing;
  for (std::int64_t t = 0; t < window.length; ++t) {
    const Date wanted = window.source->dates[static_cast<std::size_t>(window.start + t)];
    while (cursor < index_returns.dates.size() && index_returns.dates[cursor] < wanted) {
      ++cursor;
    }
    if (cursor < index_returns.dates.size() && index_returns.dates[cursor] == wanted) {
      out.values[t] = index_returns.values(0, static_cast<Eigen::Index>(cursor));
    } else {
      missing.push_back(wanted);
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "index return series is missing " << missing.size() << " window date(s), first "
        << format_date(missing.front());
    throw ConfigError(msg.str());
  }
  return out;
}

RegressionFit regress_residuals(const WindowView& window, const MediatorSeries& mediator) {
  const Eigen::Index k = static_cast<Eigen::Index>(window.instrument_count());
  const Eigen::Index t = static_cast<Eigen::Index>(window.length);
  if (mediator.values.size() != t) {
    std::ostringstream msg;
    msg << "mediator length " << mediator.values.size() << " does not match window length " << t;
    throw ConfigError(msg.str());
  }
  if (t < 2) {
    throw ConfigError("regression needs a window of at least two observations");
  }

  RegressionFit fit;
  const Eigen::MatrixXd g = window.block();
  const Eigen::VectorXd row_means = g.rowwise().mean();
  const Eigen::MatrixXd gc = g.colwise() - row_means;

  const double mediator_mean = mediator.values.mean();
  const Eigen::VectorXd ic = mediator.values.array() - mediator_mean;
  const double mediator_var = ic.squaredNorm() / static_cast<double>(t);

  if (mediator_var <= kMediatorVarianceFloor) {
    fit.mediator_degenerate = true;
    fit.slopes = Eigen::VectorXd::Zero(k);
    fit.intercepts = row_means;
    fit.residuals = gc;
    return fit;
  }

  fit.slopes = (gc * ic) / (mediator_var * static_cast<double>(t));
  fit.intercepts = row_means - fit.slopes * mediator_mean;
  fit.residuals = gc - fit.slopes * ic.transpose();
  return fit;
}

std::optional<double> residual_collectivity(const RegressionFit& fit, double sigma_floor) {
  if (fit.residuals.rows() < 2) {
    return std::nullopt;
  }
  const StandardizeResult standardized = standardize_rows(fit.residuals, sigma_floor);
  if (standardized.degenerate_rows.size() == static_cast<std::size_t>(fit.residuals.rows())) {
    return std::nullopt;
  }
  return mean_offdiagonal(correlation(standardized.values));
}

}  // namespace colmet
