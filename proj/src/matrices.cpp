#include "colmet/matrices.hpp"

#include <cmath>

#include "colmet/errors.hpp"

namespace colmet {

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd values, MatrixKind kind)
    : values_(std::move(values)), kind_(kind) {
  if (values_.rows() != values_.cols()) {
    throw ConfigError("symmetric matrix must be square");
  }
  values_ = ((values_ + values_.transpose()) * 0.5).eval();
}

Eigen::MatrixXd demean_rows(const Eigen::Ref<const Eigen::MatrixXd>& data) {
  Eigen::MatrixXd out = data;
  out.colwise() -= out.rowwise().mean();
  return out;
}

Eigen::MatrixXd demean_rows(const WindowView& window) { return demean_rows(window.block()); }

StandardizeResult standardize_rows(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                   double sigma_floor) {
  StandardizeResult result;
  result.values = demean_rows(data);
  const double t = double(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double sd = std::sqrt(result.values.row(i).squaredNorm() / t);
    if (sd < sigma_floor) {
      result.values.row(i).setZero();
      result.degenerate_rows.push_back(i);
    } else {
      result.values.row(i) /= sd;
    }
  }
  return result;
}

StandardizeResult standardize_rows(const WindowView& window, double sigma_floor) {
  return standardize_rows(window.block(), sigma_floor);
}

SymmetricMatrix covariance(const Eigen::Ref<const Eigen::MatrixXd>& demeaned) {
  const double t = double(demeaned.cols());
  return SymmetricMatrix((demeaned * demeaned.transpose()) / t, MatrixKind::Covariance);
}

SymmetricMatrix correlation(const Eigen::Ref<const Eigen::MatrixXd>& standardized) {
  const double t = double(standardized.cols());
  Eigen::MatrixXd c = (standardized * standardized.transpose()) / t;
  for (Eigen::Index i = 0; i < standardized.rows(); ++i) {
    if ((standardized.row(i).array() == 0.0).all()) {
      c(i, i) = 1.0;  // degenerate instrument keeps unit self-correlation
    }
  }
  return SymmetricMatrix(std::move(c), MatrixKind::Correlation);
}

double mean_with_diagonal(const SymmetricMatrix& s) {
  const double k = double(s.dim());
  return s.matrix().sum() / (k * k);
}

double mean_offdiagonal(const SymmetricMatrix& s) {
  if (s.dim() < 2) {
    throw ConfigError("off-diagonal mean needs at least a 2x2 matrix");
  }
  const double k = double(s.dim());
  return (s.matrix().sum() - s.matrix().trace()) / (k * (k - 1.0));
}

}  // namespace colmet
