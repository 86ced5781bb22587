#pragma once

#include <Eigen/Core>
#include <vector>

#include "colmet/ingest.hpp"

namespace colmet {

// Rows whose sample standard deviation falls below this are treated as
// degenerate (all-zero after standardization).
inline constexpr double kDefaultSigmaFloor = 1e-12;

enum class MatrixKind { Covariance, Correlation, ReducedRankCovariance };

// Dense symmetric real matrix; symmetrized on construction so downstream
// eigensolves never see asymmetry from floating-point products.
class SymmetricMatrix {
 public:
  SymmetricMatrix(Eigen::MatrixXd values, MatrixKind kind);

  Eigen::Index dim() const { return values_.rows(); }
  MatrixKind kind() const { return kind_; }
  const Eigen::MatrixXd& matrix() const { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  Eigen::MatrixXd values_;
  MatrixKind kind_;
};

// Subtracts each row's mean.
Eigen::MatrixXd demean_rows(const Eigen::Ref<const Eigen::MatrixXd>& data);
Eigen::MatrixXd demean_rows(const WindowView& window);

struct StandardizeResult {
  Eigen::MatrixXd values;
  std::vector<Eigen::Index> degenerate_rows;  // zeroed rows
};

// Rows normalized to mean zero and standard deviation one (1/T convention).
// Rows below the floor are zeroed and reported.
StandardizeResult standardize_rows(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                   double sigma_floor = kDefaultSigmaFloor);
StandardizeResult standardize_rows(const WindowView& window,
                                   double sigma_floor = kDefaultSigmaFloor);

// (1/T) A A^T for a row-demeaned data matrix A.
SymmetricMatrix covariance(const Eigen::Ref<const Eigen::MatrixXd>& demeaned);

// (1/T) M M^T for a row-standardized data matrix M. Degenerate (all-zero)
// rows produce a zero row/column with the diagonal forced to one.
SymmetricMatrix correlation(const Eigen::Ref<const Eigen::MatrixXd>& standardized);

// Mean over all K^2 entries, diagonal included.
double mean_with_diagonal(const SymmetricMatrix& s);

// Mean over the K(K-1) off-diagonal entries; requires dim >= 2.
double mean_offdiagonal(const SymmetricMatrix& s);

}  // namespace colmet
