#include "colmet/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "colmet/errors.hpp"

namespace colmet {

SpectralDecomposition eigendecompose(const SymmetricMatrix& s, std::string_view context) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.matrix());
  if (solver.info() != Eigen::Success) {
    std::string what = "eigendecomposition did not converge";
    if (!context.empty()) what += " (" + std::string(context) + ")";
    throw ComputeError(what);
  }
  // Eigen returns eigenvalues in increasing order already.
  return SpectralDecomposition{s, solver.eigenvalues(), solver.eigenvectors()};
}

ModeSplit split_market_mode(const SpectralDecomposition& d) { return remove_leading_modes(d, 1); }

ModeSplit remove_leading_modes(const SpectralDecomposition& d, int count) {
  const Eigen::Index k = d.dim();
  if (count < 1 || Eigen::Index(count) >= k) {
    throw ConfigError("mode count must satisfy 1 <= count < dim, got " + std::to_string(count) +
                      " for dim " + std::to_string(k));
  }
  const double scale = d.source.matrix().cwiseAbs().maxCoeff();
  const double clamp_tol = 1e-10 * scale;

  Eigen::MatrixXd leading = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = k - count; i < k; ++i) {
    double value = d.eigenvalues(i);
    if (value < 0.0 && value >= -clamp_tol) value = 0.0;
    leading.noalias() += value * d.eigenvectors.col(i) * d.eigenvectors.col(i).transpose();
  }

  ModeSplit split{SymmetricMatrix(leading, MatrixKind::ReducedRankCovariance),
                  SymmetricMatrix(d.source.matrix() - leading, MatrixKind::ReducedRankCovariance),
                  count, false};
  const double gap = d.eigenvalues(k - count) - d.eigenvalues(k - count - 1);
  split.tie_flagged = gap <= 1e-12 * std::abs(d.market_eigenvalue());
  return split;
}

double ipr(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw ConfigError("IPR requires a unit-norm vector");
  }
  return v.array().pow(4).sum();
}

}  // namespace colmet
