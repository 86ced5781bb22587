#pragma once

#include <Eigen/Core>
#include <string_view>

#include "colmet/matrices.hpp"

namespace colmet {

// Full symmetric eigendecomposition. Eigenvalues are sorted ascending, so
// the market mode sits at the last index; column i of `eigenvectors` pairs
// with eigenvalues[i]. Keeps the source matrix so mode splits can subtract
// dyadics from the exact input.
struct SpectralDecomposition {
  SymmetricMatrix source;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
  double market_eigenvalue() const { return eigenvalues(dim() - 1); }
  Eigen::VectorXd market_mode() const { return eigenvectors.col(dim() - 1); }
};

// Split of a symmetric matrix into the sum of its top dyadics and the rest.
// `leading + residual` reproduces the source matrix; both parts are
// reduced-rank covariance matrices.
struct ModeSplit {
  SymmetricMatrix leading;
  SymmetricMatrix residual;
  int removed_count = 0;
  // Set when the cut falls inside a numerically degenerate eigenspace; the
  // single-dyadic split then depends on the eigensolver's basis choice.
  bool tie_flagged = false;
};

// `context` ends up in the error message if the solver fails to converge.
SpectralDecomposition eigendecompose(const SymmetricMatrix& s, std::string_view context = {});

// Removes the market mode (largest eigenvalue dyadic); requires dim >= 2.
ModeSplit split_market_mode(const SpectralDecomposition& d);

// Removes the `count` largest-eigenvalue dyadics, 1 <= count < dim.
// Eigenvalues within -1e-10 * max|source| of zero are clamped to zero
// before the dyadics are built.
ModeSplit remove_leading_modes(const SpectralDecomposition& d, int count);

// Inverse participation ratio of a unit vector: sum of fourth powers of the
// components. 1/K for a fully extended vector, 1 for a localized one.
double ipr(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace colmet
