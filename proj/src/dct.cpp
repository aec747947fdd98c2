#include "fieldcal/dct.hpp"

#include <cmath>

namespace fieldcal {

std::vector<std::pair<int, int>> CoeffSelection::zigzag_indices(int rows, int cols) const {
  if (w < 1) throw InvalidSelection("selection width must be >= 1");
  // Corner indices (w-1,0) and (0,w-1) are in the set for both shapes.
  if (w > rows || w > cols)
    throw InvalidSelection("selection window exceeds coefficient matrix dims");

  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(count()));
  const int max_diag = shape == SelectionShape::kSquare ? 2 * (w - 1) : w - 1;
  for (int d = 0; d <= max_diag; ++d) {
    // Even diagonals are walked bottom-left to top-right, odd ones the other
    // way, as in the JPEG zig-zag scan.
    if (d % 2 == 0) {
      for (int i = std::min(d, rows - 1); i >= std::max(0, d - (cols - 1)); --i) {
        if (contains(i, d - i)) out.emplace_back(i, d - i);
      }
    } else {
      for (int i = std::max(0, d - (cols - 1)); i <= std::min(d, rows - 1); ++i) {
        if (contains(i, d - i)) out.emplace_back(i, d - i);
      }
    }
  }
  return out;
}

Eigen::MatrixXd dct_basis_matrix(int n) {
  Eigen::MatrixXd c(n, n);
  const double a0 = std::sqrt(1.0 / n);
  const double ak = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    const double a = k == 0 ? a0 : ak;
    for (int s = 0; s < n; ++s) {
      c(k, s) = a * std::cos(M_PI * (2.0 * s + 1.0) * k / (2.0 * n));
    }
  }
  return c;
}

Eigen::MatrixXd dct2_forward(const SpatialField& field) {
  field.require_valid();
  const Eigen::MatrixXd cr = dct_basis_matrix(field.rows());
  const Eigen::MatrixXd cc = dct_basis_matrix(field.cols());
  return cr * field.values * cc.transpose();
}

SpatialField dct2_inverse(const Eigen::MatrixXd& coeffs) {
  if (coeffs.rows() < 1 || coeffs.cols() < 1)
    throw InvalidInput("coefficient matrix must be at least 1x1");
  if (!coeffs.allFinite())
    throw InvalidInput("coefficient matrix contains non-finite values");
  const Eigen::MatrixXd cr = dct_basis_matrix(static_cast<int>(coeffs.rows()));
  const Eigen::MatrixXd cc = dct_basis_matrix(static_cast<int>(coeffs.cols()));
  return SpatialField(cr.transpose() * coeffs * cc);
}

CoeffVector select_coeffs(const Eigen::MatrixXd& full, const CoeffSelection& sel) {
  if (!full.allFinite())
    throw InvalidInput("coefficient matrix contains non-finite values");
  const auto idx = sel.zigzag_indices(static_cast<int>(full.rows()),
                                      static_cast<int>(full.cols()));
  CoeffVector cv;
  cv.selection = sel;
  cv.field_rows = static_cast<int>(full.rows());
  cv.field_cols = static_cast<int>(full.cols());
  cv.theta.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r)
    cv.theta(static_cast<Eigen::Index>(r)) = full(idx[r].first, idx[r].second);
  return cv;
}

Eigen::MatrixXd embed_coeffs(const CoeffVector& cv) {
  const auto idx = cv.selection.zigzag_indices(cv.field_rows, cv.field_cols);
  if (static_cast<Eigen::Index>(idx.size()) != cv.theta.size())
    throw InvalidSelection("theta length does not match selection cardinality");
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(cv.field_rows, cv.field_cols);
  for (std::size_t r = 0; r < idx.size(); ++r)
    full(idx[r].first, idx[r].second) = cv.theta(static_cast<Eigen::Index>(r));
  return full;
}

SpatialField reconstruct(const CoeffVector& cv) {
  return dct2_inverse(embed_coeffs(cv));
}

}  // namespace fieldcal
