#ifndef FIELDCAL_DCT_HPP
#define FIELDCAL_DCT_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "fieldcal/spatial_field.hpp"

namespace fieldcal {

enum class SelectionShape { kSquare, kTriangle };

// Retained-mode set in the top-left corner of the coefficient array.
// Square(w) keeps {(i,j): i<w, j<w}; Triangle(w) keeps {(i,j): i+j<w}.
// Flattening order is the zig-zag enumeration starting at (0,0), so the
// lowest-frequency modes come first.
struct CoeffSelection {
  SelectionShape shape = SelectionShape::kTriangle;
  int w = 1;

  bool contains(int i, int j) const {
    if (i < 0 || j < 0) return false;
    return shape == SelectionShape::kSquare ? (i < w && j < w) : (i + j < w);
  }

  int count() const {
    return shape == SelectionShape::kSquare ? w * w : w * (w + 1) / 2;
  }

  // Selected (i,j) pairs in zig-zag order; throws InvalidSelection if the
  // selection does not fit inside a rows x cols array.
  std::vector<std::pair<int, int>> zigzag_indices(int rows, int cols) const;
};

// Truncated DCT coefficients theta plus the selection that produced them.
struct CoeffVector {
  Eigen::VectorXd theta;
  CoeffSelection selection;
  int field_rows = 0;
  int field_cols = 0;

  int k2() const { return static_cast<int>(theta.size()); }
};

// Orthonormal 1D DCT-II matrix C (C * C^T = I); forward 1D transform of a
// column vector y is C*y.
Eigen::MatrixXd dct_basis_matrix(int n);

// Separable orthonormal 2D transform: full coefficient matrix of the field.
Eigen::MatrixXd dct2_forward(const SpatialField& field);

// Inverse of dct2_forward.
SpatialField dct2_inverse(const Eigen::MatrixXd& coeffs);

// Flatten the selected entries of a full coefficient matrix into theta.
CoeffVector select_coeffs(const Eigen::MatrixXd& full, const CoeffSelection& sel);

// Inverse DCT of the zero-padded coefficient matrix.
SpatialField reconstruct(const CoeffVector& cv);

// Zero-pad theta back into a full field_rows x field_cols coefficient matrix.
Eigen::MatrixXd embed_coeffs(const CoeffVector& cv);

}  // namespace fieldcal

#endif  // FIELDCAL_DCT_HPP
