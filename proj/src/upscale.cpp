#include "fieldcal/upscale.hpp"

namespace fieldcal {

SpatialField block_average(const SpatialField& field, int factor_r, int factor_c) {
  field.require_valid();
  if (factor_r < 1 || factor_c < 1)
    throw InvalidGeometry("block factors must be >= 1");
  if (field.rows() % factor_r != 0 || field.cols() % factor_c != 0)
    throw InvalidGeometry("block factors must divide the fine dims exactly");

  const int cr = field.rows() / factor_r;
  const int cc = field.cols() / factor_c;
  Eigen::MatrixXd coarse(cr, cc);
  const double inv_area = 1.0 / (static_cast<double>(factor_r) * factor_c);
  for (int i = 0; i < cr; ++i)
    for (int j = 0; j < cc; ++j)
      coarse(i, j) =
          field.values.block(i * factor_r, j * factor_c, factor_r, factor_c).sum() *
          inv_area;
  return SpatialField(std::move(coarse));
}

Eigen::VectorXd upscale_from_theta(const CoeffVector& theta, int coarse_rows,
                                   int coarse_cols) {
  if (coarse_rows < 1 || coarse_cols < 1)
    throw InvalidGeometry("coarse dims must be >= 1");
  if (theta.field_rows % coarse_rows != 0 || theta.field_cols % coarse_cols != 0)
    throw InvalidGeometry("coarse dims must divide the fine dims exactly");
  const SpatialField fine = reconstruct(theta);
  const SpatialField coarse = block_average(fine, theta.field_rows / coarse_rows,
                                            theta.field_cols / coarse_cols);
  Eigen::VectorXd out(coarse_rows * coarse_cols);
  for (int i = 0; i < coarse_rows; ++i)
    for (int j = 0; j < coarse_cols; ++j) out(i * coarse_cols + j) = coarse.values(i, j);
  return out;
}

}  // namespace fieldcal
