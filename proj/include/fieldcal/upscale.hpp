#ifndef FIELDCAL_UPSCALE_HPP
#define FIELDCAL_UPSCALE_HPP

#include <Eigen/Dense>

#include "fieldcal/dct.hpp"
#include "fieldcal/spatial_field.hpp"

namespace fieldcal {

// Upscaling operator L: each coarse cell is the arithmetic mean of its
// factor_r x factor_c fine block. Factors must divide the fine dims exactly.
SpatialField block_average(const SpatialField& field, int factor_r, int factor_c);

// L_c = L composed with the truncated-DCT reconstruction; linear in theta.
// Result is the coarse field flattened row-major.
Eigen::VectorXd upscale_from_theta(const CoeffVector& theta, int coarse_rows,
                                   int coarse_cols);

}  // namespace fieldcal

#endif  // FIELDCAL_UPSCALE_HPP
