#ifndef FIELDCAL_SPATIAL_FIELD_HPP
#define FIELDCAL_SPATIAL_FIELD_HPP

#include <Eigen/Dense>

#include "fieldcal/errors.hpp"

namespace fieldcal {

// A 2D field of real values (log-permeability in the reservoir setting) on a
// regular lattice. Row-major indexing: values(row, col).
struct SpatialField {
  Eigen::MatrixXd values;

  SpatialField() = default;
  explicit SpatialField(Eigen::MatrixXd v) : values(std::move(v)) {}

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }

  void require_valid() const {
    if (values.rows() < 1 || values.cols() < 1)
      throw InvalidInput("spatial field must be at least 1x1");
    if (!values.allFinite())
      throw InvalidInput("spatial field contains non-finite values");
  }
};

}  // namespace fieldcal

#endif  // FIELDCAL_SPATIAL_FIELD_HPP
