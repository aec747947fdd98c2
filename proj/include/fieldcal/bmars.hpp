#ifndef FIELDCAL_BMARS_HPP
#define FIELDCAL_BMARS_HPP

#include <Eigen/Dense>
#include <vector>

#include "fieldcal/errors.hpp"

namespace fieldcal {

// One hinge factor [sign * (x_var - knot)]_+ of a product basis. Knots live
// in the standardized predictor space and are values of the training data.
struct HingeFactor {
  int var = 0;       // predictor index in [0, p)
  double knot = 0.0;
  int sign = 1;      // +1 or -1
};

// Spline basis: the intercept (no factors) or a product of hinge factors on
// distinct predictors.
struct BasisFunction {
  std::vector<HingeFactor> factors;

  bool is_intercept() const { return factors.empty(); }
  int degree() const { return static_cast<int>(factors.size()); }

  // Factors sorted by predictor index; the canonical identity used for
  // structural comparison.
  std::vector<HingeFactor> canonical() const;
  bool same_structure(const BasisFunction& other) const;

  void require_valid(int p, int max_interaction) const;
};

double eval_basis(const BasisFunction& b, const Eigen::VectorXd& x);

// N_I = sum_{i=1..I} C(k1+k2, i): number of admissible predictor subsets.
long long count_basis_types(int k1, int k2, int max_interaction);

// Full trans-dimensional emulator state. bases[0] is always the intercept.
struct BmarsState {
  std::vector<BasisFunction> bases;
  Eigen::VectorXd beta;
  double sigma_z2 = 1.0;
  double tau_z = 1.0;

  int m() const { return static_cast<int>(bases.size()); }

  static BmarsState intercept_only();
};

// Affine map taking raw predictor columns to [0,1] (fitted on training data).
struct PredictorScaling {
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;  // strictly positive; degenerate columns get scale 1

  int p() const { return static_cast<int>(offset.size()); }
  double to_unit(int j, double raw) const { return (raw - offset(j)) / scale(j); }
  Eigen::VectorXd to_unit(const Eigen::VectorXd& raw) const;

  static PredictorScaling fit(const Eigen::MatrixXd& x_raw);
  static PredictorScaling identity(int p);
};

// Stacked simulator and observed inputs/outputs. X is stored in the
// standardized space; rows [0, n_s) are the simulator block, rows
// [n_s, n_s+n_r) the observed block. Columns [0, k1) are known inputs,
// [k1, k1+k2) the DCT coefficients. The error-scale matrix S is implicit:
// identity on the simulator block, tau_z * identity on the observed block.
struct TrainingSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd Z;
  int n_s = 0;
  int n_r = 0;
  int k1 = 0;
  int k2 = 0;
  PredictorScaling scaling;

  int n() const { return n_s + n_r; }
  int p() const { return k1 + k2; }

  // Knot proposals are indexed by data rows; with an empty data set a single
  // placeholder value keeps the proposal measure well defined (the factor
  // cancels exactly between prior and proposal ratio).
  int knot_pool_size() const { return n() > 0 ? n() : 1; }
  double knot_value(int var, int pool_row) const {
    return n() > 0 ? X(pool_row, var) : 0.0;
  }

  // Overwrite the DCT-coefficient columns of the observed block with the
  // (raw-space) theta, applying the stored scaling.
  void set_observed_theta(const Eigen::VectorXd& theta_raw);

  void require_valid() const;
};

// Assemble a TrainingSet from raw blocks; fits the scaling on the stacked
// raw inputs. x_obs_known may have zero rows when there is no observed block.
TrainingSet make_training_set(const Eigen::MatrixXd& x_sim_raw,
                              const Eigen::VectorXd& z_sim,
                              const Eigen::MatrixXd& x_obs_known_raw,
                              const Eigen::VectorXd& z_obs, int k1, int k2);

// Entry (i,j) = eval_basis(bases[j], row i of X); column 0 is all ones when
// bases[0] is the intercept.
Eigen::MatrixXd build_design_matrix(const std::vector<BasisFunction>& bases,
                                    const Eigen::MatrixXd& X);

double logit(double z);
double inv_logit(double u);
// Clamps exact 0/1 (and anything inside [0, eps]/[1-eps, 1]) before the
// transform; values outside [0,1] are rejected.
double clamped_logit(double z, double eps = 1e-6);

}  // namespace fieldcal

#endif  // FIELDCAL_BMARS_HPP
