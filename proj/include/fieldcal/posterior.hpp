#ifndef FIELDCAL_POSTERIOR_HPP
#define FIELDCAL_POSTERIOR_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fieldcal/bmars.hpp"
#include "fieldcal/dct.hpp"

namespace fieldcal {

struct Hyperparams {
  double a_z = 0.01, b_z = 0.01;      // inverse-gamma for sigma_z^2
  double a_tau = 0.01, b_tau = 0.01;  // inverse-gamma for tau_z
  double a_c = 0.01, b_c = 0.01;      // coarse-data error scale
  double a_k = 0.01, b_k = 0.01;      // fine-data error scale
  double a_o = 0.01, b_o = 0.01;      // theta prior scale
  double alpha = 1000.0;              // beta prior variance multiplier
  double lambda = 10.0;               // Poisson rate for the basis count
  int m_max = 100;
  int max_interaction = 2;

  void validate() const;
};

// Coarse-grid field observations, flattened row-major.
struct CoarseData {
  Eigen::VectorXd y;
  int rows = 0;
  int cols = 0;

  int size() const { return rows * cols; }
  void require_valid() const;
};

struct FineObs {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Everything observed about the physical process: outputs on the transformed
// scale with their known inputs, plus coarse- and fine-scale field data.
struct ObservationSet {
  Eigen::VectorXd z_r;                // length n_r (possibly 0)
  Eigen::MatrixXd x_r;                // n_r x k1, raw scale
  std::optional<CoarseData> coarse;
  std::vector<FineObs> fine;

  int n_r() const { return static_cast<int>(z_r.size()); }
  bool empty() const { return n_r() == 0 && !coarse.has_value() && fine.empty(); }
  void validate(int field_rows, int field_cols) const;
};

// Shared pieces of the ridge-regularized normal equations
// A = B'S^{-1}B + I/alpha, u = B'S^{-1}Z; used by the marginal structure
// density and all Gibbs conditionals.
struct RidgeSystem {
  Eigen::MatrixXd B;            // n x m design matrix
  Eigen::MatrixXd A;            // m x m, SPD
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd u;            // B'S^{-1}Z
  Eigen::VectorXd v;            // A^{-1} u  (conditional posterior mean of beta)
  double resid_quad = 0.0;      // (Z-Bv)'S^{-1}(Z-Bv) + v'v/alpha  (>= 0)
  double d = 0.0;               // 2 b_z + resid_quad
  double logdet_A = 0.0;
};

RidgeSystem ridge_system(const std::vector<BasisFunction>& bases,
                         const TrainingSet& data, double tau_z,
                         const Hyperparams& hp);

// log pi_1(m, c^m | theta, tau_z) split into its pieces. The marginal
// log-likelihood carries all of its normalizing constants so it can be
// checked against numerical integration directly; the prior pieces are kept
// up to m-independent constants.
struct StructureLogDensity {
  double marginal_loglik = 0.0;    // log of int int P(Z|.)P(beta|.)P(sigma^2) dbeta dsigma^2
  double log_structure_prior = 0.0;  // log P(c^m|m)
  double log_m_prior = 0.0;          // log P(m) up to the truncation constant

  double total() const { return marginal_loglik + log_structure_prior + log_m_prior; }
};

StructureLogDensity log_pi1_parts(const std::vector<BasisFunction>& bases,
                                  const TrainingSet& data, double tau_z,
                                  const Hyperparams& hp);

// Convenience form matching the sampler's usage: fills the observed block's
// theta columns before evaluating. Throws DegenerateState on a numerically
// singular system (callers treat that as log density -inf).
double log_pi1(const std::vector<BasisFunction>& bases, const CoeffVector& theta,
               double tau_z, const TrainingSet& data, const Hyperparams& hp);

// -(a_c + N*/2) log(b_c + ||y_c - L_c(theta)||^2 / 2), up to a constant.
double log_coarse(const CoarseData& y_c, const CoeffVector& theta,
                  const Hyperparams& hp);

// Same shape for the fine-scale observations; 0 when there are none.
double log_fine(const std::vector<FineObs>& y_o, const CoeffVector& theta,
                const Hyperparams& hp);

// -(a_o + k2/2) log(b_o + theta'theta / 2), up to a constant.
double log_prior_theta(const CoeffVector& theta, const Hyperparams& hp);

// Full conditional of theta: Gaussian misfit of the observed outputs plus the
// coarse, fine, and prior terms. beta/sigma_z2/tau_z are read from the state.
double log_pi2(const CoeffVector& theta, const BmarsState& state,
               const TrainingSet& data, const ObservationSet& obs,
               const Hyperparams& hp);

}  // namespace fieldcal

#endif  // FIELDCAL_POSTERIOR_HPP
