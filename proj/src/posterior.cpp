#include "fieldcal/posterior.hpp"

#include <cmath>

#include "fieldcal/upscale.hpp"

namespace fieldcal {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Weighted design-matrix products with S^{-1} = diag(1,...,1, 1/tau,...,1/tau)
// applied implicitly.
Eigen::VectorXd s_inverse_weights(int n_s, int n_r, double tau_z) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n_s + n_r);
  w.tail(n_r).setConstant(1.0 / tau_z);
  return w;
}

}  // namespace

void Hyperparams::validate() const {
  const double shapes[] = {a_z, b_z, a_tau, b_tau, a_c, b_c, a_k, b_k, a_o, b_o};
  for (double v : shapes)
    if (!(v > 0.0)) throw InvalidConfig("hyperparameter shape/rate values must be > 0");
  if (!(alpha >= 1.0)) throw InvalidConfig("alpha must be >= 1");
  if (!(lambda > 0.0)) throw InvalidConfig("lambda must be > 0");
  if (m_max < 1) throw InvalidConfig("m_max must be >= 1");
  if (max_interaction < 1) throw InvalidConfig("max interaction order must be >= 1");
}

void CoarseData::require_valid() const {
  if (rows < 1 || cols < 1) throw InvalidInput("coarse geometry must be >= 1x1");
  if (y.size() != rows * cols)
    throw InvalidInput("coarse data length does not match its geometry");
  if (!y.allFinite()) throw InvalidInput("coarse data contains non-finite values");
}

void ObservationSet::validate(int field_rows, int field_cols) const {
  if (n_r() > 0 && x_r.rows() != n_r())
    throw InvalidInput("observed inputs do not match observed outputs");
  if (coarse) {
    coarse->require_valid();
    if (field_rows % coarse->rows != 0 || field_cols % coarse->cols != 0)
      throw InvalidInput("coarse geometry does not divide the fine grid");
  }
  for (const auto& o : fine) {
    if (o.row < 0 || o.row >= field_rows || o.col < 0 || o.col >= field_cols)
      throw InvalidInput("fine observation outside the fine grid");
    if (!std::isfinite(o.value))
      throw InvalidInput("fine observation is non-finite");
  }
}

RidgeSystem ridge_system(const std::vector<BasisFunction>& bases,
                         const TrainingSet& data, double tau_z,
                         const Hyperparams& hp) {
  if (!(tau_z > 0.0)) throw InvalidInput("tau_z must be > 0");
  const int m = static_cast<int>(bases.size());
  RidgeSystem sys;
  sys.B = build_design_matrix(bases, data.X);
  const Eigen::VectorXd w = s_inverse_weights(data.n_s, data.n_r, tau_z);

  sys.A = sys.B.transpose() * w.asDiagonal() * sys.B;
  sys.A.diagonal().array() += 1.0 / hp.alpha;
  sys.u = sys.B.transpose() * (w.asDiagonal() * data.Z);

  if (!sys.A.allFinite()) throw DegenerateState("non-finite normal equations");
  sys.llt.compute(sys.A);
  if (sys.llt.info() != Eigen::Success)
    throw DegenerateState("Cholesky factorization of B'S^-1B + I/alpha failed");

  sys.v = sys.llt.solve(sys.u);
  // Residual form avoids the catastrophic cancellation of Z'WZ - u'A^{-1}u
  // when the fit is nearly exact.
  const Eigen::VectorXd r = data.Z - sys.B * sys.v;
  sys.resid_quad = r.dot(w.asDiagonal() * r) + sys.v.squaredNorm() / hp.alpha;
  sys.d = 2.0 * hp.b_z + sys.resid_quad;

  sys.logdet_A = 0.0;
  for (int i = 0; i < m; ++i) sys.logdet_A += 2.0 * std::log(sys.llt.matrixLLT()(i, i));
  if (!std::isfinite(sys.logdet_A) || !std::isfinite(sys.d))
    throw DegenerateState("non-finite marginal pieces");
  return sys;
}

StructureLogDensity log_pi1_parts(const std::vector<BasisFunction>& bases,
                                  const TrainingSet& data, double tau_z,
                                  const Hyperparams& hp) {
  hp.validate();
  data.require_valid();
  if (bases.empty() || !bases[0].is_intercept())
    throw InvalidBasis("bases[0] must be the intercept");
  const int m = static_cast<int>(bases.size());
  if (m > hp.m_max) throw InvalidBasis("basis count exceeds m_max");
  for (const auto& b : bases) b.require_valid(data.p(), hp.max_interaction);

  const RidgeSystem sys = ridge_system(bases, data, tau_z, hp);
  const int n = data.n();

  StructureLogDensity out;
  // Gaussian-inverse-gamma marginal of Z with beta and sigma_z^2 integrated
  // out; log|S| reduces to n_r log(tau_z).
  out.marginal_loglik = -0.5 * n * kLog2Pi - 0.5 * data.n_r * std::log(tau_z) -
                        0.5 * m * std::log(hp.alpha) - 0.5 * sys.logdet_A -
                        (0.5 * n + hp.a_z) * std::log(0.5 * sys.d) +
                        std::lgamma(0.5 * n + hp.a_z) + hp.a_z * std::log(hp.b_z) -
                        std::lgamma(hp.a_z);

  // Each non-intercept basis: type uniform over N_I subsets, then per factor
  // a knot (one of the data rows) and a sign.
  const double log_ni =
      std::log(static_cast<double>(count_basis_types(data.k1, data.k2, hp.max_interaction)));
  const double log_2n = std::log(2.0 * data.knot_pool_size());
  double lp = 0.0;
  for (int i = 1; i < m; ++i) lp -= log_ni + bases[i].degree() * log_2n;
  out.log_structure_prior = lp;

  // (m-1) ~ Poisson(lambda) truncated at m_max - 1. The pmf's 1/(m-1)! is
  // cancelled by the (m-1)! orderings of the exchangeable basis list, so the
  // density over ordered states carries lambda^(m-1) alone; the chain's
  // m-marginal still follows the truncated Poisson.
  out.log_m_prior = (m - 1) * std::log(hp.lambda);
  return out;
}

double log_pi1(const std::vector<BasisFunction>& bases, const CoeffVector& theta,
               double tau_z, const TrainingSet& data, const Hyperparams& hp) {
  TrainingSet local = data;
  if (local.n_r > 0) local.set_observed_theta(theta.theta);
  return log_pi1_parts(bases, local, tau_z, hp).total();
}

double log_coarse(const CoarseData& y_c, const CoeffVector& theta,
                  const Hyperparams& hp) {
  y_c.require_valid();
  const Eigen::VectorXd lc = upscale_from_theta(theta, y_c.rows, y_c.cols);
  const double ss = (y_c.y - lc).squaredNorm();
  return -(hp.a_c + 0.5 * y_c.size()) * std::log(hp.b_c + 0.5 * ss);
}

double log_fine(const std::vector<FineObs>& y_o, const CoeffVector& theta,
                const Hyperparams& hp) {
  if (y_o.empty()) return 0.0;
  const SpatialField field = reconstruct(theta);
  double ss = 0.0;
  for (const auto& o : y_o) {
    if (o.row < 0 || o.row >= field.rows() || o.col < 0 || o.col >= field.cols())
      throw InvalidInput("fine observation outside the fine grid");
    const double r = o.value - field.values(o.row, o.col);
    ss += r * r;
  }
  return -(hp.a_k + 0.5 * y_o.size()) * std::log(hp.b_k + 0.5 * ss);
}

double log_prior_theta(const CoeffVector& theta, const Hyperparams& hp) {
  if (theta.k2() < 1) throw InvalidInput("theta must have at least one coefficient");
  return -(hp.a_o + 0.5 * theta.k2()) * std::log(hp.b_o + 0.5 * theta.theta.squaredNorm());
}

double log_pi2(const CoeffVector& theta, const BmarsState& state,
               const TrainingSet& data, const ObservationSet& obs,
               const Hyperparams& hp) {
  double total = log_prior_theta(theta, hp);

  // The reconstruction is shared by the coarse and fine terms.
  const bool needs_field = obs.coarse.has_value() || !obs.fine.empty();
  SpatialField field;
  if (needs_field) field = reconstruct(theta);

  if (obs.coarse) {
    obs.coarse->require_valid();
    const SpatialField coarse = block_average(field, theta.field_rows / obs.coarse->rows,
                                              theta.field_cols / obs.coarse->cols);
    double ss = 0.0;
    for (int i = 0; i < obs.coarse->rows; ++i)
      for (int j = 0; j < obs.coarse->cols; ++j) {
        const double r = obs.coarse->y(i * obs.coarse->cols + j) - coarse.values(i, j);
        ss += r * r;
      }
    total += -(hp.a_c + 0.5 * obs.coarse->size()) * std::log(hp.b_c + 0.5 * ss);
  }

  if (!obs.fine.empty()) {
    double ss = 0.0;
    for (const auto& o : obs.fine) {
      if (o.row < 0 || o.row >= field.rows() || o.col < 0 || o.col >= field.cols())
        throw InvalidInput("fine observation outside the fine grid");
      const double r = o.value - field.values(o.row, o.col);
      ss += r * r;
    }
    total += -(hp.a_k + 0.5 * static_cast<double>(obs.fine.size())) *
             std::log(hp.b_k + 0.5 * ss);
  }

  if (data.n_r > 0) {
    if (theta.k2() != data.k2)
      throw InvalidInput("theta length does not match the k2 columns");
    // Observed-block design matrix rebuilt with the candidate theta.
    Eigen::MatrixXd x_obs = data.X.bottomRows(data.n_r);
    for (int i = 0; i < data.n_r; ++i)
      for (int j = 0; j < data.k2; ++j)
        x_obs(i, data.k1 + j) = data.scaling.to_unit(data.k1 + j, theta.theta(j));
    const Eigen::MatrixXd b_r = build_design_matrix(state.bases, x_obs);
    const Eigen::VectorXd resid = data.Z.tail(data.n_r) - b_r * state.beta;
    total += -resid.squaredNorm() / (2.0 * state.sigma_z2 * state.tau_z);
  }

  return total;
}

}  // namespace fieldcal
