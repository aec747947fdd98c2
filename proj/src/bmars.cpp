#include "fieldcal/bmars.hpp"

#include <algorithm>
#include <cmath>

namespace fieldcal {

std::vector<HingeFactor> BasisFunction::canonical() const {
  std::vector<HingeFactor> out = factors;
  std::sort(out.begin(), out.end(),
            [](const HingeFactor& a, const HingeFactor& b) { return a.var < b.var; });
  return out;
}

bool BasisFunction::same_structure(const BasisFunction& other) const {
  if (degree() != other.degree()) return false;
  const auto a = canonical();
  const auto b = other.canonical();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].var != b[i].var || a[i].sign != b[i].sign || a[i].knot != b[i].knot)
      return false;
  }
  return true;
}

void BasisFunction::require_valid(int p, int max_interaction) const {
  if (is_intercept()) return;
  if (degree() > max_interaction)
    throw InvalidBasis("basis degree exceeds the maximum interaction order");
  std::vector<int> seen;
  for (const auto& f : factors) {
    if (f.var < 0 || f.var >= p)
      throw InvalidBasis("basis predictor index out of range");
    if (f.sign != 1 && f.sign != -1) throw InvalidBasis("basis sign must be +-1");
    if (!std::isfinite(f.knot)) throw InvalidBasis("basis knot must be finite");
    if (std::find(seen.begin(), seen.end(), f.var) != seen.end())
      throw InvalidBasis("basis predictors must be distinct");
    seen.push_back(f.var);
  }
}

double eval_basis(const BasisFunction& b, const Eigen::VectorXd& x) {
  if (b.is_intercept()) return 1.0;
  double prod = 1.0;
  for (const auto& f : b.factors) {
    if (f.var < 0 || f.var >= x.size())
      throw InvalidBasis("basis predictor index out of range");
    const double h = f.sign * (x(f.var) - f.knot);
    if (h <= 0.0) return 0.0;
    prod *= h;
  }
  return prod;
}

long long count_basis_types(int k1, int k2, int max_interaction) {
  const int p = k1 + k2;
  if (max_interaction < 1 || max_interaction > p)
    throw InvalidConfig("interaction order must be in [1, k1+k2]");
  long long total = 0;
  // C(p, i) built multiplicatively; p stays desk-scale so no overflow care
  // beyond long long is needed.
  long long binom = 1;
  for (int i = 1; i <= max_interaction; ++i) {
    binom = binom * (p - i + 1) / i;
    total += binom;
  }
  return total;
}

BmarsState BmarsState::intercept_only() {
  BmarsState st;
  st.bases.push_back(BasisFunction{});
  st.beta = Eigen::VectorXd::Zero(1);
  return st;
}

Eigen::VectorXd PredictorScaling::to_unit(const Eigen::VectorXd& raw) const {
  if (raw.size() != offset.size())
    throw InvalidInput("predictor vector length does not match scaling");
  return (raw - offset).cwiseQuotient(scale);
}

PredictorScaling PredictorScaling::fit(const Eigen::MatrixXd& x_raw) {
  PredictorScaling s;
  const int p = static_cast<int>(x_raw.cols());
  s.offset.resize(p);
  s.scale.resize(p);
  for (int j = 0; j < p; ++j) {
    const double lo = x_raw.col(j).minCoeff();
    const double hi = x_raw.col(j).maxCoeff();
    s.offset(j) = lo;
    s.scale(j) = hi > lo ? hi - lo : 1.0;
  }
  return s;
}

PredictorScaling PredictorScaling::identity(int p) {
  PredictorScaling s;
  s.offset = Eigen::VectorXd::Zero(p);
  s.scale = Eigen::VectorXd::Ones(p);
  return s;
}

void TrainingSet::set_observed_theta(const Eigen::VectorXd& theta_raw) {
  if (theta_raw.size() != k2)
    throw InvalidInput("theta length does not match the k2 columns");
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < k2; ++j)
      X(n_s + i, k1 + j) = scaling.to_unit(k1 + j, theta_raw(j));
}

void TrainingSet::require_valid() const {
  if (n_s < 0 || n_r < 0 || k1 < 0 || k2 < 0)
    throw InvalidInput("negative block sizes");
  if (X.rows() != n() || X.cols() != p())
    throw InvalidInput("X dims inconsistent with block sizes");
  if (Z.size() != n()) throw InvalidInput("Z length inconsistent with block sizes");
  if (!X.allFinite() || !Z.allFinite())
    throw InvalidInput("training data contains non-finite values");
}

TrainingSet make_training_set(const Eigen::MatrixXd& x_sim_raw,
                              const Eigen::VectorXd& z_sim,
                              const Eigen::MatrixXd& x_obs_known_raw,
                              const Eigen::VectorXd& z_obs, int k1, int k2) {
  TrainingSet ts;
  ts.n_s = static_cast<int>(x_sim_raw.rows());
  ts.n_r = static_cast<int>(z_obs.size());
  ts.k1 = k1;
  ts.k2 = k2;
  const int p = k1 + k2;
  if (x_sim_raw.cols() != p)
    throw InvalidInput("simulator block must have k1+k2 columns");
  if (ts.n_r > 0 && x_obs_known_raw.cols() != k1)
    throw InvalidInput("observed block must have k1 known-input columns");
  if (z_sim.size() != ts.n_s)
    throw InvalidInput("simulator outputs do not match simulator inputs");

  // Scaling is fitted on the simulator block; the theta columns of the
  // observed block are parameters, not data.
  ts.scaling = ts.n_s > 0 ? PredictorScaling::fit(x_sim_raw)
                          : PredictorScaling::identity(p);

  ts.X.resize(ts.n(), p);
  ts.Z.resize(ts.n());
  for (int i = 0; i < ts.n_s; ++i) {
    for (int j = 0; j < p; ++j) ts.X(i, j) = ts.scaling.to_unit(j, x_sim_raw(i, j));
    ts.Z(i) = z_sim(i);
  }
  for (int i = 0; i < ts.n_r; ++i) {
    for (int j = 0; j < k1; ++j)
      ts.X(ts.n_s + i, j) = ts.scaling.to_unit(j, x_obs_known_raw(i, j));
    for (int j = 0; j < k2; ++j) ts.X(ts.n_s + i, k1 + j) = 0.0;  // set by caller
    ts.Z(ts.n_s + i) = z_obs(i);
  }
  ts.require_valid();
  return ts;
}

Eigen::MatrixXd build_design_matrix(const std::vector<BasisFunction>& bases,
                                    const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(bases.size());
  Eigen::MatrixXd B(n, m);
  for (int j = 0; j < m; ++j) {
    if (bases[j].is_intercept()) {
      B.col(j).setOnes();
      continue;
    }
    for (int i = 0; i < n; ++i) B(i, j) = eval_basis(bases[j], X.row(i).transpose());
  }
  return B;
}

double logit(double z) {
  if (!(z > 0.0 && z < 1.0)) throw InvalidInput("logit requires z in (0,1)");
  return std::log(z / (1.0 - z));
}

double inv_logit(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double clamped_logit(double z, double eps) {
  if (!std::isfinite(z) || z < 0.0 || z > 1.0)
    throw InvalidInput("output outside [0,1] cannot be logit-transformed");
  return logit(std::min(std::max(z, eps), 1.0 - eps));
}

}  // namespace fieldcal
