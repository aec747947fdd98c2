#include "fieldcal/predict.hpp"

#include <algorithm>
#include <cmath>

namespace fieldcal {

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidInput("quantile prob outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = prob * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

Prediction predict(const PosteriorStore& store, const PredictorScaling& scaling,
                   const Eigen::VectorXd& x_raw,
                   const std::vector<double>& quantile_probs,
                   bool noise_in_quantiles, Rng& rng) {
  if (store.empty()) throw EmptyStore("posterior store has no draws");
  const Eigen::VectorXd x = scaling.to_unit(x_raw);

  std::vector<double> values;
  values.reserve(store.draws.size());
  double mean = 0.0;
  for (const auto& draw : store.draws) {
    double v = 0.0;
    for (int i = 0; i < draw.state.m(); ++i)
      v += draw.state.beta(i) * eval_basis(draw.state.bases[i], x);
    mean += v;
    if (noise_in_quantiles) v += std::sqrt(draw.state.sigma_z2) * rng.normal();
    values.push_back(v);
  }
  mean /= static_cast<double>(store.draws.size());

  Prediction out;
  out.mean = mean;
  for (double q : quantile_probs) out.quantiles.push_back(empirical_quantile(values, q));
  return out;
}

std::pair<std::vector<ValidationRow>, ValidationMetrics> validate_predictions(
    const PosteriorStore& store, const PredictorScaling& scaling,
    const Eigen::MatrixXd& x_test_raw, const Eigen::VectorXd& z_test,
    std::uint64_t seed) {
  if (x_test_raw.rows() != z_test.size())
    throw InvalidInput("test inputs and outputs disagree on length");
  Rng rng(seed);

  std::vector<ValidationRow> rows;
  rows.reserve(z_test.size());
  double sse = 0.0;
  int covered = 0;
  for (int i = 0; i < z_test.size(); ++i) {
    const Prediction p = predict(store, scaling, x_test_raw.row(i).transpose(),
                                 {0.025, 0.975}, true, rng);
    ValidationRow row;
    row.simulated = z_test(i);
    row.fitted_mean = p.mean;
    row.lo = p.quantiles[0];
    row.hi = p.quantiles[1];
    rows.push_back(row);
    sse += (p.mean - z_test(i)) * (p.mean - z_test(i));
    if (z_test(i) >= row.lo && z_test(i) <= row.hi) ++covered;
  }

  ValidationMetrics m;
  m.rmse = std::sqrt(sse / static_cast<double>(z_test.size()));
  m.coverage95 = static_cast<double>(covered) / static_cast<double>(z_test.size());
  const double zbar = z_test.mean();
  const double sst = (z_test.array() - zbar).square().sum();
  if (sst > 0.0) {
    m.r2 = 1.0 - sse / sst;
    m.r2_defined = true;
  }
  return {rows, m};
}

}  // namespace fieldcal
