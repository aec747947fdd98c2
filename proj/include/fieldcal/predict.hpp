#ifndef FIELDCAL_PREDICT_HPP
#define FIELDCAL_PREDICT_HPP

#include <vector>

#include "fieldcal/sampler.hpp"

namespace fieldcal {

struct Prediction {
  double mean = 0.0;                // across-draw mean of the emulator value
  std::vector<double> quantiles;    // one per requested probability
};

// Posterior-predictive emulation at a raw-space input: per draw the emulator
// value sum beta_i B_i(x), optionally with predictive noise N(0, sigma_z^2)
// added before taking quantiles. The mean always excludes the noise.
Prediction predict(const PosteriorStore& store, const PredictorScaling& scaling,
                   const Eigen::VectorXd& x_raw,
                   const std::vector<double>& quantile_probs,
                   bool noise_in_quantiles, Rng& rng);

// Linear-interpolation empirical quantile of an unsorted sample.
double empirical_quantile(std::vector<double> values, double prob);

struct ValidationMetrics {
  double rmse = 0.0;
  double r2 = 0.0;
  bool r2_defined = false;   // false when the target is constant
  double coverage95 = 0.0;
};

struct ValidationRow {
  double simulated = 0.0;
  double fitted_mean = 0.0;
  double lo = 0.0;   // 2.5% predictive quantile
  double hi = 0.0;   // 97.5% predictive quantile
};

// Per-point predictions plus summary metrics against held-out outputs.
std::pair<std::vector<ValidationRow>, ValidationMetrics> validate_predictions(
    const PosteriorStore& store, const PredictorScaling& scaling,
    const Eigen::MatrixXd& x_test_raw, const Eigen::VectorXd& z_test,
    std::uint64_t seed);

}  // namespace fieldcal

#endif  // FIELDCAL_PREDICT_HPP
