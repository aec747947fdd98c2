#include "fieldcal/forward.hpp"

#include <cmath>

#include "fieldcal/bmars.hpp"

namespace fieldcal {

double toy_watercut(const SpatialField& field, double pvi,
                    const ToyWatercutParams& params) {
  field.require_valid();
  if (!(pvi >= 0.0 && pvi <= 1.0)) throw InvalidInput("pvi must lie in [0,1]");
  const int row = params.band_row >= 0 ? params.band_row : field.rows() / 2;
  if (row >= field.rows()) throw InvalidInput("band row outside the field");
  const double band_mean = field.values.row(row).array().exp().mean();
  const double breakthrough = params.c0 + params.c1 * band_mean;
  return 1.0 / (1.0 + std::exp(-params.a * (pvi - breakthrough)));
}

double ToyWatercut::run(const SpatialField& field,
                        const Eigen::VectorXd& known_inputs) const {
  if (known_inputs.size() < 1)
    throw InvalidInput("toy watercut expects the pore-volume input");
  return toy_watercut(field, known_inputs(0), params_);
}

std::vector<SimOutput> simulate_dataset(const DesignDeck& deck,
                                        const ForwardModel& model,
                                        double noise_sd, std::uint64_t seed,
                                        double clamp_eps) {
  if (noise_sd < 0.0) throw InvalidInput("noise sd must be >= 0");
  std::vector<SimOutput> out;
  out.reserve(deck.rows.size());
  for (const auto& row : deck.rows) {
    CoeffVector cv;
    cv.theta = row.theta;
    cv.selection = deck.selection;
    cv.field_rows = deck.field_rows;
    cv.field_cols = deck.field_cols;
    const SpatialField field = reconstruct(cv);

    Eigen::VectorXd known(1);
    known(0) = row.pvi;
    const double raw = model.run(field, known);

    double z = clamped_logit(raw, clamp_eps);
    if (noise_sd > 0.0) {
      Rng stream(mix_seed(seed, static_cast<std::uint64_t>(row.run_id)));
      z += noise_sd * stream.normal();
    }
    out.push_back(SimOutput{row.run_id, row.pvi, raw, z});
  }
  return out;
}

}  // namespace fieldcal
