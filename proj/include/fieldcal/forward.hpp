#ifndef FIELDCAL_FORWARD_HPP
#define FIELDCAL_FORWARD_HPP

#include <Eigen/Dense>
#include <vector>

#include "fieldcal/design.hpp"
#include "fieldcal/spatial_field.hpp"

namespace fieldcal {

// Deterministic map from a spatial field and known inputs to one raw output.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual double run(const SpatialField& field,
                     const Eigen::VectorXd& known_inputs) const = 0;
};

// Synthetic water-cut stand-in: w = logistic(a * (pvi - b(field))) with
// breakthrough time b(field) = c0 + c1 * mean(exp(field)) over a band of
// cells (the middle row by default). Strictly increasing in pvi, smooth in
// the field, and strictly inside (0,1). Purely a test model; it solves no
// flow physics.
struct ToyWatercutParams {
  double a = 12.0;
  double c0 = 0.4;
  double c1 = 0.4 / 7.38905609893065;  // 0.4 / e^2, so b stays in [0.2, 0.8]
                                       // for constant fields in [-2, 2]
  int band_row = -1;                   // -1: middle row
};

double toy_watercut(const SpatialField& field, double pvi,
                    const ToyWatercutParams& params = {});

class ToyWatercut : public ForwardModel {
 public:
  explicit ToyWatercut(ToyWatercutParams params = {}) : params_(params) {}
  double run(const SpatialField& field,
             const Eigen::VectorXd& known_inputs) const override;

 private:
  ToyWatercutParams params_;
};

struct SimOutput {
  int run_id = 0;
  double pvi = 0.0;
  double raw = 0.0;          // model output in (0,1)
  double transformed = 0.0;  // logit scale, noise included
};

// Run the forward model over every deck row and add Gaussian noise on the
// transformed scale. Each row uses its own RNG stream keyed by run id, so
// results do not depend on evaluation order.
std::vector<SimOutput> simulate_dataset(const DesignDeck& deck,
                                        const ForwardModel& model,
                                        double noise_sd, std::uint64_t seed,
                                        double clamp_eps = 1e-6);

}  // namespace fieldcal

#endif  // FIELDCAL_FORWARD_HPP
