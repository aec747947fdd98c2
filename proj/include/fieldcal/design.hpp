#ifndef FIELDCAL_DESIGN_HPP
#define FIELDCAL_DESIGN_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fieldcal/dct.hpp"
#include "fieldcal/posterior.hpp"
#include "fieldcal/rng.hpp"
#include "fieldcal/spatial_field.hpp"

namespace fieldcal {

struct DesignSpec {
  int num_candidates = 0;          // N_s
  int num_selected = 0;            // n_s
  std::optional<double> gamma;     // sampling variance; default var(theta_obs)
  std::vector<double> pvi_grid;    // known-input values in [0,1], increasing
  std::uint64_t seed = 1;

  void validate() const;
};

// Expand coarse data to the fine grid by replicating each coarse value over
// its block. block_average of the result returns the coarse data exactly.
SpatialField coarse_fill(const CoarseData& y_c, int fine_rows, int fine_cols);

// Latin hypercube sample of size n from N(center, gamma I): per coordinate
// the ranked draws are replaced by stratified normal quantiles jittered
// uniformly within their strata, so each of the n equal-probability strata
// holds exactly one value.
std::vector<Eigen::VectorXd> lhs_mvn(const Eigen::VectorXd& center, double gamma,
                                     int n, Rng& rng);

// Greedy maximin: seed with the farthest pair, then repeatedly add the
// candidate maximizing its minimal distance to the chosen set. Ties break to
// the lowest index. Returns indices into `candidates`.
std::vector<int> maximin_subset(const std::vector<Eigen::VectorXd>& candidates,
                                int n_s);

struct DeckRow {
  int run_id = 0;
  int field_id = 0;
  Eigen::VectorXd theta;
  double pvi = 0.0;
};

// Simulator input deck: n_s selected coefficient vectors crossed with every
// known-input value.
struct DesignDeck {
  CoeffSelection selection;
  int field_rows = 0;
  int field_cols = 0;
  Eigen::VectorXd theta_obs;
  std::vector<Eigen::VectorXd> field_thetas;  // one per selected field
  std::vector<DeckRow> rows;

  int k2() const { return static_cast<int>(theta_obs.size()); }
};

DesignDeck build_training_inputs(const DesignSpec& spec, const CoarseData& y_c,
                                 const CoeffSelection& sel, int fine_rows,
                                 int fine_cols);

}  // namespace fieldcal

#endif  // FIELDCAL_DESIGN_HPP
