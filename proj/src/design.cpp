#include "fieldcal/design.hpp"

#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fieldcal {

void DesignSpec::validate() const {
  if (num_candidates < 1) throw InvalidConfig("N_s must be >= 1");
  if (num_selected < 1 || num_selected > num_candidates)
    throw InvalidConfig("n_s must be in [1, N_s]");
  if (gamma && !(*gamma > 0.0)) throw InvalidConfig("gamma must be > 0");
  if (pvi_grid.empty()) throw InvalidConfig("pvi grid must be non-empty");
  for (std::size_t i = 0; i < pvi_grid.size(); ++i) {
    if (pvi_grid[i] < 0.0 || pvi_grid[i] > 1.0)
      throw InvalidConfig("pvi values must lie in [0,1]");
    if (i > 0 && pvi_grid[i] <= pvi_grid[i - 1])
      throw InvalidConfig("pvi grid must be strictly increasing");
  }
}

SpatialField coarse_fill(const CoarseData& y_c, int fine_rows, int fine_cols) {
  y_c.require_valid();
  if (fine_rows % y_c.rows != 0 || fine_cols % y_c.cols != 0)
    throw InvalidGeometry("coarse geometry does not divide the fine grid");
  const int fr = fine_rows / y_c.rows;
  const int fc = fine_cols / y_c.cols;
  Eigen::MatrixXd fine(fine_rows, fine_cols);
  for (int i = 0; i < fine_rows; ++i)
    for (int j = 0; j < fine_cols; ++j)
      fine(i, j) = y_c.y((i / fr) * y_c.cols + (j / fc));
  return SpatialField(std::move(fine));
}

std::vector<Eigen::VectorXd> lhs_mvn(const Eigen::VectorXd& center, double gamma,
                                     int n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample count must be >= 1");
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0");
  const int k = static_cast<int>(center.size());
  const double sd = std::sqrt(gamma);
  const boost::math::normal_distribution<double> std_normal;

  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(k));
  std::vector<int> order(n);
  std::vector<double> raw(n);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) raw[i] = rng.normal();
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return raw[a] < raw[b]; });
    // order[r] holds the index of the r-th smallest draw; it receives a value
    // from stratum r, keeping the original random pairing across coordinates.
    for (int r = 0; r < n; ++r) {
      const double q = (r + std::max(rng.uniform(), 1e-12)) / n;
      out[order[r]](j) = center(j) + sd * boost::math::quantile(std_normal, q);
    }
  }
  return out;
}

std::vector<int> maximin_subset(const std::vector<Eigen::VectorXd>& candidates,
                                int n_s) {
  const int n = static_cast<int>(candidates.size());
  if (n_s < 0 || n_s > n)
    throw InvalidInput("subset size must be in [0, candidate count]");
  if (n_s == 0) return {};
  if (n == 1 || n_s == n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }

  int best_a = 0, best_b = 1;
  double best_d = -1.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double d = (candidates[a] - candidates[b]).norm();
      if (d > best_d) {
        best_d = d;
        best_a = a;
        best_b = b;
      }
    }

  std::vector<int> chosen{best_a};
  if (n_s > 1) chosen.push_back(best_b);

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in(n, false);
  in[best_a] = true;
  if (n_s > 1) in[best_b] = true;
  for (int i = 0; i < n; ++i) {
    if (in[i]) continue;
    min_dist[i] = (candidates[i] - candidates[best_a]).norm();
    if (n_s > 1)
      min_dist[i] = std::min(min_dist[i], (candidates[i] - candidates[best_b]).norm());
  }

  while (static_cast<int>(chosen.size()) < n_s) {
    int pick = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (in[i]) continue;
      if (min_dist[i] > best) {
        best = min_dist[i];
        pick = i;
      }
    }
    in[pick] = true;
    chosen.push_back(pick);
    for (int i = 0; i < n; ++i) {
      if (in[i]) continue;
      min_dist[i] = std::min(min_dist[i], (candidates[i] - candidates[pick]).norm());
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

DesignDeck build_training_inputs(const DesignSpec& spec, const CoarseData& y_c,
                                 const CoeffSelection& sel, int fine_rows,
                                 int fine_cols) {
  spec.validate();
  const SpatialField filled = coarse_fill(y_c, fine_rows, fine_cols);
  const CoeffVector theta_obs = select_coeffs(dct2_forward(filled), sel);

  double gamma;
  if (spec.gamma) {
    gamma = *spec.gamma;
  } else {
    // sample variance of the theta_obs entries
    const double mean = theta_obs.theta.mean();
    const double var =
        (theta_obs.theta.array() - mean).square().sum() /
        std::max<int>(theta_obs.k2() - 1, 1);
    gamma = var > 0.0 ? var : 1.0;
  }

  Rng rng(spec.seed);
  const auto candidates = lhs_mvn(theta_obs.theta, gamma, spec.num_candidates, rng);
  const auto picked = maximin_subset(candidates, spec.num_selected);

  DesignDeck deck;
  deck.selection = sel;
  deck.field_rows = fine_rows;
  deck.field_cols = fine_cols;
  deck.theta_obs = theta_obs.theta;
  int run_id = 0;
  for (std::size_t f = 0; f < picked.size(); ++f) {
    deck.field_thetas.push_back(candidates[picked[f]]);
    for (double pvi : spec.pvi_grid) {
      deck.rows.push_back(
          DeckRow{run_id++, static_cast<int>(f), candidates[picked[f]], pvi});
    }
  }
  return deck;
}

}  // namespace fieldcal
