#ifndef FIELDCAL_SAMPLER_HPP
#define FIELDCAL_SAMPLER_HPP

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fieldcal/posterior.hpp"
#include "fieldcal/rng.hpp"

namespace fieldcal {

enum class MoveKind { kBirth, kDeath, kChange, kNone };

// Interior move probabilities; the boundaries are forced to b_1 = 1 and
// d_{m_max} = 1.
struct MoveProbs {
  double birth = 1.0 / 3.0;
  double death = 1.0 / 3.0;
  double change = 1.0 / 3.0;

  void validate() const;
  double birth_prob(int m, int m_max) const;
  double death_prob(int m, int m_max) const;
};

struct ChainConfig {
  long long n_iter = 0;
  long long burn_in = 0;
  long long thin = 1;
  double h = 0.1;            // MH jump scale for theta
  std::uint64_t seed = 1;
  MoveProbs move_probs;
  bool adapt_h = true;       // burn-in-only adaptation of h

  void validate() const;
};

struct StructureProposal {
  std::vector<BasisFunction> bases;
  MoveKind kind = MoveKind::kNone;
  double log_proposal_ratio = 0.0;
};

// One reversible-jump move on (m, c^m). BIRTH draws a type uniformly over the
// N_I predictor subsets, then a knot (a uniformly chosen data row) and a sign
// per factor; DEATH removes a uniformly chosen non-intercept basis; CHANGE
// re-draws the knot and sign of one factor of one basis.
StructureProposal propose_structure_move(const BmarsState& state,
                                         const TrainingSet& data,
                                         const Hyperparams& hp,
                                         const MoveProbs& probs, Rng& rng);

// min(1, exp(logpi1_candidate - logpi1_current + log_proposal_ratio));
// a -inf candidate yields 0.
double rj_accept(double logpi1_current, double logpi1_candidate,
                 double log_proposal_ratio);

// Multivariate-t draw from the marginal conditional of beta (sigma_z^2
// integrated out): t_{n+2a_z}(A^{-1}B'S^{-1}Z, d/(n+2a_z) * A^{-1}).
Eigen::VectorXd gibbs_beta(const std::vector<BasisFunction>& bases,
                           const TrainingSet& data, double tau_z,
                           const Hyperparams& hp, Rng& rng);

// Closed-form conditional shapes/rates, exposed for verification.
std::pair<double, double> sigma_z_shape_rate(const BmarsState& state,
                                             const TrainingSet& data,
                                             const Hyperparams& hp);
std::pair<double, double> tau_z_shape_rate(const BmarsState& state,
                                           const TrainingSet& data,
                                           const Hyperparams& hp);

double gibbs_sigma_z(const BmarsState& state, const TrainingSet& data,
                     const Hyperparams& hp, Rng& rng);
double gibbs_tau_z(const BmarsState& state, const TrainingSet& data,
                   const Hyperparams& hp, Rng& rng);

// Random-walk Metropolis update theta' = theta + h xi, xi ~ N(0, I).
// On acceptance the observed block of `data` is updated in place.
std::pair<CoeffVector, bool> mh_theta(const BmarsState& state,
                                      const CoeffVector& theta, TrainingSet& data,
                                      const ObservationSet& obs,
                                      const Hyperparams& hp, double h, Rng& rng);

struct Draw {
  BmarsState state;
  CoeffVector theta;
  long long iteration = 0;
  MoveKind move = MoveKind::kNone;
  bool move_accepted = false;
  double log_pi2 = std::numeric_limits<double>::quiet_NaN();  // calibration only
};

struct AcceptCounters {
  long long birth_proposed = 0, birth_accepted = 0;
  long long death_proposed = 0, death_accepted = 0;
  long long change_proposed = 0, change_accepted = 0;
  long long theta_proposed = 0, theta_accepted = 0;

  double theta_rate() const {
    return theta_proposed > 0 ? static_cast<double>(theta_accepted) / theta_proposed : 0.0;
  }
};

struct PosteriorStore {
  std::vector<Draw> draws;
  AcceptCounters counters;
  double final_h = 0.0;

  bool empty() const { return draws.empty(); }
};

// Full hybrid chain: per iteration one RJ structure move, Gibbs updates for
// beta and sigma_z^2, a Gibbs update for tau_z (only when an observed block
// exists), and an MH update for theta (only when calibrating against
// observations). Thinned post-burn-in draws are stored. Deterministic given
// the seed.
PosteriorStore run_chain(const ChainConfig& cfg, TrainingSet data,
                         const ObservationSet& obs, const Hyperparams& hp,
                         BmarsState init_state, CoeffVector init_theta);

}  // namespace fieldcal

#endif  // FIELDCAL_SAMPLER_HPP
