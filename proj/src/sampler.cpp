#include "fieldcal/sampler.hpp"

#include <cmath>
#include <limits>

namespace fieldcal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Shared core of the birth/death proposal-ratio formulas so that a birth and
// the death that reverses it have exactly negated log ratios.
// m_low is the basis count of the smaller model (the birth source).
double log_birth_death_core(int degree, int m_low, int m_max, const MoveProbs& probs,
                            double log_ni, double log_2n) {
  return std::log(probs.death_prob(m_low + 1, m_max)) -
         std::log(static_cast<double>(m_low)) -
         std::log(probs.birth_prob(m_low, m_max)) + log_ni + degree * log_2n;
}

// Uniform J-subset of {0..p-1} via selection sampling.
std::vector<int> sample_subset(int p, int j, Rng& rng) {
  std::vector<int> out;
  out.reserve(j);
  int need = j;
  for (int i = 0; i < p && need > 0; ++i) {
    if (rng.uniform() * (p - i) < need) {
      out.push_back(i);
      --need;
    }
  }
  return out;
}

BasisFunction draw_basis(const TrainingSet& data, const Hyperparams& hp, Rng& rng) {
  const int p = data.p();
  // Degree J drawn with probability C(p,J)/N_I, i.e. the type is uniform
  // over all admissible predictor subsets.
  const double ni =
      static_cast<double>(count_basis_types(data.k1, data.k2, hp.max_interaction));
  double u = rng.uniform() * ni;
  int degree = 1;
  double binom = static_cast<double>(p);
  while (u > binom && degree < hp.max_interaction) {
    u -= binom;
    ++degree;
    binom = binom * (p - degree + 1) / degree;
  }
  BasisFunction b;
  for (int var : sample_subset(p, degree, rng)) {
    HingeFactor f;
    f.var = var;
    f.knot = data.knot_value(var, rng.uniform_int(data.knot_pool_size()));
    f.sign = rng.sign();
    b.factors.push_back(f);
  }
  return b;
}

}  // namespace

void MoveProbs::validate() const {
  if (birth < 0 || death < 0 || change < 0 ||
      std::abs(birth + death + change - 1.0) > 1e-12)
    throw InvalidConfig("move probabilities must be >= 0 and sum to 1");
}

double MoveProbs::birth_prob(int m, int m_max) const {
  if (m_max == 1) return 0.0;
  if (m <= 1) return 1.0;
  if (m >= m_max) return 0.0;
  return birth;
}

double MoveProbs::death_prob(int m, int m_max) const {
  if (m_max == 1) return 0.0;
  if (m <= 1) return 0.0;
  if (m >= m_max) return 1.0;
  return death;
}

void ChainConfig::validate() const {
  if (n_iter < 1) throw InvalidConfig("n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter)
    throw InvalidConfig("burn_in must be in [0, n_iter)");
  if (thin < 1) throw InvalidConfig("thin must be >= 1");
  if (!(h > 0.0)) throw InvalidConfig("h must be > 0");
  move_probs.validate();
}

StructureProposal propose_structure_move(const BmarsState& state,
                                         const TrainingSet& data,
                                         const Hyperparams& hp,
                                         const MoveProbs& probs, Rng& rng) {
  const int m = state.m();
  const int m_max = hp.m_max;
  StructureProposal prop;
  prop.bases = state.bases;
  if (m_max == 1) return prop;  // intercept-only model, nothing to move

  const double log_ni = std::log(
      static_cast<double>(count_basis_types(data.k1, data.k2, hp.max_interaction)));
  const double log_2n = std::log(2.0 * data.knot_pool_size());

  const double b = probs.birth_prob(m, m_max);
  const double d = probs.death_prob(m, m_max);
  const double u = rng.uniform();

  if (u < b) {
    prop.kind = MoveKind::kBirth;
    prop.bases.push_back(draw_basis(data, hp, rng));
    prop.log_proposal_ratio =
        log_birth_death_core(prop.bases.back().degree(), m, m_max, probs, log_ni, log_2n);
  } else if (u < b + d) {
    prop.kind = MoveKind::kDeath;
    const int idx = 1 + rng.uniform_int(m - 1);
    const int degree = prop.bases[idx].degree();
    prop.bases.erase(prop.bases.begin() + idx);
    prop.log_proposal_ratio =
        -log_birth_death_core(degree, m - 1, m_max, probs, log_ni, log_2n);
  } else {
    prop.kind = MoveKind::kChange;
    const int idx = 1 + rng.uniform_int(m - 1);
    const int f = rng.uniform_int(prop.bases[idx].degree());
    HingeFactor& factor = prop.bases[idx].factors[f];
    factor.knot = data.knot_value(factor.var, rng.uniform_int(data.knot_pool_size()));
    factor.sign = rng.sign();
    prop.log_proposal_ratio = 0.0;
  }
  return prop;
}

double rj_accept(double logpi1_current, double logpi1_candidate,
                 double log_proposal_ratio) {
  if (!std::isfinite(logpi1_current))
    throw InvalidInput("current state must have finite log density");
  if (logpi1_candidate == kNegInf || std::isnan(logpi1_candidate)) return 0.0;
  const double log_ratio = logpi1_candidate - logpi1_current + log_proposal_ratio;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

Eigen::VectorXd gibbs_beta(const std::vector<BasisFunction>& bases,
                           const TrainingSet& data, double tau_z,
                           const Hyperparams& hp, Rng& rng) {
  const RidgeSystem sys = ridge_system(bases, data, tau_z, hp);
  const double dof = data.n() + 2.0 * hp.a_z;
  const double chi2 = rng.chi_square(dof);

  Eigen::VectorXd z(sys.v.size());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // Cov(L^{-T} z) = A^{-1}; the t scale mixing gives beta = v + sqrt(d/chi2) L^{-T} z.
  const Eigen::VectorXd dir = sys.llt.matrixU().solve(z);
  return sys.v + std::sqrt(sys.d / chi2) * dir;
}

std::pair<double, double> sigma_z_shape_rate(const BmarsState& state,
                                             const TrainingSet& data,
                                             const Hyperparams& hp) {
  const Eigen::MatrixXd B = build_design_matrix(state.bases, data.X);
  const Eigen::VectorXd resid = data.Z - B * state.beta;
  double quad = resid.head(data.n_s).squaredNorm();
  if (data.n_r > 0) quad += resid.tail(data.n_r).squaredNorm() / state.tau_z;
  const double shape = hp.a_z + 0.5 * (state.m() + data.n());
  const double rate =
      hp.b_z + 0.5 * quad + state.beta.squaredNorm() / (2.0 * hp.alpha);
  return {shape, rate};
}

std::pair<double, double> tau_z_shape_rate(const BmarsState& state,
                                           const TrainingSet& data,
                                           const Hyperparams& hp) {
  double quad = 0.0;
  if (data.n_r > 0) {
    const Eigen::MatrixXd b_r =
        build_design_matrix(state.bases, data.X.bottomRows(data.n_r));
    quad = (data.Z.tail(data.n_r) - b_r * state.beta).squaredNorm();
  }
  return {hp.a_tau + 0.5 * data.n_r, hp.b_tau + quad / (2.0 * state.sigma_z2)};
}

double gibbs_sigma_z(const BmarsState& state, const TrainingSet& data,
                     const Hyperparams& hp, Rng& rng) {
  const auto [shape, rate] = sigma_z_shape_rate(state, data, hp);
  return rng.inv_gamma(shape, rate);
}

double gibbs_tau_z(const BmarsState& state, const TrainingSet& data,
                   const Hyperparams& hp, Rng& rng) {
  const auto [shape, rate] = tau_z_shape_rate(state, data, hp);
  return rng.inv_gamma(shape, rate);
}

std::pair<CoeffVector, bool> mh_theta(const BmarsState& state,
                                      const CoeffVector& theta, TrainingSet& data,
                                      const ObservationSet& obs,
                                      const Hyperparams& hp, double h, Rng& rng) {
  CoeffVector cand = theta;
  for (int i = 0; i < cand.theta.size(); ++i) cand.theta(i) += h * rng.normal();

  // Symmetric proposal: the q terms cancel.
  const double cur = log_pi2(theta, state, data, obs, hp);
  const double prop = log_pi2(cand, state, data, obs, hp);
  const double log_a = prop - cur;

  if (std::log(rng.uniform()) < log_a) {
    if (data.n_r > 0) data.set_observed_theta(cand.theta);
    return {cand, true};
  }
  return {theta, false};
}

PosteriorStore run_chain(const ChainConfig& cfg, TrainingSet data,
                         const ObservationSet& obs, const Hyperparams& hp,
                         BmarsState init_state, CoeffVector init_theta) {
  cfg.validate();
  hp.validate();
  data.require_valid();
  if (obs.n_r() != data.n_r)
    throw InvalidInput("observation set and training set disagree on n_r");

  const bool calibrating = !obs.empty();
  const bool sample_tau = data.n_r > 0;
  if (calibrating) {
    if (init_theta.k2() < 1)
      throw InvalidInput("calibration requires a theta parameter");
    obs.validate(init_theta.field_rows, init_theta.field_cols);
    if (data.n_r > 0) data.set_observed_theta(init_theta.theta);
  }
  if (init_state.m() < 1 || !init_state.bases[0].is_intercept())
    throw InvalidInput("initial state must start with the intercept basis");

  Rng rng(cfg.seed);
  BmarsState state = std::move(init_state);
  CoeffVector theta = std::move(init_theta);
  if (!sample_tau) state.tau_z = 1.0;

  PosteriorStore store;
  double h = cfg.h;
  double cur_logpi1 = kNegInf;
  bool logpi1_stale = true;
  long long window_proposed = 0, window_accepted = 0;

  const auto eval_logpi1 = [&](const std::vector<BasisFunction>& bases) -> double {
    try {
      return log_pi1_parts(bases, data, state.tau_z, hp).total();
    } catch (const DegenerateState&) {
      return kNegInf;
    }
  };

  for (long long iter = 1; iter <= cfg.n_iter; ++iter) {
    MoveKind move = MoveKind::kNone;
    bool accepted = false;

    // Step 1a: reversible-jump move on the basis structure.
    if (hp.m_max > 1) {
      if (logpi1_stale) {
        cur_logpi1 = eval_logpi1(state.bases);
        logpi1_stale = false;
      }
      StructureProposal prop = propose_structure_move(state, data, hp,
                                                      cfg.move_probs, rng);
      move = prop.kind;
      const double cand_logpi1 = eval_logpi1(prop.bases);
      const double a = std::isfinite(cur_logpi1)
                           ? rj_accept(cur_logpi1, cand_logpi1, prop.log_proposal_ratio)
                           : (std::isfinite(cand_logpi1) ? 1.0 : 0.0);
      switch (move) {
        case MoveKind::kBirth: ++store.counters.birth_proposed; break;
        case MoveKind::kDeath: ++store.counters.death_proposed; break;
        case MoveKind::kChange: ++store.counters.change_proposed; break;
        case MoveKind::kNone: break;
      }
      if (rng.uniform() < a) {
        accepted = true;
        state.bases = std::move(prop.bases);
        cur_logpi1 = cand_logpi1;
        switch (move) {
          case MoveKind::kBirth: ++store.counters.birth_accepted; break;
          case MoveKind::kDeath: ++store.counters.death_accepted; break;
          case MoveKind::kChange: ++store.counters.change_accepted; break;
          case MoveKind::kNone: break;
        }
      }
    }

    // Steps 1b, 1c: Gibbs draws for beta and sigma_z^2.
    try {
      state.beta = gibbs_beta(state.bases, data, state.tau_z, hp, rng);
    } catch (const DegenerateState&) {
      // keep the previous coefficients; the state remains valid
    }
    state.sigma_z2 = gibbs_sigma_z(state, data, hp, rng);

    // Step 2: tau_z has a conjugate update only when observed outputs exist.
    if (sample_tau) {
      state.tau_z = gibbs_tau_z(state, data, hp, rng);
      logpi1_stale = true;
    }

    // Step 3: random-walk Metropolis on theta.
    if (calibrating && theta.k2() > 0) {
      ++store.counters.theta_proposed;
      ++window_proposed;
      auto [next, acc] = mh_theta(state, theta, data, obs, hp, h, rng);
      theta = std::move(next);
      if (acc) {
        ++store.counters.theta_accepted;
        ++window_accepted;
        if (data.n_r > 0) logpi1_stale = true;
      }
      if (cfg.adapt_h && iter <= cfg.burn_in && iter % 100 == 0 &&
          window_proposed > 0) {
        const double rate = static_cast<double>(window_accepted) / window_proposed;
        if (rate > 0.4) h *= 1.1;
        if (rate < 0.2) h /= 1.1;
        window_proposed = window_accepted = 0;
      }
    }

    if (iter > cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
      Draw draw{state, theta, iter, move, accepted};
      if (calibrating && theta.k2() > 0)
        draw.log_pi2 = log_pi2(theta, state, data, obs, hp);
      store.draws.push_back(std::move(draw));
    }
  }
  store.final_h = h;
  return store;
}

}  // namespace fieldcal
