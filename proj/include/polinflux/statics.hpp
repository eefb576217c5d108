#pragma once

// Comparative statics of the baseline model: the ideological-polarization
// slope and the decomposition of a network strengthening into investment and
// polarization effects.

#include "polinflux/equilibrium.hpp"
#include "polinflux/influence.hpp"
#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

namespace polinflux {

/// dQ*/dsigma = theta (I_F - I_A); Q* is affine in sigma.
inline double dq_dsigma(const Legislature& leg, const ModelParams& params) {
  const PartyVector influence = compute_influence(leg, params.beta());
  return params.theta * (influence.party_F_sum() - influence.party_A_sum());
}

struct NetworkChangeReport {
  PartyVector influence_before;
  PartyVector influence_after;
  Eigen::VectorXd delta_influence;
  double delta_influence_F = 0.0;
  double delta_influence_A = 0.0;

  Eigen::VectorXd investments_before;
  Eigen::VectorXd investments_after;
  Eigen::VectorXd delta_investments;

  double sigma = 0.0;  ///< polarization the probability deltas were evaluated at
  Eigen::VectorXd delta_probabilities;
  double delta_vote_share = 0.0;

  /// sum_i I+_i u(m+*_i) - sum_i I_i u(m*_i); never negative.
  double investment_effect = 0.0;
  /// Set when the opposing party gains more influence: the change helps the
  /// interest group iff sigma < sigma_hat.
  std::optional<double> sigma_hat;
  /// dI_F >= dI_A: the change helps at every sigma.
  bool always_beneficial = false;

  double theta = 0.0;

  /// theta * (investment_effect + sigma (dI_F - dI_A)).
  double predicted_delta_vote_share(double at_sigma) const {
    return theta * (investment_effect + at_sigma * (delta_influence_F - delta_influence_A));
  }
};

/// True when every entry of `after` is >= `before` and at least one is larger.
inline bool is_stronger(const Legislature& before, const Legislature& after) {
  if (before.n_F() != after.n_F() || before.n_A() != after.n_A()) return false;
  const auto diff = (after.adjacency() - before.adjacency()).array();
  return (diff >= 0.0).all() && (diff > 0.0).any();
}

/// Influence of `after` built up link by link from `before`: unit additions go
/// through the rank-one update, weighted changes through a fresh solve. The
/// result is checked against a direct solve of `after`.
inline PartyVector strengthened_influence(const Legislature& before, const Legislature& after, double beta) {
  Legislature current = before;
  PartyVector influence = compute_influence(current, beta);
  const std::size_t n = before.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w_old = before.weight(i, j);
      const double w_new = after.weight(i, j);
      if (w_new == w_old) continue;
      Legislature next = current.with_link(i, j, w_new);
      if (w_old == 0.0 && w_new == 1.0)
        influence = incremental_influence(current, beta, i, j);
      else
        influence = compute_influence(next, beta);
      current = std::move(next);
    }
  }
  const PartyVector direct = compute_influence(after, beta);
  const double gap = (direct.entries() - influence.entries()).cwiseAbs().maxCoeff();
  if (!(gap <= 1e-10 * std::max(1.0, direct.entries().cwiseAbs().maxCoeff())))
    throw Error(ErrorCode::FormulaMismatch, "sequential link updates disagree with a direct solve by " + std::to_string(gap));
  return influence;
}

template <ResourceUtility U = PowerUtility>
NetworkChangeReport analyze_network_change(const Legislature& before, const Legislature& after,
                                           const ModelParams& params, const U& utility = U{}) {
  if (!is_stronger(before, after))
    throw Error(ErrorCode::NotStronger, "the new network must weakly dominate the old one with at least one strict increase");
  params.validate();

  NetworkChangeReport r;
  r.theta = params.theta;
  r.sigma = params.sigma;
  const EquilibriumResult eq_before = solve_equilibrium(before, params, utility);
  const EquilibriumResult eq_after = solve_equilibrium(after, params, utility);

  r.influence_before = eq_before.influence;
  r.influence_after = strengthened_influence(before, after, params.beta());
  r.delta_influence = r.influence_after.entries() - r.influence_before.entries();
  r.delta_influence_F = r.influence_after.party_F_sum() - r.influence_before.party_F_sum();
  r.delta_influence_A = r.influence_after.party_A_sum() - r.influence_before.party_A_sum();

  r.investments_before = eq_before.investments;
  r.investments_after = eq_after.investments;
  r.delta_investments = r.investments_after - r.investments_before;

  r.delta_probabilities = eq_after.probabilities - eq_before.probabilities;
  r.delta_vote_share = eq_after.vote_share - eq_before.vote_share;

  r.investment_effect = eq_after.influence.entries().dot(utility_vector(utility, r.investments_after)) -
                        eq_before.influence.entries().dot(utility_vector(utility, r.investments_before));

  if (r.delta_influence_F >= r.delta_influence_A) {
    r.always_beneficial = true;
  } else {
    r.sigma_hat = r.investment_effect / (r.delta_influence_A - r.delta_influence_F);
  }
  return r;
}

}  // namespace polinflux
