#pragma once

// Baseline equilibrium: conditional voting probabilities, the interest
// group's optimal allocation and the interiority diagnostic.

#include "polinflux/influence.hpp"
#include "polinflux/linalg.hpp"
#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace polinflux {

struct EquilibriumResult {
  Eigen::VectorXd investments;    ///< m*, sums to the budget
  Eigen::VectorXd probabilities;  ///< q*(m*)
  double vote_share = 0.0;        ///< Q* = sum of q*
  double shadow_price = 0.0;      ///< common value of theta * I_i * u'(m*_i)
  Mode mode = Mode::baseline;
  PartyVector influence;          ///< weights the allocation was optimised against
  bool interior = true;           ///< every q*_i strictly inside (0,1)
};

namespace detail {

inline void require_positive_weights(const Eigen::VectorXd& weights) {
  if (weights.size() == 0) throw Error(ErrorCode::NonPositiveInfluence, "empty influence vector");
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (!(weights(i) > 0.0) || !std::isfinite(weights(i)))
      throw Error(ErrorCode::NonPositiveInfluence, "influence entry " + std::to_string(i) + " is " + std::to_string(weights(i)));
}

}  // namespace detail

/// Maximises sum_i w_i u(m_i) subject to sum m = budget through the scalar
/// dual: find lambda with sum_i (u')^-1(lambda / w_i) = budget. The map is
/// strictly decreasing in lambda, so bisection always converges once bracketed.
template <ResourceUtility U>
Eigen::VectorXd optimal_investments_dual(const Eigen::VectorXd& weights, const U& utility, double budget) {
  detail::require_positive_weights(weights);
  if (!(budget > 0.0)) throw Error(ErrorCode::InvalidParams, "budget must be > 0");
  const Eigen::Index n = weights.size();

  auto allocation = [&](double lambda) {
    Eigen::VectorXd m(n);
    for (Eigen::Index i = 0; i < n; ++i) m(i) = utility.marginal_inverse(lambda / weights(i));
    return m;
  };
  auto excess = [&](double lambda) { return allocation(lambda).sum() - budget; };

  // At lo the smallest weight alone absorbs the budget; at hi nobody gets more
  // than budget / n.
  double lo = weights.minCoeff() * utility.marginal(budget);
  double hi = weights.maxCoeff() * utility.marginal(budget / static_cast<double>(n));
  int doublings = 0;
  while (!(excess(lo) >= 0.0)) {
    lo *= 0.5;
    if (++doublings > 200) throw Error(ErrorCode::BisectionFailure, "no lower bracket for the shadow price");
  }
  doublings = 0;
  while (!(excess(hi) <= 0.0)) {
    hi *= 2.0;
    if (++doublings > 200) throw Error(ErrorCode::BisectionFailure, "no upper bracket for the shadow price");
  }

  const double target = 1e-12 * budget;
  double lambda = std::sqrt(lo * hi);
  for (int it = 0; it < 4000; ++it) {
    lambda = std::sqrt(lo * hi);
    const double e = excess(lambda);
    if (std::abs(e) <= target) break;
    if (e > 0.0)
      lo = lambda;
    else
      hi = lambda;
    if (hi <= lo * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) break;
  }
  Eigen::VectorXd m = allocation(lambda);
  if (!(std::abs(m.sum() - budget) <= 1e-10 * budget))
    throw Error(ErrorCode::BisectionFailure, "budget residual " + std::to_string(m.sum() - budget));
  return m;
}

template <ResourceUtility U>
Eigen::VectorXd optimal_investments(const Eigen::VectorXd& weights, const U& utility, double budget) {
  return optimal_investments_dual(weights, utility, budget);
}

/// Power utility has the closed form m_i = w_i^(1/(1-gamma)) / sum_j w_j^(1/(1-gamma)) * budget,
/// which is w_i^2 / sum w_j^2 * budget for the square root.
inline Eigen::VectorXd optimal_investments(const Eigen::VectorXd& weights, const PowerUtility& utility, double budget) {
  detail::require_positive_weights(weights);
  if (!(budget > 0.0)) throw Error(ErrorCode::InvalidParams, "budget must be > 0");
  Eigen::VectorXd shares(weights.size());
  if (utility.gamma == 0.5) {
    shares = weights.array().square();
  } else {
    const double exponent = 1.0 / (1.0 - utility.gamma);
    for (Eigen::Index i = 0; i < weights.size(); ++i) shares(i) = std::pow(weights(i), exponent);
  }
  return shares / shares.sum() * budget;
}

template <ResourceUtility U>
Eigen::VectorXd optimal_investments(const PartyVector& influence, const U& utility, double budget) {
  return optimal_investments(influence.entries(), utility, budget);
}

namespace detail {

inline void require_feasible(const Eigen::VectorXd& m, double budget, std::size_t n) {
  if (static_cast<std::size_t>(m.size()) != n) throw Error(ErrorCode::IndexOutOfRange, "investment vector has wrong length");
  if ((m.array() < 0.0).any()) throw Error(ErrorCode::InvalidParams, "negative investment");
  if (m.sum() > budget * (1.0 + 1e-9)) throw Error(ErrorCode::InvalidParams, "investments exceed the budget");
}

}  // namespace detail

/// q*(m) = 1/2 + theta (Id - beta G)^-1 (u(m) + sigma-vector).
template <ResourceUtility U>
Eigen::VectorXd conditional_probabilities(const Legislature& leg, const ModelParams& params, const U& utility,
                                          const Eigen::VectorXd& m) {
  detail::require_feasible(m, params.budget, leg.n());
  const Eigen::Index n = static_cast<Eigen::Index>(leg.n());
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - params.beta() * leg.adjacency();
  const Eigen::VectorXd drive = utility_vector(utility, m) + sign_vector(leg, params.sigma);
  return Eigen::VectorXd::Constant(n, 0.5) + params.theta * solve_dense(system, drive);
}

/// n/2 + theta sum_i w_i u(m_i) + theta sigma (w_F - w_A).
template <ResourceUtility U>
double vote_share_formula(const PartyVector& weights, const U& utility, const Eigen::VectorXd& m,
                          const ModelParams& params) {
  const double n = static_cast<double>(weights.size());
  return n / 2.0 + params.theta * weights.entries().dot(utility_vector(utility, m)) +
         params.theta * params.sigma * (weights.party_F_sum() - weights.party_A_sum());
}

template <ResourceUtility U>
double shadow_price(const Eigen::VectorXd& weights, const U& utility, const Eigen::VectorXd& m, double theta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) total += theta * weights(i) * utility.marginal(m(i));
  return total / static_cast<double>(m.size());
}

template <ResourceUtility U = PowerUtility>
EquilibriumResult solve_equilibrium(const Legislature& leg, const ModelParams& params, const U& utility = U{}) {
  params.validate();
  EquilibriumResult r;
  r.mode = Mode::baseline;
  r.influence = compute_influence(leg, params.beta());
  r.investments = optimal_investments(r.influence, utility, params.budget);
  r.probabilities = conditional_probabilities(leg, params, utility, r.investments);
  r.vote_share = r.probabilities.sum();
  r.shadow_price = shadow_price(r.influence.entries(), utility, r.investments, params.theta);
  r.interior = (r.probabilities.array() > 0.0).all() && (r.probabilities.array() < 1.0).all();
  return r;
}

struct PartyBounds {
  double upper = 0.0;  ///< highest attainable voting probability for the party
  double lower = 0.0;  ///< lowest attainable voting probability for the party
};

struct InteriorityReport {
  PartyBounds F;
  PartyBounds A;
  bool affective_terms = false;  ///< bounds include the +/- alpha n_{P'} extension
  bool pass = false;
};

/// Worst-case voting probabilities per party: every resource on one legislator,
/// full susceptibility to everyone else, all others voting the same way.
/// In affective mode the cross-party term adds +/- alpha * n_{P'}.
template <ResourceUtility U = PowerUtility>
InteriorityReport check_interiority(const Legislature& leg, const ModelParams& params, const U& utility = U{},
                                    Mode mode = Mode::baseline) {
  InteriorityReport report;
  report.affective_terms = mode == Mode::affective;
  const double network = params.delta * static_cast<double>(leg.n() - 1);
  const double top = utility.value(params.budget);
  auto bounds = [&](Party p) {
    const double cross = report.affective_terms ? params.alpha * static_cast<double>(leg.size(other(p))) : 0.0;
    const double s = params.sigma_for(p);
    return PartyBounds{0.5 + params.theta * (top + network + s + cross), 0.5 + params.theta * (-network + s - cross)};
  };
  report.F = bounds(Party::F);
  report.A = bounds(Party::A);
  report.pass = report.F.upper < 1.0 && report.F.lower > 0.0 && report.A.upper < 1.0 && report.A.lower > 0.0;
  return report;
}

}  // namespace polinflux
