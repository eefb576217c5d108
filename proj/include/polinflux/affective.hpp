#pragma once

// Affective polarization: legislators pay alpha per opposite-party legislator
// voting the same way, which acts as a uniform negative cross-party link. With
// no positive cross-party links the modified influence is the within-party
// influence scaled by one factor per party,
//
//   omega_P = (1 - at I0_{P'}) / (1 - at^2 I0_P I0_{P'}),   at = 2 theta alpha,
//
// valid while at < min(1/I0_F, 1/I0_A).

#include "polinflux/equilibrium.hpp"
#include "polinflux/influence.hpp"
#include "polinflux/linalg.hpp"
#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

namespace polinflux {

/// [[delta G_FF, -alpha 1], [-alpha 1, delta G_AA]].
inline Eigen::MatrixXd build_hat_matrix(const Legislature& leg, double delta, double alpha) {
  if (leg.has_cross_party_links())
    throw Error(ErrorCode::CrossPartyLinksPresent, "affective mode assumes no cross-party links");
  const auto n_F = static_cast<Eigen::Index>(leg.n_F());
  const auto n_A = static_cast<Eigen::Index>(leg.n_A());
  Eigen::MatrixXd hat(n_F + n_A, n_F + n_A);
  hat.topLeftCorner(n_F, n_F) = delta * leg.block(Party::F, Party::F);
  hat.bottomRightCorner(n_A, n_A) = delta * leg.block(Party::A, Party::A);
  hat.topRightCorner(n_F, n_A).setConstant(-alpha);
  hat.bottomLeftCorner(n_A, n_F).setConstant(-alpha);
  return hat;
}

/// Influence of each legislator computed from its own party's block only.
inline PartyVector within_party_influence(const Legislature& leg, double beta) {
  Eigen::VectorXd entries(static_cast<Eigen::Index>(leg.n()));
  for (Party p : {Party::F, Party::A}) {
    entries.segment(static_cast<Eigen::Index>(leg.offset(p)), static_cast<Eigen::Index>(leg.size(p))) =
        influence_of(leg.block(p, p), beta);
  }
  return PartyVector(std::move(entries), leg.n_F());
}

/// Supremum of admissible alpha for the given unmodified party influences.
inline double alpha_hat(double I0_F, double I0_A, double theta) {
  return std::min(1.0 / I0_F, 1.0 / I0_A) / (2.0 * theta);
}

inline double omega(double I0_own, double I0_other, double alpha_tilde) {
  return (1.0 - alpha_tilde * I0_other) / (1.0 - alpha_tilde * alpha_tilde * I0_own * I0_other);
}

/// d omega_own / d alpha.
inline double omega_derivative(double I0_own, double I0_other, double theta, double alpha) {
  const double at = 2.0 * theta * alpha;
  const double den = 1.0 - at * at * I0_own * I0_other;
  return -2.0 * theta * I0_other * (1.0 + at * at * I0_own * I0_other - 2.0 * at * I0_own) / (den * den);
}

struct AffectiveInfluence {
  PartyVector unmodified;
  double omega_F = 1.0;
  double omega_A = 1.0;
  PartyVector modified;
  double alpha_hat = 0.0;
  double gap = 0.0;  ///< I^alpha_F - I^alpha_A

  double I0_F() const { return unmodified.party_F_sum(); }
  double I0_A() const { return unmodified.party_A_sum(); }
  double omega_for(Party p) const { return p == Party::F ? omega_F : omega_A; }
};

/// Modified influence by the omega scaling, cross-checked against a direct
/// solve of (Id - 2 theta hat(G)^T) I = 1.
inline AffectiveInfluence modified_influence(const Legislature& leg, const ModelParams& params) {
  if (leg.has_cross_party_links())
    throw Error(ErrorCode::CrossPartyLinksPresent, "affective mode assumes no cross-party links");
  AffectiveInfluence r;
  r.unmodified = within_party_influence(leg, params.beta());
  const double I0_F = r.I0_F();
  const double I0_A = r.I0_A();
  r.alpha_hat = alpha_hat(I0_F, I0_A, params.theta);
  if (!(params.alpha < r.alpha_hat))
    throw Error(ErrorCode::AlphaTooLarge,
                "alpha = " + std::to_string(params.alpha) + " must be below alpha_hat = " + std::to_string(r.alpha_hat));

  const double at = params.alpha_tilde();
  r.omega_F = omega(I0_F, I0_A, at);
  r.omega_A = omega(I0_A, I0_F, at);

  Eigen::VectorXd scaled = r.unmodified.entries();
  scaled.head(static_cast<Eigen::Index>(leg.n_F())) *= r.omega_F;
  scaled.tail(static_cast<Eigen::Index>(leg.n_A())) *= r.omega_A;
  r.modified = PartyVector(scaled, leg.n_F());
  r.gap = (I0_F - I0_A) / (1.0 - at * at * I0_F * I0_A);

  const Eigen::MatrixXd hat = build_hat_matrix(leg, params.delta, params.alpha);
  const Eigen::VectorXd direct = influence_of(hat, 2.0 * params.theta);
  const double mismatch = (direct - scaled).cwiseAbs().maxCoeff();
  if (!(mismatch <= 1e-9 * std::max(1.0, direct.cwiseAbs().maxCoeff())))
    throw Error(ErrorCode::FormulaMismatch, "omega scaling differs from the direct solve by " + std::to_string(mismatch));
  return r;
}

/// Affective level minimising the stronger party's omega:
/// (1 / (2 theta I0_weak)) (1 - sqrt(1 - I0_weak / I0_strong)).
inline double alpha_star(double I0_strong, double I0_weak, double theta) {
  if (I0_strong == I0_weak) throw Error(ErrorCode::EqualInfluence, "alpha* needs strictly different party influences");
  if (!(I0_strong > I0_weak && I0_weak > 0.0))
    throw Error(ErrorCode::InvalidParams, "alpha* needs I0_strong > I0_weak > 0");
  return (1.0 - std::sqrt(1.0 - I0_weak / I0_strong)) / (2.0 * theta * I0_weak);
}

/// Q* = n/2 + theta sum I^alpha_i u(m_i) + theta sigma (I0_F - I0_A) / (1 - at^2 I0_F I0_A).
template <ResourceUtility U>
double affective_vote_share_formula(const AffectiveInfluence& influence, const U& utility, const Eigen::VectorXd& m,
                                    const ModelParams& params) {
  const double n = static_cast<double>(m.size());
  return n / 2.0 + params.theta * influence.modified.entries().dot(utility_vector(utility, m)) +
         params.theta * params.sigma * influence.gap;
}

/// dQ*/dsigma under affective polarization.
inline double affective_dq_dsigma(const AffectiveInfluence& influence, double theta) {
  return theta * influence.gap;
}

template <ResourceUtility U = PowerUtility>
EquilibriumResult solve_affective_equilibrium(const Legislature& leg, const ModelParams& params,
                                              const U& utility = U{}) {
  params.validate();
  const AffectiveInfluence influence = modified_influence(leg, params);
  EquilibriumResult r;
  r.mode = Mode::affective;
  r.influence = influence.modified;
  r.investments = optimal_investments(influence.modified, utility, params.budget);

  const Eigen::Index n = static_cast<Eigen::Index>(leg.n());
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - 2.0 * params.theta * build_hat_matrix(leg, params.delta, params.alpha);
  const Eigen::VectorXd drive = utility_vector(utility, r.investments) + sign_vector(leg, params.sigma);
  r.probabilities = Eigen::VectorXd::Constant(n, 0.5) + params.theta * solve_dense(system, drive);
  r.vote_share = r.probabilities.sum();
  r.shadow_price = shadow_price(influence.modified.entries(), utility, r.investments, params.theta);
  r.interior = (r.probabilities.array() > 0.0).all() && (r.probabilities.array() < 1.0).all();
  return r;
}

/// dQ*/dalpha by the envelope argument: investment responses cancel against
/// the budget constraint, leaving the omega derivatives and the sigma term.
template <ResourceUtility U = PowerUtility>
double dq_dalpha(const Legislature& leg, const ModelParams& params, const U& utility = U{}) {
  const AffectiveInfluence influence = modified_influence(leg, params);
  const Eigen::VectorXd m = optimal_investments(influence.modified, utility, params.budget);
  const Eigen::VectorXd u = utility_vector(utility, m);
  const Eigen::VectorXd& I0 = influence.unmodified.entries();
  const auto n_F = static_cast<Eigen::Index>(leg.n_F());
  const auto n_A = static_cast<Eigen::Index>(leg.n_A());
  const double weighted_F = I0.head(n_F).dot(u.head(n_F));
  const double weighted_A = I0.tail(n_A).dot(u.tail(n_A));

  const double I0_F = influence.I0_F();
  const double I0_A = influence.I0_A();
  const double theta = params.theta;
  const double at = params.alpha_tilde();
  const double den = 1.0 - at * at * I0_F * I0_A;

  const double omega_term = theta * (omega_derivative(I0_F, I0_A, theta, params.alpha) * weighted_F +
                                     omega_derivative(I0_A, I0_F, theta, params.alpha) * weighted_A);
  const double sigma_term = 4.0 * params.sigma * theta * theta * at * I0_A * I0_F * (I0_F - I0_A) / (den * den);
  return omega_term + sigma_term;
}

/// Evaluation point standing in for the open bound alpha -> alpha_hat.
inline double alpha_limit(double alpha_hat) { return (1.0 - 1e-6) * alpha_hat; }

struct PolarizationThresholds {
  /// I0_A > I0_F: lim_{alpha -> alpha_hat} dQ*/dalpha > 0 iff sigma < sigma_1.
  std::optional<double> sigma_1;
  /// I0_F > I0_A: Q*(alpha -> alpha_hat) > Q*(0) iff sigma > sigma_2.
  std::optional<double> sigma_2;
  /// I0_A > I0_F: Q*(alpha -> alpha_hat) > Q*(0) iff sigma < sigma_3.
  std::optional<double> sigma_3;
  std::optional<Party> stronger;
  double alpha_hat = 0.0;
  double alpha_limit = 0.0;  ///< alpha used for the alpha -> alpha_hat investments
};

/// Thresholds on sigma. Terms labelled "at alpha -> alpha_hat" use the
/// equilibrium investments at alpha_limit(alpha_hat); the rest use alpha = 0.
template <ResourceUtility U = PowerUtility>
PolarizationThresholds polarization_thresholds(const Legislature& leg, const ModelParams& params,
                                               const U& utility = U{}) {
  if (leg.has_cross_party_links())
    throw Error(ErrorCode::CrossPartyLinksPresent, "affective mode assumes no cross-party links");
  params.validate();
  PolarizationThresholds t;
  const PartyVector I0 = within_party_influence(leg, params.beta());
  const double I0_F = I0.party_F_sum();
  const double I0_A = I0.party_A_sum();
  t.alpha_hat = alpha_hat(I0_F, I0_A, params.theta);
  t.alpha_limit = alpha_limit(t.alpha_hat);
  if (I0_F == I0_A) return t;

  const Party strong = I0_F > I0_A ? Party::F : Party::A;
  t.stronger = strong;

  ModelParams at_limit = params;
  at_limit.alpha = t.alpha_limit;
  const Eigen::VectorXd u0 = utility_vector(utility, optimal_investments(I0, utility, params.budget));
  const Eigen::VectorXd u_lim =
      utility_vector(utility, optimal_investments(modified_influence(leg, at_limit).modified, utility, params.budget));

  const auto n_F = static_cast<Eigen::Index>(leg.n_F());
  const auto n_A = static_cast<Eigen::Index>(leg.n_A());
  const Eigen::VectorXd I0_Fv = I0.block(Party::F);
  const Eigen::VectorXd I0_Av = I0.block(Party::A);

  if (strong == Party::F) {
    const double gain_F = I0_Fv.dot(u_lim.head(n_F) - u0.head(n_F));
    const double base_A = I0_Av.dot(u0.tail(n_A));
    t.sigma_2 = (base_A - gain_F) / I0_A;
  } else {
    t.sigma_1 = 0.5 * I0_Av.dot(u_lim.tail(n_A)) / I0_A;
    const double gain_A = I0_Av.dot(u_lim.tail(n_A) - u0.tail(n_A));
    const double base_F = I0_Fv.dot(u0.head(n_F));
    t.sigma_3 = (gain_A - base_F) / I0_F;
  }
  return t;
}

}  // namespace polinflux
