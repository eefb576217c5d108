#pragma once

#include "polinflux/affective.hpp"
#include "polinflux/linalg.hpp"
#include "polinflux/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polinflux {

/// Diagnostic for a (legislature, params) pair. Never throws on a violated
/// condition; callers decide which findings are fatal.
struct ValidationReport {
  Mode mode = Mode::baseline;
  bool params_ok = true;  ///< theta, delta, budget > 0 and sigma, alpha >= 0
  double beta_n = 0.0;
  bool beta_n_ok = false;  ///< beta * n < 1, sufficient for every network on n legislators
  SpectralEstimate spectral;
  double beta_spectral = 0.0;
  bool beta_spectral_ok = false;  ///< beta * spectral radius < 1

  // affective mode only
  bool cross_party_links = false;
  std::optional<double> alpha_hat;
  bool alpha_ok = true;

  std::vector<std::string> messages;

  /// Conditions needed for the solves to be well defined (beta * n < 1 is only sufficient).
  bool solvable() const {
    if (!params_ok || !beta_spectral_ok) return false;
    if (mode == Mode::affective) return !cross_party_links && alpha_ok;
    return true;
  }
  bool passed() const { return solvable() && beta_n_ok; }
};

inline ValidationReport validate_params(const Legislature& leg, const ModelParams& params,
                                        Mode mode = Mode::baseline) {
  ValidationReport r;
  r.mode = mode;
  try {
    params.validate();
  } catch (const Error& e) {
    r.params_ok = false;
    r.messages.emplace_back(e.what());
  }
  const double beta = params.beta();
  r.beta_n = beta * static_cast<double>(leg.n());
  r.beta_n_ok = r.beta_n < 1.0;
  if (!r.beta_n_ok) r.messages.emplace_back("beta * n = " + std::to_string(r.beta_n) + " >= 1");

  r.spectral = spectral_radius(leg.adjacency());
  r.beta_spectral = beta * r.spectral.radius;
  r.beta_spectral_ok = r.beta_spectral < 1.0;
  if (!r.beta_spectral_ok)
    r.messages.emplace_back("beta * spectral radius = " + std::to_string(r.beta_spectral) + " >= 1");
  if (!r.spectral.converged) r.messages.emplace_back("spectral radius estimate did not converge; using its upper bound");

  if (mode == Mode::affective) {
    r.cross_party_links = leg.has_cross_party_links();
    if (r.cross_party_links) {
      r.alpha_ok = false;
      r.messages.emplace_back("cross-party links present; affective mode needs none");
    } else if (r.params_ok && r.beta_spectral_ok) {
      const PartyVector I0 = within_party_influence(leg, beta);
      r.alpha_hat = alpha_hat(I0.party_F_sum(), I0.party_A_sum(), params.theta);
      r.alpha_ok = params.alpha < *r.alpha_hat;
      if (!r.alpha_ok)
        r.messages.emplace_back("alpha = " + std::to_string(params.alpha) + " >= alpha_hat = " + std::to_string(*r.alpha_hat));
    }
  }
  return r;
}

}  // namespace polinflux
