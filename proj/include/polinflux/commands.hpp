#pragma once

// Implementations behind the polinflux command-line tool. Each command turns
// a validated scenario into a Table; the tool decides how to print it.
//
// Exit codes: 0 success, 2 input or validation error, 3 numerical failure.

#include "polinflux/affective.hpp"
#include "polinflux/equilibrium.hpp"
#include "polinflux/influence.hpp"
#include "polinflux/scenario.hpp"
#include "polinflux/simulation.hpp"
#include "polinflux/statics.hpp"
#include "polinflux/table.hpp"
#include "polinflux/validation.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace polinflux {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularSystem:
    case ErrorCode::DenominatorNonPositive:
    case ErrorCode::DegenerateDenominator:
    case ErrorCode::NonPositiveInfluence:
    case ErrorCode::BisectionFailure:
    case ErrorCode::FormulaMismatch:
    case ErrorCode::NoConvergence:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

struct CommandResult {
  Table table;
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
};

/// "a,b,c" or "lo:hi:steps" (steps >= 1 evenly spaced points, inclusive).
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "' in grid '" + spec + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorCode::ParseError, "range grid must be lo:hi:steps");
    const double lo = number(parts[0]);
    const double hi = number(parts[1]);
    const double steps_d = number(parts[2]);
    if (!(steps_d >= 1.0) || steps_d != std::floor(steps_d)) throw Error(ErrorCode::ParseError, "steps must be a positive integer");
    const auto steps = static_cast<int>(steps_d);
    for (int k = 0; k < steps; ++k) grid.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) grid.push_back(number(p));
  }
  if (grid.empty()) throw Error(ErrorCode::ParseError, "empty grid");
  return grid;
}

namespace detail {

/// Throws InvalidParams when the solves would be ill-defined; returns
/// non-fatal findings (beta * n >= 1) as warnings.
inline std::vector<std::string> require_valid(const Legislature& leg, const ModelParams& params, Mode mode) {
  const ValidationReport report = validate_params(leg, params, mode);
  if (!report.solvable()) {
    std::string msg;
    for (const auto& m : report.messages) msg += (msg.empty() ? "" : "; ") + m;
    throw Error(mode == Mode::affective && report.cross_party_links ? ErrorCode::CrossPartyLinksPresent
                : report.alpha_ok                                   ? ErrorCode::InvalidParams
                                                                    : ErrorCode::AlphaTooLarge,
                msg);
  }
  return report.messages;
}

inline std::vector<std::string> legislator_labels(const Legislature& leg) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < leg.n(); ++i) labels.push_back(leg.label(i));
  return labels;
}

}  // namespace detail

inline CommandResult cmd_influence(const Scenario& s, Mode mode) {
  CommandResult r;
  const Legislature& leg = s.legislature;
  r.warnings = detail::require_valid(leg, s.params, mode);
  const ValidationReport check = validate_params(leg, s.params, mode);
  Table& t = r.table;
  t.columns = {"quantity", "label", "value"};

  const PartyVector influence = compute_influence(leg, s.params.beta());
  for (std::size_t i = 0; i < leg.n(); ++i) t.add({"influence", leg.label(i), influence[i]});
  t.add({"party_influence", "F", influence.party_F_sum()});
  t.add({"party_influence", "A", influence.party_A_sum()});
  t.add({"beta_n", Cell{}, check.beta_n});
  t.add({"spectral_radius", Cell{}, check.spectral.radius});
  t.add({"beta_spectral_radius", Cell{}, check.beta_spectral});

  if (mode == Mode::affective) {
    const AffectiveInfluence aff = modified_influence(leg, s.params);
    for (std::size_t i = 0; i < leg.n(); ++i) t.add({"modified_influence", leg.label(i), aff.modified[i]});
    t.add({"modified_party_influence", "F", aff.modified.party_F_sum()});
    t.add({"modified_party_influence", "A", aff.modified.party_A_sum()});
    t.add({"omega", "F", aff.omega_F});
    t.add({"omega", "A", aff.omega_A});
    t.add({"alpha_hat", Cell{}, aff.alpha_hat});
  }
  return r;
}

inline CommandResult cmd_equilibrium(const Scenario& s, Mode mode) {
  CommandResult r;
  const Legislature& leg = s.legislature;
  r.warnings = detail::require_valid(leg, s.params, mode);
  const EquilibriumResult eq = mode == Mode::baseline ? solve_equilibrium(leg, s.params, s.utility)
                                                      : solve_affective_equilibrium(leg, s.params, s.utility);
  const InteriorityReport interior = check_interiority(leg, s.params, s.utility, mode);

  Table& t = r.table;
  t.columns = {"quantity", "label", "value"};
  for (std::size_t i = 0; i < leg.n(); ++i) t.add({"investment", leg.label(i), eq.investments(static_cast<Eigen::Index>(i))});
  for (std::size_t i = 0; i < leg.n(); ++i)
    t.add({"probability", leg.label(i), eq.probabilities(static_cast<Eigen::Index>(i))});
  t.add({"vote_share", Cell{}, eq.vote_share});
  t.add({"shadow_price", Cell{}, eq.shadow_price});
  t.add({"interiority_upper", "F", interior.F.upper});
  t.add({"interiority_lower", "F", interior.F.lower});
  t.add({"interiority_upper", "A", interior.A.upper});
  t.add({"interiority_lower", "A", interior.A.lower});
  t.add({"interiority", Cell{}, std::string(interior.pass ? "pass" : "fail")});
  if (!interior.pass) r.warnings.emplace_back("interiority bounds violated; probabilities may leave (0,1)");
  if (!eq.interior) r.warnings.emplace_back("some equilibrium probability lies outside (0,1)");
  return r;
}

/// One row per quantity, one column per legislator plus Total.
inline CommandResult cmd_compare(const Scenario& s, const std::vector<double>& sigmas) {
  CommandResult r;
  if (!s.has_comparison()) throw Error(ErrorCode::ParseError, "scenario has no comparison_edges");
  const Legislature& before = s.legislature;
  const Legislature after = s.comparison_legislature();
  if (!is_stronger(before, after)) throw Error(ErrorCode::NotStronger, "comparison network is not stronger than the base network");
  r.warnings = detail::require_valid(before, s.params, Mode::baseline);
  for (auto& w : detail::require_valid(after, s.params, Mode::baseline)) r.warnings.push_back("comparison: " + w);

  Table& t = r.table;
  t.columns = {"row"};
  for (auto& l : detail::legislator_labels(before)) t.columns.push_back(l);
  t.columns.push_back("Total");

  auto vector_row = [&](const std::string& name, const Eigen::VectorXd& v) {
    std::vector<Cell> row{name};
    for (Eigen::Index i = 0; i < v.size(); ++i) row.emplace_back(v(i));
    row.emplace_back(v.sum());
    t.add(std::move(row));
  };
  auto scalar_row = [&](const std::string& name, Cell value) {
    std::vector<Cell> row{name};
    row.resize(before.n() + 1);
    row.push_back(std::move(value));
    t.add(std::move(row));
  };

  const std::vector<double> grid = sigmas.empty() ? std::vector<double>{s.params.sigma} : sigmas;
  std::optional<NetworkChangeReport> first;
  for (double sigma : grid) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "sigma must be >= 0");
    ModelParams p = s.params;
    p.sigma = sigma;
    NetworkChangeReport rep = analyze_network_change(before, after, p, s.utility);
    if (!first) {
      vector_row("dI", rep.delta_influence);
      vector_row("dm", rep.delta_investments);
      first = rep;
    }
    vector_row("dq(sigma=" + detail::format_double(sigma, 6) + ")", rep.delta_probabilities);
  }
  scalar_row("investment_effect", first->investment_effect);
  scalar_row("sigma_hat", first->always_beneficial ? Cell{std::string("always-beneficial")} : Cell{*first->sigma_hat});
  return r;
}

enum class SweepVariable { sigma, alpha };

inline CommandResult cmd_sweep(const Scenario& s, Mode mode, SweepVariable variable, const std::vector<double>& grid) {
  CommandResult r;
  const Legislature& leg = s.legislature;
  if (variable == SweepVariable::alpha) mode = Mode::affective;
  r.warnings = detail::require_valid(leg, s.params, mode == Mode::affective ? Mode::affective : Mode::baseline);
  Table& t = r.table;

  if (variable == SweepVariable::sigma) {
    t.columns = {"sigma", "Q_star", "dQ_dsigma"};
    for (double sigma : grid) {
      if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "sigma grid values must be >= 0");
      ModelParams p = s.params;
      p.sigma = sigma;
      if (mode == Mode::baseline) {
        t.add({sigma, solve_equilibrium(leg, p, s.utility).vote_share, dq_dsigma(leg, p)});
      } else {
        const AffectiveInfluence aff = modified_influence(leg, p);
        t.add({sigma, solve_affective_equilibrium(leg, p, s.utility).vote_share, affective_dq_dsigma(aff, p.theta)});
      }
    }
    return r;
  }

  t.columns = {"alpha", "omega_F", "omega_A", "I_alpha_F", "I_alpha_A", "Q_star", "dQ_dalpha"};
  for (double alpha : grid) {
    if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidParams, "alpha grid values must be >= 0");
    ModelParams p = s.params;
    p.alpha = alpha;
    const AffectiveInfluence aff = modified_influence(leg, p);  // AlphaTooLarge past alpha_hat
    const double q = solve_affective_equilibrium(leg, p, s.utility).vote_share;
    t.add({alpha, aff.omega_F, aff.omega_A, aff.modified.party_F_sum(), aff.modified.party_A_sum(), q,
           dq_dalpha(leg, p, s.utility)});
  }
  return r;
}

/// Monte-Carlo check of the equilibrium probabilities. Fails (exit 3) when more
/// than one legislator lands outside three standard errors.
inline CommandResult cmd_simulate(const Scenario& s, Mode mode, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads = 0) {
  CommandResult r;
  if (trials == 0) throw Error(ErrorCode::InvalidParams, "trials must be >= 1");
  const Legislature& leg = s.legislature;
  r.warnings = detail::require_valid(leg, s.params, mode);
  const EquilibriumResult eq = mode == Mode::baseline ? solve_equilibrium(leg, s.params, s.utility)
                                                      : solve_affective_equilibrium(leg, s.params, s.utility);
  const MonteCarloResult mc =
      monte_carlo_frequencies(leg, s.params, s.utility, eq.investments, SimulationConfig{trials, seed, mode, threads});

  Table& t = r.table;
  t.metadata = {"seed=" + std::to_string(seed), "trials=" + std::to_string(trials), std::string("generator=") + mc.generator,
                std::string("mode=") + to_string(mode)};
  t.columns = {"legislator", "q_analytic", "q_empirical", "std_error", "z_score", "pass"};
  std::size_t failures = 0;
  for (std::size_t i = 0; i < leg.n(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double q = eq.probabilities(k);
    const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
    const double z = se > 0.0 ? (mc.frequencies(k) - q) / se : 0.0;
    const bool ok = std::abs(z) <= 3.0;
    failures += ok ? 0 : 1;
    t.add({leg.label(i), q, mc.frequencies(k), se, z, std::string(ok ? "pass" : "fail")});
  }
  if (failures > 1) {
    r.exit_code = kExitNumerical;
    r.warnings.push_back(std::to_string(failures) + " legislators outside 3 standard errors");
  }
  return r;
}

}  // namespace polinflux
