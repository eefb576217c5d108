// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include "oracles.hpp"
#include "polinflux/commands.hpp"
#include "polinflux/polinflux.hpp"
#include "reference_values.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace polinflux;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) { return detail::format_double(v, 6); }

ModelParams example_params(double sigma) {
  ModelParams p;
  p.theta = reference::theta;
  p.delta = reference::delta;
  p.budget = reference::budget;
  p.sigma = sigma;
  return p;
}

double cell(const Table& t, const std::string& row, std::size_t col) {
  for (const auto& r : t.rows)
    if (std::get<std::string>(r[0]) == row) return std::get<double>(r[col]);
  throw std::runtime_error("missing row " + row);
}

Outcome change_table_reproduction() {
  Outcome o;
  const auto t0 = Clock::now();
  const Scenario s = load_scenario(std::string(POLINFLUX_SCENARIOS) + "/example1.json");
  const Table t = cmd_compare(s, {3.0, 6.0}).table;
  const double elapsed = seconds_since(t0);
  const double tol = reference::tolerance;
  double worst = 0.0;
  auto compare = [&](const std::string& row, std::size_t col, double expected) {
    const double got = cell(t, row, col);
    worst = std::max(worst, std::abs(got - expected));
    o.require(std::abs(got - expected) <= tol, row + " col " + std::to_string(col) + " = " + fmt(got));
  };
  for (std::size_t i = 0; i < 4; ++i) {
    compare("dI", i + 1, reference::dI[i]);
    compare("dm", i + 1, reference::dm[i]);
    compare("dq(sigma=3)", i + 1, reference::dq_sigma3[i]);
  }
  compare("dI", 5, reference::dI_total);
  compare("dq(sigma=3)", 5, reference::dQ_sigma3);
  compare("dq(sigma=6)", 5, reference::dQ_sigma6);
  o.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  if (o.pass) o.detail = "max abs error " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return o;
}

Outcome sigma_hat_reproduction() {
  Outcome o;
  const Legislature before = oracle::example_network();
  const Legislature after = oracle::example_strengthened();
  const NetworkChangeReport r = analyze_network_change(before, after, example_params(0.0));
  o.require(r.sigma_hat.has_value(), "no sigma_hat");
  if (!o.pass) return o;
  const double s_hat = *r.sigma_hat;
  o.require(std::abs(s_hat - reference::sigma_hat) <= reference::tolerance, "sigma_hat = " + fmt(s_hat));
  auto dQ = [&](double s) {
    return solve_equilibrium(after, example_params(s)).vote_share - solve_equilibrium(before, example_params(s)).vote_share;
  };
  const double below = dQ(s_hat - 0.01);
  const double above = dQ(s_hat + 0.01);
  o.require(below > 0.0 && above < 0.0, "dQ(" + fmt(s_hat - 0.01) + ") = " + fmt(below) + ", dQ(" + fmt(s_hat + 0.01) +
                                            ") = " + fmt(above));
  if (o.pass) o.detail = "sigma_hat = " + detail::format_double(s_hat, 8) + ", dQ " + fmt(below) + " -> " + fmt(above);
  return o;
}

Outcome single_link_property() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> density(0.05, 0.8);
  std::uniform_real_distribution<double> beta_frac(0.01, 0.999);
  int instances = 0;
  double worst = 0.0;
  while (instances < 1000) {
    const Legislature leg = oracle::random_legislature(rng, size(rng), size(rng), density(rng), true, rng() % 2 == 0);
    const double beta = beta_frac(rng) / static_cast<double>(leg.n());
    std::uniform_int_distribution<std::size_t> pick(0, leg.n() - 1);
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j || leg.weight(i, j) != 0.0) continue;
    ++instances;
    const WalkMatrix walks = walk_matrix(leg, beta);
    const Eigen::VectorXd delta = influence_increment(leg, beta, walks, i, j);
    const PartyVector fast = incremental_influence(leg, beta, walks, i, j);
    const PartyVector full = compute_influence(leg.with_link(i, j), beta);
    const double err = (fast.entries() - full.entries()).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    o.require(err <= 1e-10, "update error " + fmt(err));
    o.require((delta.array() >= 0.0).all(), "negative influence change");
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  if (o.pass) o.detail = "1000 instances, max error " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return o;
}

Outcome investment_invariance() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Legislature leg = oracle::random_legislature(rng, size(rng), size(rng), 0.4, true, trial % 2 == 1);
    const PowerUtility u(trial % 3 == 0 ? 0.3 : 0.5);
    Eigen::VectorXd reference;
    for (double sigma : {0.0, 1.0, 5.0, 10.0}) {
      const EquilibriumResult eq = solve_equilibrium(leg, example_params(sigma), u);
      if (reference.size() == 0) reference = eq.investments;
      o.require(eq.investments == reference, "investments changed with sigma");
      const Eigen::VectorXd& I = eq.influence.entries();
      for (Eigen::Index i = 0; i < I.size(); ++i) {
        const double r = std::abs(reference::theta * I(i) * u.marginal(eq.investments(i)) - eq.shadow_price) / eq.shadow_price;
        worst = std::max(worst, r);
      }
    }
  }
  o.require(worst <= 1e-8, "KKT residual " + fmt(worst));
  if (o.pass) o.detail = "bitwise invariant, max KKT residual " + fmt(worst);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst_fp = 0.0;
  double worst_gap_ratio = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_F = 1 + trial % 2;
    const std::size_t n_A = 1 + static_cast<std::size_t>(trial / 2) % (4 - n_F);  // n <= 4
    const Legislature leg = oracle::random_legislature(rng, n_F, n_A, 0.5, true, true);
    const ModelParams p = example_params(static_cast<double>(trial % 5));
    const PowerUtility u;
    const EquilibriumResult eq = solve_equilibrium(leg, p, u);
    const Eigen::VectorXd& w = eq.influence.entries();

    const std::size_t grid_points = 201;
    const double h = p.budget / static_cast<double>(grid_points - 1);
    const GridAllocation grid = brute_force_allocation(w, u, p.budget, grid_points);
    double analytic = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) analytic += w(i) * u.value(eq.investments(i));
    const double bound = allocation_grid_bound(w, u, eq.investments, h);
    const double gap = analytic - grid.objective;
    o.require(gap >= -1e-12 && gap <= bound, "grid gap " + fmt(gap) + " vs bound " + fmt(bound));
    worst_gap_ratio = std::max(worst_gap_ratio, gap / bound);

    const FixedPointResult fp = fixed_point_probabilities(leg, p, u, eq.investments, 1e-14);
    const double err = (fp.probabilities - eq.probabilities).cwiseAbs().maxCoeff();
    worst_fp = std::max(worst_fp, err);
    o.require(err <= 1e-10, "fixed point error " + fmt(err));
  }
  if (o.pass) o.detail = "grid gap <= " + fmt(worst_gap_ratio) + " x bound, fixed point error " + fmt(worst_fp);
  return o;
}

Outcome monte_carlo_validation() {
  Outcome o;
  const auto t0 = Clock::now();
  const Scenario s = load_scenario(std::string(POLINFLUX_SCENARIOS) + "/example1.json");
  const SimulationConfig config{1'000'000, 1};
  const EquilibriumResult eq = solve_equilibrium(s.legislature, s.params, s.utility);
  const MonteCarloResult a = monte_carlo_frequencies(s.legislature, s.params, s.utility, eq.investments, config);
  const MonteCarloResult b = monte_carlo_frequencies(s.legislature, s.params, s.utility, eq.investments, config);
  const double elapsed = seconds_since(t0);
  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < eq.probabilities.size(); ++i) {
    const double q = eq.probabilities(i);
    const double z = std::abs(a.frequencies(i) - q) / std::sqrt(q * (1 - q) / 1e6);
    worst_z = std::max(worst_z, z);
    o.require(z <= 3.0, s.legislature.label(static_cast<std::size_t>(i)) + " |z| = " + fmt(z));
  }
  o.require(a.votes == b.votes, "same seed gave different counts");
  o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  if (o.pass) o.detail = "max |z| " + fmt(worst_z) + ", deterministic, " + fmt(elapsed) + " s for two runs";
  return o;
}

struct TwoPartyCase {
  Legislature leg;
  AffectiveInfluence at0;
};

std::vector<TwoPartyCase> two_party_cases(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TwoPartyCase> cases;
  for (int k = 0; k < 50; ++k) {
    Legislature leg = oracle::random_two_party(rng, example_params(0).beta());
    AffectiveInfluence at0 = modified_influence(leg, example_params(0));
    cases.push_back({std::move(leg), std::move(at0)});
  }
  return cases;
}

ModelParams affective_params(double alpha, double sigma) {
  ModelParams p = example_params(sigma);
  p.alpha = alpha;
  return p;
}

Outcome omega_grid_suite() {
  Outcome o;
  double worst_direct = 0.0;
  for (const auto& c : two_party_cases(404)) {
    const Party strong = c.at0.I0_F() > c.at0.I0_A() ? Party::F : Party::A;
    const Party weak = other(strong);
    const double I_s = c.at0.unmodified.party_sum(strong);
    const double I_w = c.at0.unmodified.party_sum(weak);
    const double a_star = alpha_star(I_s, I_w, reference::theta);
    const double step = c.at0.alpha_hat / 100.0;
    double prev_weak = 0.0;
    double prev_gap = 0.0;
    double best = 0.0;
    double best_alpha = 0.0;
    for (int k = 0; k < 100; ++k) {
      const ModelParams p = affective_params(k * step, 0.0);
      const AffectiveInfluence aff = modified_influence(c.leg, p);
      const double gap = aff.modified.party_sum(strong) - aff.modified.party_sum(weak);
      if (k > 0) {
        o.require(aff.omega_for(weak) < prev_weak, "omega of the weaker party not decreasing");
        o.require(gap > prev_gap, "influence gap not increasing");
      }
      if (k == 0 || aff.omega_for(strong) < best) {
        best = aff.omega_for(strong);
        best_alpha = k * step;
      }
      prev_weak = aff.omega_for(weak);
      prev_gap = gap;

      // Direct block inverse of Id - 2 theta hat(G)^T.
      const Eigen::Index n = static_cast<Eigen::Index>(c.leg.n());
      const Eigen::MatrixXd hat = build_hat_matrix(c.leg, p.delta, p.alpha);
      const Eigen::VectorXd direct =
          (Eigen::MatrixXd::Identity(n, n) - 2.0 * p.theta * hat.transpose()).inverse().rowwise().sum();
      const double err = (direct - aff.modified.entries()).cwiseAbs().maxCoeff();
      worst_direct = std::max(worst_direct, err);
      o.require(err <= 1e-9, "omega form differs from direct inverse by " + fmt(err));
    }
    o.require(std::abs(best_alpha - a_star) <= step, "grid minimum " + fmt(best_alpha) + " vs alpha* " + fmt(a_star));
  }
  if (o.pass) o.detail = "50 configurations x 100 alphas, direct inverse error " + fmt(worst_direct);
  return o;
}

Outcome affective_sign_suite() {
  Outcome o;
  double worst_fd = 0.0;
  int witnesses = 0;
  int eligible = 0;
  for (const auto& c : two_party_cases(505)) {
    const double sign_gap = c.at0.I0_F() > c.at0.I0_A() ? 1.0 : -1.0;
    const double step = c.at0.alpha_hat / 100.0;
    for (int k = 0; k < 100; ++k) {
      const double alpha = k * step;
      const ModelParams p = affective_params(alpha, 2.0);
      const AffectiveInfluence aff = modified_influence(c.leg, p);
      o.require(affective_dq_dsigma(aff, p.theta) * sign_gap > 0.0, "dQ/dsigma sign at alpha " + fmt(alpha));

      if (k % 10 == 5) {
        const double h = 1e-4 * c.at0.alpha_hat;
        auto Q = [&](double a) { return solve_affective_equilibrium(c.leg, affective_params(a, 2.0)).vote_share; };
        const double analytic = dq_dalpha(c.leg, p);
        const double fd = oracle::five_point_difference(Q, alpha, h);
        const double rel = std::abs(analytic - fd) / std::max(std::abs(analytic), 1e-300);
        worst_fd = std::max(worst_fd, rel);
        o.require(std::abs(analytic - fd) <= 1e-5 * std::abs(analytic) + 1e-10, "dQ/dalpha vs finite difference " + fmt(rel));
      }
    }
    o.require(dq_dalpha(c.leg, affective_params(1e-9 * c.at0.alpha_hat, 2.0)) < 0.0, "dQ/dalpha not negative near 0");

    if (sign_gap > 0.0) {
      ++eligible;
      const PolarizationThresholds t = polarization_thresholds(c.leg, example_params(0.0));
      const double sigma = std::max(*t.sigma_2, 0.0) + 0.5;
      const double gain = solve_affective_equilibrium(c.leg, affective_params(t.alpha_limit, sigma)).vote_share -
                          solve_affective_equilibrium(c.leg, affective_params(0.0, sigma)).vote_share;
      if (gain > 0.0) ++witnesses;
    }
  }
  o.require(eligible > 0 && witnesses == eligible,
            "witnesses " + std::to_string(witnesses) + " of " + std::to_string(eligible));
  if (o.pass)
    o.detail = "max finite-difference relative error " + fmt(worst_fd) + ", " + std::to_string(witnesses) +
               " witnesses above sigma_2";
  return o;
}

Outcome interiority_bounds() {
  Outcome o;
  const InteriorityReport r = check_interiority(oracle::example_network(), example_params(3.0));
  // Budget on one legislator, everyone else linked and voting alike.
  const double network = 0.3 * 3;
  const double hand[4] = {0.5 + 0.03 * (10.0 + network + 3.0), 0.5 + 0.03 * (-network + 3.0),
                          0.5 + 0.03 * (10.0 + network - 3.0), 0.5 + 0.03 * (-network - 3.0)};
  const double got[4] = {r.F.upper, r.F.lower, r.A.upper, r.A.lower};
  for (int i = 0; i < 4; ++i) o.require(std::abs(got[i] - hand[i]) <= 1e-12, "bound " + std::to_string(i) + " = " + fmt(got[i]));
  o.require(std::abs(r.F.upper - 0.917) <= 1e-12, "upper F bound " + fmt(r.F.upper));
  if (o.pass) o.detail = "F in [" + fmt(r.F.lower) + ", " + fmt(r.F.upper) + "], A in [" + fmt(r.A.lower) + ", " + fmt(r.A.upper) + "]";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 network-change table", change_table_reproduction},
      {"AC2 sigma_hat reproduction", sigma_hat_reproduction},
      {"AC3 single-link update property", single_link_property},
      {"AC4 investments invariant in sigma", investment_invariance},
      {"AC5 oracle equivalence", oracle_equivalence},
      {"AC6 Monte-Carlo validation", monte_carlo_validation},
      {"AC7 omega grid suite", omega_grid_suite},
      {"AC8 affective sign suite", affective_sign_suite},
      {"AC9 interiority bounds", interiority_bounds},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
