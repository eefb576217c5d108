#include "oracles.hpp"
#include "polinflux/model.hpp"
#include "polinflux/validation.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polinflux;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected polinflux::Error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("legislature builder rejects malformed networks", "[model]") {
  CHECK(code_of([] { build_legislature(2, 2, {{0, 4}}); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([] { build_legislature(2, 2, {{1, 1}}); }) == ErrorCode::SelfLoop);
  CHECK(code_of([] { build_legislature(2, 2, {{0, 1, 1.5}}); }) == ErrorCode::WeightOutOfRange);
  CHECK(code_of([] { build_legislature(2, 2, {{0, 1, -0.1}}); }) == ErrorCode::WeightOutOfRange);
  CHECK(code_of([] { build_legislature(0, 3, {}); }) == ErrorCode::EmptyParty);
  CHECK(code_of([] { build_legislature(3, 0, {}); }) == ErrorCode::EmptyParty);

  Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(3, 3);
  CHECK(code_of([&] { Legislature(2, 2, wrong); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("legislature exposes party structure", "[model]") {
  const Legislature leg = oracle::example_network();
  CHECK(leg.n() == 4);
  CHECK(leg.label(0) == "F1");
  CHECK(leg.label(3) == "A2");
  CHECK(leg.party(1) == Party::F);
  CHECK(leg.party(2) == Party::A);
  CHECK(leg.offset(Party::A) == 2);
  CHECK(leg.has_cross_party_links());
  CHECK(leg.weight(2, 1) == 1.0);
  CHECK(leg.weight(1, 2) == 0.0);

  const Legislature within = build_legislature(2, 1, {{0, 1, 0.5}});
  CHECK_FALSE(within.has_cross_party_links());
  CHECK(within.block(Party::F, Party::F)(0, 1) == 0.5);

  const Legislature added = within.with_link(2, 0, 0.25);
  CHECK(added.weight(2, 0) == 0.25);
  CHECK_FALSE(added == within);
  CHECK(within == build_legislature(2, 1, {{0, 1, 0.5}}));
}

TEST_CASE("parameters are validated", "[model]") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.beta() == Catch::Approx(0.018));
  CHECK(p.sigma_for(Party::A) == -p.sigma);

  for (auto mutate : std::vector<std::function<void(ModelParams&)>>{
           [](ModelParams& q) { q.theta = 0; }, [](ModelParams& q) { q.delta = -1; },
           [](ModelParams& q) { q.budget = 0; }, [](ModelParams& q) { q.sigma = -0.5; },
           [](ModelParams& q) { q.alpha = -1; }, [](ModelParams& q) { q.theta = std::nan(""); }}) {
    ModelParams q;
    mutate(q);
    CHECK(code_of([&] { q.validate(); }) == ErrorCode::InvalidParams);
  }
  CHECK(code_of([] { PowerUtility(1.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { PowerUtility(0.0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("power utility marginal inverse round-trips", "[model]") {
  for (double gamma : {0.2, 0.5, 0.8}) {
    const PowerUtility u(gamma);
    for (double m : {0.01, 1.0, 37.5, 1e4}) CHECK_THAT(u.marginal_inverse(u.marginal(m)), WithinAbs(m, 1e-9 * m));
    CHECK_THAT(u.marginal(2.0), WithinAbs(oracle::central_difference([&](double x) { return u.value(x); }, 2.0, 1e-5), 1e-8));
  }
}

TEST_CASE("validation reports the spectral condition", "[model][validation]") {
  const Legislature leg = oracle::example_network();
  ModelParams p;
  ValidationReport r = validate_params(leg, p);
  CHECK(r.passed());
  CHECK_THAT(r.beta_n, WithinAbs(0.072, 1e-15));
  // Only the F1 <-> A1 cycle contributes: spectral radius 1.
  CHECK_THAT(r.spectral.radius, WithinAbs(1.0, 1e-8));

  p.delta = 5.0;  // beta = 0.3, beta n = 1.2 but beta rho = 0.3
  r = validate_params(leg, p);
  CHECK_FALSE(r.beta_n_ok);
  CHECK(r.solvable());
  CHECK_FALSE(r.passed());

  p.delta = 20.0;  // beta rho = 1.2
  r = validate_params(leg, p);
  CHECK_FALSE(r.solvable());

  r = validate_params(leg, ModelParams{}, Mode::affective);
  CHECK(r.cross_party_links);
  CHECK_FALSE(r.solvable());
}

TEST_CASE("spectral radius brackets the Perron root on random digraphs", "[model][validation]") {
  // For non-negative G and r > 0: (rI - G)^-1 >= 0 exactly when r > rho(G).
  auto inverse_nonnegative = [](const Eigen::MatrixXd& g, double r) {
    const Eigen::MatrixXd m = r * Eigen::MatrixXd::Identity(g.rows(), g.cols()) - g;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) return false;
    const Eigen::MatrixXd inv = lu.inverse();
    return (inv.array() >= -1e-9 * inv.cwiseAbs().maxCoeff()).all();
  };
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::MatrixXd g = oracle::random_adjacency(rng, 3, 4, trial < 150 ? 0.15 : 0.35, true, trial % 2 == 1);
    const SpectralEstimate est = spectral_radius(g);
    REQUIRE(est.converged);
    CHECK(est.radius - est.lower <= 1e-9 * std::max(1.0, est.radius));
    INFO("radius " << est.radius);
    CHECK(inverse_nonnegative(g, est.radius > 0.0 ? est.radius * (1.0 + 1e-7) : 0.1));
    if (est.radius > 0.0) {
      CHECK_FALSE(inverse_nonnegative(g, est.radius * (1.0 - 1e-7)));
    } else {
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(g.rows(), g.cols());
      for (Eigen::Index k = 0; k < g.rows(); ++k) power = power * g;
      CHECK(power.isZero(0.0));  // acyclic
    }
  }
  // A long directed cycle mixes slowly under the shifted iteration.
  Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(40, 40);
  for (Eigen::Index i = 0; i < 40; ++i) cycle(i, (i + 1) % 40) = 1.0;
  const SpectralEstimate est = spectral_radius(cycle);
  CHECK(est.converged);
  CHECK_THAT(est.radius, WithinAbs(1.0, 1e-9));
}
