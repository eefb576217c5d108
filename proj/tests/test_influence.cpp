#include "oracles.hpp"
#include "polinflux/influence.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace polinflux;
using Catch::Matchers::WithinAbs;

TEST_CASE("empty network gives unit influence", "[influence]") {
  const Legislature leg = build_legislature(3, 2, {});
  const PartyVector I = compute_influence(leg, 0.05);
  for (std::size_t i = 0; i < leg.n(); ++i) CHECK(I[i] == 1.0);
  CHECK(I.party_F_sum() == 3.0);
}

TEST_CASE("influence of the example network", "[influence]") {
  const PartyVector I = compute_influence(oracle::example_network(), 0.018);
  // Hand solve: I_F1 = I_A1 = 1/(1 - beta), I_F2 = 1 + 2 beta I_F1, I_A2 = 1.
  const double i1 = 1.0 / (1.0 - 0.018);
  CHECK_THAT(I[0], WithinAbs(i1, 1e-14));
  CHECK_THAT(I[1], WithinAbs(1.0 + 2.0 * 0.018 * i1, 1e-14));
  CHECK_THAT(I[2], WithinAbs(i1, 1e-14));
  CHECK(I[3] == 1.0);
  CHECK_THAT(I[0], WithinAbs(1.01832994, 5e-9));
  CHECK_THAT(I[1], WithinAbs(1.03665988, 5e-9));
}

TEST_CASE("dense solve agrees with the Neumann series", "[influence][property]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n_F = 1 + trial % 5;
    const std::size_t n_A = 1 + (trial / 5) % 5;
    const Legislature leg = oracle::random_legislature(rng, n_F, n_A, 0.4, true, trial % 3 == 0);
    const double beta = 0.9 / static_cast<double>(leg.n());
    const Eigen::VectorXd series = oracle::neumann_influence(leg.adjacency(), beta);
    const PartyVector I = compute_influence(leg, beta);
    CHECK((I.entries() - series).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((I.entries().array() >= 1.0).all());

    const WalkMatrix X = walk_matrix(leg, beta);
    CHECK((X.entries - oracle::neumann_walks(leg.adjacency(), beta)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((X.row_sums() - I.entries()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("single-link update is non-negative and exact", "[influence][property]") {
  std::mt19937_64 rng(7);
  int checked = 0;
  while (checked < 300) {
    const Legislature leg = oracle::random_legislature(rng, 3, 3, 0.3);
    const double beta = 0.95 / static_cast<double>(leg.n());
    std::uniform_int_distribution<std::size_t> pick(0, leg.n() - 1);
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j || leg.weight(i, j) != 0.0) continue;
    ++checked;

    const WalkMatrix walks = walk_matrix(leg, beta);
    const PartyVector fast = incremental_influence(leg, beta, walks, i, j);
    const PartyVector full = compute_influence(leg.with_link(i, j), beta);
    CHECK((fast.entries() - full.entries()).cwiseAbs().maxCoeff() < 1e-10);

    const Eigen::VectorXd delta = influence_increment(leg, beta, walks, i, j);
    const std::vector<bool> reach = oracle::reachable_from(leg.adjacency(), j);
    for (std::size_t k = 0; k < leg.n(); ++k) {
      CHECK(delta(static_cast<Eigen::Index>(k)) >= 0.0);
      // Gains reach exactly the legislators downstream of the new target.
      CHECK((delta(static_cast<Eigen::Index>(k)) > 0.0) == reach[k]);
    }
  }
}

TEST_CASE("single-link update input errors", "[influence]") {
  const Legislature leg = oracle::example_network();
  auto code = [&](std::size_t i, std::size_t j) {
    try {
      incremental_influence(leg, 0.018, i, j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  CHECK(code(0, 9) == ErrorCode::IndexOutOfRange);
  CHECK(code(1, 1) == ErrorCode::SelfLoop);
  CHECK(code(0, 2) == ErrorCode::LinkAlreadyPresent);
}

TEST_CASE("complete network entries match the inverse", "[influence]") {
  for (std::size_t n : {2u, 3u, 5u, 10u}) {
    for (double beta : {0.01, 0.05, 0.08}) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      g.diagonal().setZero();
      const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(g.rows(), g.cols()) - beta * g).inverse();
      const CompleteNetworkEntries e = complete_network_entries(n, beta);
      CHECK_THAT(e.diagonal, WithinAbs(inv(0, 0), 1e-12));
      CHECK_THAT(e.off_diagonal, WithinAbs(inv(0, 1), 1e-12));
    }
  }
  CHECK_THROWS_AS(complete_network_entries(10, 0.2), Error);
}

TEST_CASE("singular systems are reported", "[influence]") {
  // Two-cycle with beta = 1: Id - G^T is singular.
  const Legislature leg = build_legislature(1, 1, {{0, 1}, {1, 0}});
  try {
    compute_influence(leg, 1.0);
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSystem);
  }
}
