#pragma once

// Independent, non-closed-form checks of the model: Monte-Carlo voting under
// sampled shocks, fixed-point iteration of the best-response map, exhaustive
// search over allocations and the three-legislator pivot probabilities.

#include "polinflux/affective.hpp"
#include "polinflux/equilibrium.hpp"
#include "polinflux/linalg.hpp"
#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace polinflux {

inline constexpr const char* kGeneratorId = "mt19937_64/seed_seq-partition65536/u53";
inline constexpr std::uint64_t kTrialsPerPartition = 65536;

struct SimulationConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  Mode mode = Mode::baseline;
  unsigned threads = 0;  ///< 0: POLINFLUX_THREADS, else hardware concurrency
};

/// Worker count: explicit request, else POLINFLUX_THREADS, else the hardware.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("POLINFLUX_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Matrix M of the best-response map q -> 1/2 + theta (u + sigma + M (2q - 1)).
inline Eigen::MatrixXd response_matrix(const Legislature& leg, const ModelParams& params, Mode mode) {
  return mode == Mode::baseline ? Eigen::MatrixXd(params.delta * leg.adjacency())
                                : build_hat_matrix(leg, params.delta, params.alpha);
}

/// Probabilities solving the linear best-response system for given investments.
template <ResourceUtility U>
Eigen::VectorXd analytic_probabilities(const Legislature& leg, const ModelParams& params, const U& utility,
                                       const Eigen::VectorXd& m, Mode mode) {
  if (mode == Mode::baseline) return conditional_probabilities(leg, params, utility, m);
  const Eigen::Index n = static_cast<Eigen::Index>(leg.n());
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - 2.0 * params.theta * response_matrix(leg, params, mode);
  const Eigen::VectorXd drive = utility_vector(utility, m) + sign_vector(leg, params.sigma);
  return Eigen::VectorXd::Constant(n, 0.5) + params.theta * solve_dense(system, drive);
}

struct MonteCarloResult {
  Eigen::VectorXd frequencies;
  std::vector<std::uint64_t> votes;
  Eigen::VectorXd beliefs;  ///< analytic q*(m) every legislator holds about the others
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorId;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Each trial draws an independent shock per legislator, uniform on
/// [-1/(2 theta), 1/(2 theta)], and votes for the interest group when the
/// expected-utility gain is non-negative with beliefs fixed at q*(m).
/// Trials are split into fixed partitions seeded from (seed, partition), so
/// the counts do not depend on the number of threads.
template <ResourceUtility U>
MonteCarloResult monte_carlo_frequencies(const Legislature& leg, const ModelParams& params, const U& utility,
                                         const Eigen::VectorXd& m, const SimulationConfig& config) {
  if (config.trials == 0) throw Error(ErrorCode::InvalidParams, "trials must be >= 1");
  params.validate();
  MonteCarloResult r;
  r.trials = config.trials;
  r.seed = config.seed;
  r.beliefs = analytic_probabilities(leg, params, utility, m, config.mode);

  const Eigen::Index n = static_cast<Eigen::Index>(leg.n());
  const Eigen::MatrixXd response = response_matrix(leg, params, config.mode);
  // Vote f iff shock >= -drive_i.
  const Eigen::VectorXd drive = utility_vector(utility, m) + sign_vector(leg, params.sigma) +
                                response * (2.0 * r.beliefs - Eigen::VectorXd::Ones(n));
  std::vector<double> cutoff(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) cutoff[static_cast<std::size_t>(i)] = -drive(i);
  const double half_width = 1.0 / (2.0 * params.theta);

  const std::uint64_t partitions = (config.trials + kTrialsPerPartition - 1) / kTrialsPerPartition;
  std::vector<std::vector<std::uint64_t>> partial(partitions, std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t p = next++; p < partitions; p = next++) {
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
      std::mt19937_64 gen(seq);
      const std::uint64_t begin = p * kTrialsPerPartition;
      const std::uint64_t end = std::min(config.trials, begin + kTrialsPerPartition);
      auto& counts = partial[p];
      for (std::uint64_t t = begin; t < end; ++t) {
        for (std::size_t i = 0; i < cutoff.size(); ++i) {
          const double shock = (2.0 * detail::unit_uniform(gen) - 1.0) * half_width;
          if (shock >= cutoff[i]) ++counts[i];
        }
      }
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(config.threads), partitions));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  r.votes.assign(static_cast<std::size_t>(n), 0);
  for (const auto& counts : partial)
    for (std::size_t i = 0; i < counts.size(); ++i) r.votes[i] += counts[i];
  r.frequencies.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    r.frequencies(i) = static_cast<double>(r.votes[static_cast<std::size_t>(i)]) / static_cast<double>(config.trials);
  return r;
}

struct FixedPointResult {
  Eigen::VectorXd probabilities;
  int iterations = 0;  ///< map applications before the one confirming convergence
};

/// Iterates the best-response map from q = 1/2 until the sup-norm change
/// drops below tol.
template <ResourceUtility U>
FixedPointResult fixed_point_probabilities(const Legislature& leg, const ModelParams& params, const U& utility,
                                           const Eigen::VectorXd& m, double tol, Mode mode = Mode::baseline,
                                           int max_iterations = 100000) {
  detail::require_feasible(m, params.budget, leg.n());
  const Eigen::Index n = static_cast<Eigen::Index>(leg.n());
  const Eigen::MatrixXd response = response_matrix(leg, params, mode);
  const Eigen::VectorXd drive = utility_vector(utility, m) + sign_vector(leg, params.sigma);
  Eigen::VectorXd q = Eigen::VectorXd::Constant(n, 0.5);
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd next =
        Eigen::VectorXd::Constant(n, 0.5) + params.theta * (drive + response * (2.0 * q - Eigen::VectorXd::Ones(n)));
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > 1e12)
      throw Error(ErrorCode::NoConvergence, "best-response iteration diverged after " + std::to_string(it) + " steps");
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (change < tol) return {q, it - 1};
  }
  throw Error(ErrorCode::NoConvergence, "no convergence in " + std::to_string(max_iterations) + " iterations");
}

struct GridAllocation {
  Eigen::VectorXd investments;
  double objective = -std::numeric_limits<double>::infinity();
};

/// Exhaustive search of sum_i w_i u(m_i) over allocations of the budget in
/// steps of budget / (grid_points - 1).
template <ResourceUtility U>
GridAllocation brute_force_allocation(const Eigen::VectorXd& weights, const U& utility, double budget,
                                      std::size_t grid_points) {
  const Eigen::Index n = weights.size();
  if (n > 5) throw Error(ErrorCode::TooManyLegislators, "grid search supports at most 5 legislators");
  if (n == 0 || grid_points < 2) throw Error(ErrorCode::InvalidParams, "need legislators and at least 2 grid points");
  const int steps = static_cast<int>(grid_points - 1);
  const double h = budget / static_cast<double>(steps);

  std::vector<double> level(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) level[static_cast<std::size_t>(k)] = utility.value(h * k);

  GridAllocation best;
  std::vector<int> units(static_cast<std::size_t>(n), 0);
  auto visit = [&](auto&& self, Eigen::Index i, int remaining, double partial) -> void {
    if (i == n - 1) {
      units[static_cast<std::size_t>(i)] = remaining;
      const double value = partial + weights(i) * level[static_cast<std::size_t>(remaining)];
      if (value > best.objective) {
        best.objective = value;
        best.investments.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) best.investments(j) = h * units[static_cast<std::size_t>(j)];
      }
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      units[static_cast<std::size_t>(i)] = k;
      self(self, i + 1, remaining - k, partial + weights(i) * level[static_cast<std::size_t>(k)]);
    }
  };
  visit(visit, 0, steps, 0.0);
  return best;
}

/// Upper bound on objective(m*) - objective(nearest grid point) for grid
/// step h. Concavity and equal weighted marginals at m* give
///   f(m*) - f(g) <= sum_i w_i (u'(m*_i - h) - u'(m*_i)) h   when every m*_i > h.
template <ResourceUtility U>
double allocation_grid_bound(const Eigen::VectorXd& weights, const U& utility, const Eigen::VectorXd& optimum,
                             double h) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(optimum(i) > h)) return std::numeric_limits<double>::infinity();
    bound += weights(i) * (utility.marginal(optimum(i) - h) - utility.marginal(optimum(i))) * h;
  }
  return bound;
}

/// Majority-rule pivot probability of each of three legislators:
/// pi_i = q_j (1 - q_k) + q_k (1 - q_j).
inline std::array<double, 3> pivot_probabilities(const std::array<double, 3>& q) {
  std::array<double, 3> pi{};
  for (int i = 0; i < 3; ++i) {
    const double a = q[static_cast<std::size_t>((i + 1) % 3)];
    const double b = q[static_cast<std::size_t>((i + 2) % 3)];
    pi[static_cast<std::size_t>(i)] = a * (1.0 - b) + b * (1.0 - a);
  }
  return pi;
}

/// Distinct solutions in (0,1)^3 of pi_i(q) = target for all i, from damped
/// Newton runs started on a 5x5x5 grid.
inline std::vector<std::array<double, 3>> equal_pivot_solutions(double target) {
  std::vector<std::array<double, 3>> roots;
  const double starts[] = {0.1, 0.3, 0.45, 0.7, 0.9};
  for (double s0 : starts) {
    for (double s1 : starts) {
      for (double s2 : starts) {
        Eigen::Vector3d q(s0, s1, s2);
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
          const auto pi = pivot_probabilities({q(0), q(1), q(2)});
          const Eigen::Vector3d f(pi[0] - target, pi[1] - target, pi[2] - target);
          if (f.cwiseAbs().maxCoeff() < 1e-14) {
            ok = true;
            break;
          }
          Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
          for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            const int k = (i + 2) % 3;
            jac(i, j) = 1.0 - 2.0 * q(k);
            jac(i, k) = 1.0 - 2.0 * q(j);
          }
          Eigen::FullPivLU<Eigen::Matrix3d> lu(jac);
          if (!lu.isInvertible()) break;
          Eigen::Vector3d step = lu.solve(f);
          double damp = 1.0;
          while (damp > 1e-6 && ((q - damp * step).array() <= 0.0 || (q - damp * step).array() >= 1.0).any()) damp *= 0.5;
          q -= damp * step;
        }
        if (!ok) continue;
        const std::array<double, 3> root{q(0), q(1), q(2)};
        const bool seen = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
          return std::abs(r[0] - root[0]) < 1e-8 && std::abs(r[1] - root[1]) < 1e-8 && std::abs(r[2] - root[2]) < 1e-8;
        });
        if (!seen) roots.push_back(root);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

struct PivotalityReport {
  std::array<double, 3> pivot{};
  double distance_from_half = 0.0;  ///< max_i |q_i - 1/2|
  /// Solutions of pi_i = 1/3 (the random-dictatorship pivot probability).
  std::vector<std::array<double, 3>> one_third_roots;
  bool half_solves_one_third = false;
};

inline PivotalityReport pivotality_probe(const std::array<double, 3>& q) {
  PivotalityReport r;
  r.pivot = pivot_probabilities(q);
  for (double qi : q) r.distance_from_half = std::max(r.distance_from_half, std::abs(qi - 0.5));
  r.one_third_roots = equal_pivot_solutions(1.0 / 3.0);
  const auto at_half = pivot_probabilities({0.5, 0.5, 0.5});
  r.half_solves_one_third = std::all_of(at_half.begin(), at_half.end(), [](double p) { return std::abs(p - 1.0 / 3.0) < 1e-12; });
  return r;
}

}  // namespace polinflux
