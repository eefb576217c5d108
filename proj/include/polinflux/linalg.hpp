#pragma once

#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polinflux {

namespace detail {

inline constexpr double kMinReciprocalCondition = 1e-13;

inline Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& a) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > kMinReciprocalCondition))
    throw Error(ErrorCode::SingularSystem, "matrix is singular or ill-conditioned (rcond " + std::to_string(rc) + ")");
  return lu;
}

}  // namespace detail

/// Solves a * x = b by LU with partial pivoting.
inline Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd x = detail::factor(a).solve(b);
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite solution");
  return x;
}

inline Eigen::MatrixXd inverse_dense(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd x = detail::factor(a).inverse();
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite inverse");
  return x;
}

struct SpectralEstimate {
  double radius = 0.0;  ///< Collatz-Wielandt upper bound, safe to compare against
  double lower = 0.0;   ///< matching lower bound
  int iterations = 0;   ///< largest iteration count over the components
  bool converged = false;
};

namespace detail {

/// Strongly connected components of the digraph with an edge i -> j when
/// g(i,j) > 0, from the transitive closure (n is small).
inline std::vector<std::vector<Eigen::Index>> strong_components(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach = (g.array() > 0.0).matrix();
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (reach(i, k))
        for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = reach(i, j) || reach(k, j);

  std::vector<std::vector<Eigen::Index>> components;
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (placed[static_cast<std::size_t>(i)]) continue;
    std::vector<Eigen::Index> members{i};
    placed[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!placed[static_cast<std::size_t>(j)] && reach(i, j) && reach(j, i)) {
        members.push_back(j);
        placed[static_cast<std::size_t>(j)] = true;
      }
    }
    components.push_back(std::move(members));
  }
  return components;
}

/// Power iteration on the irreducible block a + I, which is primitive, so
/// min/max of (Ax)_i / x_i close in on the Perron root.
inline SpectralEstimate irreducible_radius(const Eigen::MatrixXd& a, int max_iterations, double tol) {
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd shifted = a + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  SpectralEstimate est;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd y = shifted * x;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    est.radius = ratio.maxCoeff() - 1.0;
    est.lower = std::max(0.0, ratio.minCoeff() - 1.0);
    est.iterations = it;
    if (est.radius - est.lower <= tol * std::max(1.0, est.radius)) {
      est.converged = true;
      break;
    }
    x = y / y.maxCoeff();
  }
  return est;
}

}  // namespace detail

/// Spectral radius of a non-negative matrix: the largest Perron root over
/// its strongly connected components.
inline SpectralEstimate spectral_radius(const Eigen::MatrixXd& g, int max_iterations = 20000, double tol = 1e-10) {
  SpectralEstimate est;
  est.converged = true;
  for (const auto& members : detail::strong_components(g)) {
    if (members.size() == 1) {
      const double loop = g(members[0], members[0]);
      est.radius = std::max(est.radius, loop);
      est.lower = std::max(est.lower, loop);
      continue;
    }
    const auto k = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        block(r, c) = g(members[static_cast<std::size_t>(r)], members[static_cast<std::size_t>(c)]);
    const SpectralEstimate part = detail::irreducible_radius(block, max_iterations, tol);
    est.radius = std::max(est.radius, part.radius);
    est.lower = std::max(est.lower, part.lower);
    est.iterations = std::max(est.iterations, part.iterations);
    est.converged = est.converged && part.converged;
  }
  return est;
}

}  // namespace polinflux
