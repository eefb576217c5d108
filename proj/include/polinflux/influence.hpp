#pragma once

// Walk-sum influence: I = (Id - beta G^T)^-1 1, its rank-one update when a
// single unit link is added, and the closed-form walk matrix of the complete
// network.

#include "polinflux/linalg.hpp"
#include "polinflux/model.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace polinflux {

/// X = (Id - beta G^T)^-1; x(i, j) counts discounted walks from j to i and
/// row sums are the influence vector.
struct WalkMatrix {
  Eigen::MatrixXd entries;

  double operator()(std::size_t i, std::size_t j) const {
    return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  Eigen::VectorXd row_sums() const { return entries.rowwise().sum(); }
};

inline Eigen::MatrixXd influence_system(const Eigen::MatrixXd& g, double beta) {
  return Eigen::MatrixXd::Identity(g.rows(), g.cols()) - beta * g.transpose();
}

inline WalkMatrix walk_matrix(const Legislature& leg, double beta) {
  return WalkMatrix{inverse_dense(influence_system(leg.adjacency(), beta))};
}

/// Influence of an arbitrary (square, non-negative) link matrix.
inline Eigen::VectorXd influence_of(const Eigen::MatrixXd& g, double beta) {
  return solve_dense(influence_system(g, beta), Eigen::VectorXd::Ones(g.rows()));
}

inline PartyVector compute_influence(const Legislature& leg, double beta) {
  return PartyVector(influence_of(leg.adjacency(), beta), leg.n_F());
}

/// Change in influence when legislator `from` becomes susceptible to `to`
/// with a unit link, from the prior walk matrix:
///   dI_k = beta * I_from / (1 - beta * x(from, to)) * x(k, to).
inline Eigen::VectorXd influence_increment(const Legislature& leg, double beta, const WalkMatrix& walks,
                                           std::size_t from, std::size_t to) {
  const std::size_t n = leg.n();
  if (from >= n || to >= n) throw Error(ErrorCode::IndexOutOfRange, "link endpoint out of range");
  if (from == to) throw Error(ErrorCode::SelfLoop, "cannot add a self-link");
  if (leg.weight(from, to) != 0.0)
    throw Error(ErrorCode::LinkAlreadyPresent, leg.label(from) + " -> " + leg.label(to) + " already present");

  const double denom = 1.0 - beta * walks(from, to);
  if (!(denom > 0.0))
    throw Error(ErrorCode::DenominatorNonPositive, "1 - beta * x(i,j) = " + std::to_string(denom));
  const double influence_from = walks.entries.row(static_cast<Eigen::Index>(from)).sum();
  return beta * influence_from / denom * walks.entries.col(static_cast<Eigen::Index>(to));
}

/// Influence after adding the unit link from -> to.
inline PartyVector incremental_influence(const Legislature& leg, double beta, const WalkMatrix& walks,
                                         std::size_t from, std::size_t to) {
  Eigen::VectorXd updated = walks.row_sums() + influence_increment(leg, beta, walks, from, to);
  return PartyVector(std::move(updated), leg.n_F());
}

inline PartyVector incremental_influence(const Legislature& leg, double beta, std::size_t from, std::size_t to) {
  return incremental_influence(leg, beta, walk_matrix(leg, beta), from, to);
}

struct CompleteNetworkEntries {
  double diagonal = 1.0;
  double off_diagonal = 0.0;
};

/// Entries of (Id - beta G^c)^-1 for the complete network on n nodes.
inline CompleteNetworkEntries complete_network_entries(std::size_t n, double beta) {
  const double k = static_cast<double>(n);
  const double denom = 1.0 - (k - 2.0) * beta - (k - 1.0) * beta * beta;
  if (!(denom > 0.0))
    throw Error(ErrorCode::DegenerateDenominator, "1 - (n-2)beta - (n-1)beta^2 = " + std::to_string(denom));
  return {(1.0 - (k - 2.0) * beta) / denom, beta / denom};
}

}  // namespace polinflux
