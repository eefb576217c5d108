#pragma once

// Domain types shared by every polinflux module: the two-party legislature,
// scalar model parameters, resource-utility families and party-partitioned
// vectors.

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace polinflux {

enum class ErrorCode {
  IndexOutOfRange,
  SelfLoop,
  WeightOutOfRange,
  EmptyParty,
  InvalidParams,
  SingularSystem,
  LinkAlreadyPresent,
  DenominatorNonPositive,
  DegenerateDenominator,
  NonPositiveInfluence,
  BisectionFailure,
  NotStronger,
  CrossPartyLinksPresent,
  AlphaTooLarge,
  FormulaMismatch,
  EqualInfluence,
  NoConvergence,
  TooManyLegislators,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::EmptyParty: return "EmptyParty";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::LinkAlreadyPresent: return "LinkAlreadyPresent";
    case ErrorCode::DenominatorNonPositive: return "DenominatorNonPositive";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonPositiveInfluence: return "NonPositiveInfluence";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::NotStronger: return "NotStronger";
    case ErrorCode::CrossPartyLinksPresent: return "CrossPartyLinksPresent";
    case ErrorCode::AlphaTooLarge: return "AlphaTooLarge";
    case ErrorCode::FormulaMismatch: return "FormulaMismatch";
    case ErrorCode::EqualInfluence: return "EqualInfluence";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooManyLegislators: return "TooManyLegislators";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// F favours the interest group's policy, A opposes it.
enum class Party { F, A };

inline Party other(Party p) { return p == Party::F ? Party::A : Party::F; }

enum class Mode { baseline, affective };

inline const char* to_string(Mode m) { return m == Mode::baseline ? "baseline" : "affective"; }

/// Directed susceptibility link: `from` values voting like `to`.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

/// Two-party legislature with a dense directed susceptibility matrix.
/// Legislators are ordered with the whole F block first, then the A block.
class Legislature {
 public:
  Legislature(std::size_t n_F, std::size_t n_A, Eigen::MatrixXd adjacency)
      : n_F_(n_F), n_A_(n_A), g_(std::move(adjacency)) {
    if (n_F_ == 0 || n_A_ == 0)
      throw Error(ErrorCode::EmptyParty, "both parties need at least one legislator");
    const auto n = static_cast<Eigen::Index>(n_F_ + n_A_);
    if (g_.rows() != n || g_.cols() != n)
      throw Error(ErrorCode::IndexOutOfRange, "adjacency must be n x n");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double w = g_(i, j);
        if (!(w >= 0.0 && w <= 1.0))
          throw Error(ErrorCode::WeightOutOfRange,
                      "g(" + std::to_string(i) + "," + std::to_string(j) + ") not in [0,1]");
        if (i == j && w != 0.0)
          throw Error(ErrorCode::SelfLoop, "legislator " + std::to_string(i) + " links to itself");
      }
    }
  }

  std::size_t n() const noexcept { return n_F_ + n_A_; }
  std::size_t n_F() const noexcept { return n_F_; }
  std::size_t n_A() const noexcept { return n_A_; }
  std::size_t size(Party p) const noexcept { return p == Party::F ? n_F_ : n_A_; }
  std::size_t offset(Party p) const noexcept { return p == Party::F ? 0 : n_F_; }

  const Eigen::MatrixXd& adjacency() const noexcept { return g_; }
  double weight(std::size_t i, std::size_t j) const {
    return g_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  Party party(std::size_t i) const noexcept { return i < n_F_ ? Party::F : Party::A; }

  /// "F1".."F<n_F>", "A1".."A<n_A>".
  std::string label(std::size_t i) const {
    return party(i) == Party::F ? "F" + std::to_string(i + 1) : "A" + std::to_string(i - n_F_ + 1);
  }

  Eigen::MatrixXd block(Party rows, Party cols) const {
    return g_.block(static_cast<Eigen::Index>(offset(rows)), static_cast<Eigen::Index>(offset(cols)),
                    static_cast<Eigen::Index>(size(rows)), static_cast<Eigen::Index>(size(cols)));
  }

  bool has_cross_party_links() const {
    return block(Party::F, Party::A).any() || block(Party::A, Party::F).any();
  }

  /// Copy with g(from, to) set to `weight`.
  Legislature with_link(std::size_t from, std::size_t to, double weight = 1.0) const {
    if (from >= n() || to >= n()) throw Error(ErrorCode::IndexOutOfRange, "link endpoint out of range");
    Eigen::MatrixXd g = g_;
    g(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) = weight;
    return Legislature(n_F_, n_A_, std::move(g));
  }

  friend bool operator==(const Legislature& a, const Legislature& b) {
    return a.n_F_ == b.n_F_ && a.n_A_ == b.n_A_ && a.g_ == b.g_;
  }

 private:
  std::size_t n_F_;
  std::size_t n_A_;
  Eigen::MatrixXd g_;
};

/// Dense legislature from an edge list; unlisted pairs get weight 0.
inline Legislature build_legislature(std::size_t n_F, std::size_t n_A, std::span<const Edge> edges) {
  if (n_F == 0 || n_A == 0)
    throw Error(ErrorCode::EmptyParty, "both parties need at least one legislator");
  const std::size_t n = n_F + n_A;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n)
      throw Error(ErrorCode::IndexOutOfRange,
                  "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ") with n = " + std::to_string(n));
    if (e.from == e.to) throw Error(ErrorCode::SelfLoop, "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ")");
    if (!(e.weight >= 0.0 && e.weight <= 1.0))
      throw Error(ErrorCode::WeightOutOfRange, "edge weight " + std::to_string(e.weight));
    g(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = e.weight;
  }
  return Legislature(n_F, n_A, std::move(g));
}

inline Legislature build_legislature(std::size_t n_F, std::size_t n_A, std::initializer_list<Edge> edges) {
  return build_legislature(n_F, n_A, std::span<const Edge>(edges.begin(), edges.size()));
}

struct ModelParams {
  double theta = 0.03;  ///< shock density; shocks are uniform on [-1/(2 theta), 1/(2 theta)]
  double delta = 0.3;   ///< network-utility weight per susceptibility link
  double sigma = 0.0;   ///< ideological polarization
  double alpha = 0.0;   ///< affective polarization
  double budget = 100.0;

  double beta() const noexcept { return 2.0 * theta * delta; }
  double alpha_tilde() const noexcept { return 2.0 * theta * alpha; }
  double sigma_for(Party p) const noexcept { return p == Party::F ? sigma : -sigma; }

  void validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw Error(ErrorCode::InvalidParams, "theta must be > 0");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidParams, "delta must be > 0");
    if (!(budget > 0.0) || !std::isfinite(budget)) throw Error(ErrorCode::InvalidParams, "budget must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidParams, "sigma must be >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidParams, "alpha must be >= 0");
  }
};

/// Strictly increasing, strictly concave resource utility with u(0) = 0 and
/// u'(0+) = infinity, plus the inverse of its marginal.
template <class U>
concept ResourceUtility = requires(const U& u, double x) {
  { u.value(x) } -> std::convertible_to<double>;
  { u.marginal(x) } -> std::convertible_to<double>;
  { u.marginal_inverse(x) } -> std::convertible_to<double>;
};

/// u(m) = m^gamma, gamma in (0,1).
struct PowerUtility {
  double gamma = 0.5;

  explicit PowerUtility(double g = 0.5) : gamma(g) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidParams, "power utility needs gamma in (0,1)");
  }

  double value(double m) const { return gamma == 0.5 ? std::sqrt(m) : std::pow(m, gamma); }
  double marginal(double m) const { return gamma * std::pow(m, gamma - 1.0); }
  double marginal_inverse(double y) const { return std::pow(y / gamma, 1.0 / (gamma - 1.0)); }

  friend bool operator==(const PowerUtility&, const PowerUtility&) = default;
};

static_assert(ResourceUtility<PowerUtility>);

/// n-vector in canonical legislator order with party block sums.
class PartyVector {
 public:
  PartyVector() = default;
  PartyVector(Eigen::VectorXd entries, std::size_t n_F) : entries_(std::move(entries)), n_F_(n_F) {
    if (n_F_ > static_cast<std::size_t>(entries_.size()))
      throw Error(ErrorCode::IndexOutOfRange, "party split beyond vector length");
  }

  const Eigen::VectorXd& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.size()); }
  std::size_t n_F() const noexcept { return n_F_; }
  std::size_t n_A() const noexcept { return size() - n_F_; }
  double operator[](std::size_t i) const { return entries_(static_cast<Eigen::Index>(i)); }

  Eigen::VectorXd block(Party p) const {
    return p == Party::F ? Eigen::VectorXd(entries_.head(static_cast<Eigen::Index>(n_F_)))
                         : Eigen::VectorXd(entries_.tail(static_cast<Eigen::Index>(n_A())));
  }
  double party_sum(Party p) const { return block(p).sum(); }
  double party_F_sum() const { return party_sum(Party::F); }
  double party_A_sum() const { return party_sum(Party::A); }

 private:
  Eigen::VectorXd entries_;
  std::size_t n_F_ = 0;
};

/// The ideological sign vector (sigma,...,sigma,-sigma,...,-sigma).
inline Eigen::VectorXd sign_vector(const Legislature& leg, double sigma) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(leg.n()));
  for (std::size_t i = 0; i < leg.n(); ++i)
    s(static_cast<Eigen::Index>(i)) = leg.party(i) == Party::F ? sigma : -sigma;
  return s;
}

template <ResourceUtility U>
Eigen::VectorXd utility_vector(const U& utility, const Eigen::VectorXd& m) {
  Eigen::VectorXd out(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) out(i) = utility.value(m(i));
  return out;
}

}  // namespace polinflux
