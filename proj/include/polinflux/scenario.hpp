#pragma once

// Scenario files (UTF-8 JSON):
//
//   { "n_F": 2, "n_A": 2, "edges": [[from, to, weight], ...],
//     "theta": 0.03, "delta": 0.3, "sigma": 3, "alpha": 0, "budget": 100,
//     "utility": {"family": "power", "gamma": 0.5},
//     "comparison_edges": [[from, to, weight], ...] }
//
// Indices are 0-based with the F block first. "comparison_edges" is optional
// and lists links added or strengthened on top of "edges".

#include "polinflux/model.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polinflux {

struct Scenario {
  Legislature legislature;
  ModelParams params;
  PowerUtility utility;
  std::vector<Edge> comparison_edges;

  bool has_comparison() const { return !comparison_edges.empty(); }

  /// The base network with every comparison edge applied.
  Legislature comparison_legislature() const {
    Eigen::MatrixXd g = legislature.adjacency();
    const std::size_t n = legislature.n();
    for (const Edge& e : comparison_edges) {
      if (e.from >= n || e.to >= n) throw Error(ErrorCode::IndexOutOfRange, "comparison edge out of range");
      if (e.from == e.to) throw Error(ErrorCode::SelfLoop, "comparison edge is a self-loop");
      g(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = e.weight;
    }
    return Legislature(legislature.n_F(), legislature.n_A(), std::move(g));
  }
};

namespace detail {

inline std::vector<Edge> parse_edges(const nlohmann::json& j, const char* key) {
  std::vector<Edge> edges;
  if (!j.contains(key)) return edges;
  const auto& list = j.at(key);
  if (!list.is_array()) throw Error(ErrorCode::ParseError, std::string(key) + " must be an array");
  for (const auto& item : list) {
    if (!item.is_array() || item.size() < 2 || item.size() > 3)
      throw Error(ErrorCode::ParseError, std::string(key) + " entries must be [from, to] or [from, to, weight]");
    const auto from = item.at(0).get<long long>();
    const auto to = item.at(1).get<long long>();
    if (from < 0 || to < 0) throw Error(ErrorCode::IndexOutOfRange, "negative legislator index");
    edges.push_back({static_cast<std::size_t>(from), static_cast<std::size_t>(to),
                     item.size() == 3 ? item.at(2).get<double>() : 1.0});
  }
  return edges;
}

inline nlohmann::json edges_to_json(const std::vector<Edge>& edges) {
  nlohmann::json list = nlohmann::json::array();
  for (const Edge& e : edges) list.push_back({e.from, e.to, e.weight});
  return list;
}

}  // namespace detail

/// Parses and validates a scenario; malformed JSON is a ParseError, invalid
/// content raises the matching model error.
inline Scenario parse_scenario(const nlohmann::json& j) {
  try {
    const auto n_F = j.at("n_F").get<long long>();
    const auto n_A = j.at("n_A").get<long long>();
    if (n_F < 0 || n_A < 0) throw Error(ErrorCode::EmptyParty, "party sizes must be non-negative");
    const std::vector<Edge> edges = detail::parse_edges(j, "edges");

    ModelParams params;
    params.theta = j.at("theta").get<double>();
    params.delta = j.at("delta").get<double>();
    params.sigma = j.value("sigma", 0.0);
    params.alpha = j.value("alpha", 0.0);
    params.budget = j.at("budget").get<double>();
    params.validate();

    double gamma = 0.5;
    if (j.contains("utility")) {
      const auto& u = j.at("utility");
      const std::string family = u.value("family", "power");
      if (family != "power") throw Error(ErrorCode::ParseError, "unsupported utility family '" + family + "'");
      gamma = u.value("gamma", 0.5);
    }

    Scenario s{build_legislature(static_cast<std::size_t>(n_F), static_cast<std::size_t>(n_A), edges), params,
               PowerUtility(gamma), detail::parse_edges(j, "comparison_edges")};
    if (s.has_comparison()) (void)s.comparison_legislature();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_scenario(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

/// Edges are written row-major from the dense adjacency, so serialising a
/// parsed scenario is idempotent.
inline nlohmann::json to_json(const Scenario& s) {
  std::vector<Edge> edges;
  const auto& leg = s.legislature;
  for (std::size_t i = 0; i < leg.n(); ++i)
    for (std::size_t j = 0; j < leg.n(); ++j)
      if (leg.weight(i, j) != 0.0) edges.push_back({i, j, leg.weight(i, j)});

  nlohmann::json j;
  j["n_F"] = leg.n_F();
  j["n_A"] = leg.n_A();
  j["edges"] = detail::edges_to_json(edges);
  j["theta"] = s.params.theta;
  j["delta"] = s.params.delta;
  j["sigma"] = s.params.sigma;
  j["alpha"] = s.params.alpha;
  j["budget"] = s.params.budget;
  j["utility"] = {{"family", "power"}, {"gamma", s.utility.gamma}};
  if (s.has_comparison()) j["comparison_edges"] = detail::edges_to_json(s.comparison_edges);
  return j;
}

}  // namespace polinflux
