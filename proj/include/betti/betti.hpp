#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "betti/characters.hpp"
#include "betti/enumeration.hpp"
#include "betti/gns.hpp"
#include "betti/presentation.hpp"
#include "betti/scalar.hpp"

namespace betti {

struct BettiReport {
  std::string quantity;  // "b0" or "b1"
  Scalar value;
  std::string route;     // "gram", "rank-shortcut" or "quotient-module"
  int num_generators = 0;
  Scalar b0_term;
  Scalar dim_term;       // dim_psi of the closed span (J for b0, Z for b1)
  ScalarMode mode = ScalarMode::exact;
  std::string presentation;
  std::string character;
  nlohmann::json cross_check = nlohmann::json::object();
  nlohmann::json ranks = nlohmann::json::object();

  nlohmann::json to_json() const;
  static std::vector<std::string> csv_header();
  std::vector<std::string> csv_row() const;
};

// Rows of the Fox matrix evaluated in t: relator r becomes
// sum_s (dr/ds) . (1, s) as an edge vector.
std::vector<EdgeVector> fox_rows(const Presentation& p, const GroupTable& t);

// The path of w read from `base`: letter s at u adds +(u, s); s^-1 adds -(u s^-1, s).
EdgeVector relator_walk(const Word& w, int base, const GroupTable& t);

// Basis of the kernel of the edge boundary (g, gs) -> gs - g over Q.
std::vector<EdgeVector> boundary_kernel(const GroupTable& t);
// The same over the Cayley graph on `vertices` (closed under right
// multiplication by the label elements).
std::vector<EdgeVector> boundary_kernel(const GroupTable& t, std::span<const int> vertices, std::span<const int> labels);

// 1 - <P 1, 1> with P the projection onto the closure of J_G.
BettiReport b0_psi(const BoundCharacter& psi, ScalarMode mode, DimensionRoute route = DimensionRoute::automatic,
                   double tol = 1e-9);
// b0 of the subgroup K with psi restricted to K; gram route.
Scalar b0_psi_subgroup(const BoundCharacter& psi, std::span<const int> K, ScalarMode mode, double tol = 1e-9);

// Upper bound 1/|K| for a psi-regular K; nullopt means K infinite (bound 0).
Rational b0_regular_upper(std::optional<std::size_t> k_size);

// |S| - 1 + b0 - dim_psi(closure of Z), with dim_psi from the Fox rows and
// again from a kernel basis of the edge boundary. The two must agree
// (exactly in rational mode), else Error(route_disagreement).
BettiReport b1_psi_finite(const Presentation& p, const BoundCharacter& psi, ScalarMode mode,
                          DimensionRoute route = DimensionRoute::automatic, double tol = 1e-9);

// b1 of the subgroup generated by the label elements, for its Cayley graph
// with those labels (gram route on a boundary-kernel basis).
BettiReport b1_psi_cayley(const BoundCharacter& psi, std::span<const int> labels, ScalarMode mode, double tol = 1e-9);

// b1 for the permutation character of q_table, computed in the coset module:
// |S| - 1 + (1 - rank M1 / q) - rank M2 / q. M1 stacks pi(s) - I, M2 the
// relator walks from every coset. When `group` is given the b0 term is
// checked against the gram route.
BettiReport b1_psi_perm_quotient(const Presentation& p, const CosetTable& q_table,
                                 const GroupTable* group = nullptr);

}  // namespace betti
