#include "betti/betti.hpp"

#include <cmath>

#include "betti/error.hpp"
#include "betti/linalg.hpp"

namespace betti {

namespace {

Scalar add(const Scalar& a, const Scalar& b, int sign = 1) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.rational() + sign * b.rational()));
  return Scalar(a.complex() + static_cast<double>(sign) * b.complex());
}

Scalar constant(long v, ScalarMode mode) {
  return mode == ScalarMode::exact ? Scalar(Rational(v)) : Scalar(Complex(static_cast<double>(v), 0.0));
}

bool agree(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return std::abs(a.complex() - b.complex()) <= std::max(tol, 1e-9) * 10.0;
}

std::string describe_table(const GroupTable& t) { return "|G|=" + std::to_string(t.size()); }

}  // namespace

nlohmann::json BettiReport::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["quantity"] = quantity;
  j["value"] = value.to_json();
  j["route"] = route;
  j["components"] = {{"num_generators", num_generators}, {"b0", b0_term.to_json()}, {"dim_psi", dim_term.to_json()}};
  j["mode"] = to_string(mode);
  j["presentation"] = presentation;
  j["character"] = character;
  if (!ranks.empty()) j["ranks"] = ranks;
  if (!cross_check.empty()) j["cross_check"] = cross_check;
  return j;
}

std::vector<std::string> BettiReport::csv_header() {
  return {"quantity", "value", "route", "num_generators", "b0", "dim_psi", "mode", "presentation", "character"};
}

std::vector<std::string> BettiReport::csv_row() const {
  return {quantity,          value.to_string(), route, std::to_string(num_generators), b0_term.to_string(),
          dim_term.to_string(), to_string(mode), presentation, character};
}

std::vector<EdgeVector> fox_rows(const Presentation& p, const GroupTable& t) {
  std::vector<EdgeVector> rows;
  for (const Word& r : p.relators) {
    EdgeVector row;
    for (int s = 0; s < p.rank(); ++s) {
      const FreeGroupRingElement d = fox_derivative(r, s);
      for (const auto& [w, c] : d.terms()) row.add(t.element(w), s, Rational(static_cast<long>(c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

EdgeVector relator_walk(const Word& w, int base, const GroupTable& t) {
  EdgeVector z;
  int u = base;
  for (const Letter& l : w.letters()) {
    const int s = t.generator(l.gen);
    const int sinv = t.inverse(s);
    for (int i = 0; i < std::abs(l.exp); ++i) {
      if (l.exp > 0) {
        z.add(u, l.gen, Rational(1));
        u = t.mul(u, s);
      } else {
        u = t.mul(u, sinv);
        z.add(u, l.gen, Rational(-1));
      }
    }
  }
  return z;
}

std::vector<EdgeVector> boundary_kernel(const GroupTable& t) {
  std::vector<int> all(t.size()), gens;
  for (std::size_t g = 0; g < t.size(); ++g) all[g] = static_cast<int>(g);
  for (int s = 0; s < t.num_generators(); ++s) gens.push_back(t.generator(s));
  return boundary_kernel(t, all, gens);
}

std::vector<EdgeVector> boundary_kernel(const GroupTable& t, std::span<const int> vertices, std::span<const int> labels) {
  const std::size_t n = vertices.size();
  const std::size_t L = labels.size();
  std::vector<int> position(t.size(), -1);
  for (std::size_t i = 0; i < n; ++i) position[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
  Matrix<Rational> d(n, n * L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < L; ++s) {
      const int gs = position[static_cast<std::size_t>(t.mul(vertices[i], labels[s]))];
      if (gs < 0) throw Error(ErrorCode::precondition, "vertex set is not closed under the labels");
      d(static_cast<std::size_t>(gs), i * L + s) += 1;
      d(i, i * L + s) -= 1;
    }
  std::vector<EdgeVector> basis;
  for (const auto& v : nullspace_exact(d)) {
    EdgeVector z;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (sgn(v[k]) != 0) z.add(vertices[k / L], static_cast<int>(k % L), v[k]);
    basis.push_back(std::move(z));
  }
  return basis;
}

BettiReport b0_psi(const BoundCharacter& psi, ScalarMode mode, DimensionRoute route, double tol) {
  const GroupTable& t = psi.table();
  BettiReport report;
  report.quantity = "b0";
  report.mode = mode;
  report.num_generators = t.num_generators();
  report.presentation = describe_table(t);
  report.character = psi.character().describe();
  if (route == DimensionRoute::automatic) route = preferred_route(psi.character());
  if (route == DimensionRoute::gram) {
    if (mode == ScalarMode::exact && !psi.is_rational())
      throw Error(ErrorCode::invalid_argument, "character '" + psi.character().describe() +
                                                   "' is not rational-valued; use float mode");
    const std::size_t n = t.size();
    if (n > kMaxGramTerms) throw Error(ErrorCode::precondition, "group too large for the Gram route");
    if (mode == ScalarMode::exact) {
      std::vector<GroupVector> span;
      for (std::size_t g = 1; g < n; ++g) {
        GroupVector v = GroupVector::unit(static_cast<int>(g));
        v.add(0, Rational(-1));
        span.push_back(std::move(v));
      }
      report.dim_term = projection_value<Rational>(std::span<const GroupVector>(span), GroupVector::unit(0), psi, tol);
    } else {
      std::vector<BasicGroupVector<Complex>> span;
      for (std::size_t g = 1; g < n; ++g) {
        auto v = BasicGroupVector<Complex>::unit(static_cast<int>(g));
        v.add(0, Complex(-1.0, 0.0));
        span.push_back(std::move(v));
      }
      const Complex d = projection_value<Complex>(std::span<const BasicGroupVector<Complex>>(span),
                                                  BasicGroupVector<Complex>::unit(0), psi, tol);
      report.dim_term = Complex(d.real(), 0.0);
    }
    report.route = to_string(DimensionRoute::gram);
  } else {
    // J_G is generated as a left module by the s - 1.
    std::vector<EdgeVector> gens;
    for (int s = 0; s < t.num_generators(); ++s) {
      EdgeVector v;
      v.add(t.generator(s), 0, Rational(1));
      v.add(0, 0, Rational(-1));
      gens.push_back(std::move(v));
    }
    const DimensionResult d = psi_dimension(gens, 1, psi, mode, route, tol);
    report.dim_term = d.value;
    report.route = to_string(d.route);
    if (d.rank) report.ranks["J"] = *d.rank;
  }
  report.value = add(constant(1, mode), report.dim_term, -1);
  report.b0_term = report.value;
  return report;
}

Scalar b0_psi_subgroup(const BoundCharacter& psi, std::span<const int> K, ScalarMode mode, double tol) {
  const GroupTable& t = psi.table();
  if (!is_subgroup(t, K)) throw Error(ErrorCode::precondition, "element set is not a subgroup");
  if (mode == ScalarMode::exact) {
    std::vector<GroupVector> span;
    for (int k : K) {
      if (k == 0) continue;
      GroupVector v = GroupVector::unit(k);
      v.add(0, Rational(-1));
      span.push_back(std::move(v));
    }
    return Scalar(Rational(1 - projection_value<Rational>(std::span<const GroupVector>(span), GroupVector::unit(0), psi, tol)));
  }
  std::vector<BasicGroupVector<Complex>> span;
  for (int k : K) {
    if (k == 0) continue;
    auto v = BasicGroupVector<Complex>::unit(k);
    v.add(0, Complex(-1.0, 0.0));
    span.push_back(std::move(v));
  }
  const Complex d = projection_value<Complex>(std::span<const BasicGroupVector<Complex>>(span),
                                              BasicGroupVector<Complex>::unit(0), psi, tol);
  return Scalar(Complex(1.0 - d.real(), 0.0));
}

Rational b0_regular_upper(std::optional<std::size_t> k_size) {
  if (!k_size) return Rational(0);
  if (*k_size == 0) throw Error(ErrorCode::invalid_argument, "subgroup order must be positive");
  return Rational(1, static_cast<unsigned long>(*k_size));
}

BettiReport b1_psi_finite(const Presentation& p, const BoundCharacter& psi, ScalarMode mode, DimensionRoute route,
                          double tol) {
  const GroupTable& t = psi.table();
  if (t.num_generators() != p.rank()) throw Error(ErrorCode::precondition, "group table does not match the presentation");
  for (const Word& r : p.relators)
    if (t.element(r) != 0) throw Error(ErrorCode::precondition, "relator is not trivial in the group table");

  const BettiReport b0 = b0_psi(psi, mode, route, tol);
  const std::vector<EdgeVector> rows = fox_rows(p, t);
  const DimensionResult fox = psi_dimension(rows, p.rank(), psi, mode, route, tol);
  const std::vector<EdgeVector> kernel = boundary_kernel(t);
  const DimensionResult ker = psi_dimension(kernel, p.rank(), psi, mode, route, tol, false);

  BettiReport report;
  report.quantity = "b1";
  report.mode = mode;
  report.num_generators = p.rank();
  report.presentation = to_string(p);
  report.character = psi.character().describe();
  report.route = to_string(fox.route);
  report.b0_term = b0.value;
  report.dim_term = fox.value;
  report.value = add(add(constant(p.rank() - 1, mode), b0.value), fox.value, -1);
  if (fox.rank) report.ranks["fox"] = *fox.rank;
  if (ker.rank) report.ranks["kernel"] = *ker.rank;
  if (fox.quotient_size) report.ranks["q"] = *fox.quotient_size;
  const bool ok = agree(fox.value, ker.value, tol);
  report.cross_check = {{"route", "boundary-kernel"}, {"dim_psi", ker.value.to_json()}, {"agrees", ok}};
  if (!ok)
    throw Error(ErrorCode::route_disagreement, "Fox-image and boundary-kernel routes disagree",
                "fox=" + fox.value.to_string() + " kernel=" + ker.value.to_string());
  if (report.value.real() < -std::max(tol, 1e-9) * 10.0)
    throw Error(ErrorCode::internal, "negative first Betti number", report.value.to_string());
  return report;
}

BettiReport b1_psi_cayley(const BoundCharacter& psi, std::span<const int> labels, ScalarMode mode, double tol) {
  const GroupTable& t = psi.table();
  if (labels.empty()) throw Error(ErrorCode::invalid_argument, "label set is empty");
  const std::vector<int> K = subgroup_closure(t, std::vector<int>(labels.begin(), labels.end()));
  if (K.size() * labels.size() > kMaxGramTerms)
    throw Error(ErrorCode::precondition, "edge space exceeds the Gram route budget");
  const std::vector<EdgeVector> kernel = boundary_kernel(t, K, labels);
  const DimensionResult ker =
      psi_dimension(kernel, static_cast<int>(labels.size()), psi, mode, DimensionRoute::gram, tol, false);

  BettiReport report;
  report.quantity = "b1";
  report.mode = mode;
  report.route = to_string(DimensionRoute::gram);
  report.num_generators = static_cast<int>(labels.size());
  report.presentation = "Cayley graph of a subgroup of order " + std::to_string(K.size());
  report.character = psi.character().describe();
  report.b0_term = b0_psi_subgroup(psi, K, mode, tol);
  report.dim_term = ker.value;
  report.value = add(add(constant(static_cast<long>(labels.size()) - 1, mode), report.b0_term), ker.value, -1);
  if (ker.rank) report.ranks["kernel"] = *ker.rank;
  if (report.value.real() < -std::max(tol, 1e-9) * 10.0)
    throw Error(ErrorCode::internal, "negative first Betti number", report.value.to_string());
  return report;
}

BettiReport b1_psi_perm_quotient(const Presentation& p, const CosetTable& q_table, const GroupTable* group) {
  if (q_table.num_generators() != p.rank())
    throw Error(ErrorCode::precondition, "coset table does not match the presentation");
  if (!q_table.satisfies(p.relators))
    throw Error(ErrorCode::precondition, "coset table does not satisfy the relators");
  const std::size_t q = q_table.size();
  const auto labels = static_cast<std::size_t>(p.rank());

  Matrix<Rational> m1(q * labels, q);
  for (std::size_t c = 0; c < q; ++c)
    for (std::size_t s = 0; s < labels; ++s) {
      m1(c * labels + s, static_cast<std::size_t>(q_table.act(static_cast<int>(c), 2 * static_cast<int>(s)))) += 1;
      m1(c * labels + s, c) -= 1;
    }
  Matrix<Rational> m2(q * p.relators.size(), q * labels);
  for (std::size_t c = 0; c < q; ++c)
    for (std::size_t r = 0; r < p.relators.size(); ++r) {
      int u = static_cast<int>(c);
      const std::size_t row = c * p.relators.size() + r;
      for (const Letter& l : p.relators[r].letters())
        for (int i = 0; i < std::abs(l.exp); ++i) {
          if (l.exp > 0) {
            m2(row, static_cast<std::size_t>(u) * labels + static_cast<std::size_t>(l.gen)) += 1;
            u = q_table.act(u, 2 * l.gen);
          } else {
            u = q_table.act(u, 2 * l.gen + 1);
            m2(row, static_cast<std::size_t>(u) * labels + static_cast<std::size_t>(l.gen)) -= 1;
          }
        }
    }
  const std::size_t r1 = rank_exact(m1), r2 = rank_exact(m2);
  const Rational qq(static_cast<unsigned long>(q));

  BettiReport report;
  report.quantity = "b1";
  report.mode = ScalarMode::exact;
  report.route = to_string(DimensionRoute::quotient_module);
  report.num_generators = p.rank();
  report.presentation = to_string(p);
  report.character = "perm[" + std::to_string(q) + "]";
  const Rational b0 = 1 - Rational(static_cast<unsigned long>(r1)) / qq;
  const Rational dim = Rational(static_cast<unsigned long>(r2)) / qq;
  report.b0_term = b0;
  report.dim_term = dim;
  report.value = Rational(p.rank() - 1 + b0 - dim);
  report.ranks = {{"q", q}, {"M1", r1}, {"M2", r2}};
  if (group) {
    const BoundCharacter psi(Character::permutation(q_table), *group);
    const BettiReport g0 = b0_psi(psi, ScalarMode::exact, DimensionRoute::gram);
    const bool ok = g0.value.rational() == b0;
    report.cross_check = {{"route", "gram-b0"}, {"b0", g0.value.to_json()}, {"agrees", ok}};
    if (!ok)
      throw Error(ErrorCode::route_disagreement, "quotient and Gram b0 terms disagree",
                  "quotient=" + rational_to_string(b0) + " gram=" + g0.value.to_string());
  }
  return report;
}

}  // namespace betti
