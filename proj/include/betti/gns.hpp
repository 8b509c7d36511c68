#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "betti/characters.hpp"
#include "betti/enumeration.hpp"
#include "betti/error.hpp"
#include "betti/linalg.hpp"
#include "betti/scalar.hpp"

namespace betti {

// Finitely supported element of C[G] over a GroupTable.
template <class S>
struct BasicGroupVector {
  std::map<int, S> terms;

  static BasicGroupVector unit(int g) {
    BasicGroupVector v;
    v.terms[g] = ScalarTraits<S>::one();
    return v;
  }
  void add(int g, const S& c) {
    S& slot = terms[g];
    slot += c;
    if (ScalarTraits<S>::is_zero(slot, 0.0)) terms.erase(g);
  }
};

template <class S>
struct EdgeTerm {
  int base;   // element g of the edge (g, g s)
  int label;  // generator index s
  S coeff;
};

// Formal sum of Cayley-graph edges. Duplicate terms are kept; pairings are
// bilinear over terms, so merging is never required.
template <class S>
struct BasicEdgeVector {
  std::vector<EdgeTerm<S>> terms;

  // The unit edge (1, s).
  static BasicEdgeVector unit(int s) {
    BasicEdgeVector v;
    v.add(0, s, ScalarTraits<S>::one());
    return v;
  }
  void add(int base, int label, const S& c) { terms.push_back({base, label, c}); }
  bool empty() const { return terms.empty(); }
};

using GroupVector = BasicGroupVector<Rational>;
using EdgeVector = BasicEdgeVector<Rational>;

template <class S>
BasicEdgeVector<S> convert_edges(const EdgeVector& x) {
  BasicEdgeVector<S> out;
  out.terms.reserve(x.terms.size());
  for (const auto& e : x.terms) out.add(e.base, e.label, ScalarTraits<S>::from(e.coeff));
  return out;
}

// <u, v> = sum u_g conj(v_h) psi(h^-1 g).
template <class S>
S pair_group(const BasicGroupVector<S>& u, const BasicGroupVector<S>& v, const BoundCharacter& psi) {
  const GroupTable& t = psi.table();
  const auto& val = psi.values<S>();
  S sum = ScalarTraits<S>::zero();
  for (const auto& [g, cu] : u.terms)
    for (const auto& [h, cv] : v.terms)
      sum += cu * ScalarTraits<S>::conj(cv) * val[static_cast<std::size_t>(t.mul(t.inverse(h), g))];
  return sum;
}

// <(g, gs), (h, ht)> = [s = t] psi(h^-1 g), extended sesquilinearly.
template <class S>
S pair_edges(const BasicEdgeVector<S>& x, const BasicEdgeVector<S>& y, const BoundCharacter& psi) {
  const GroupTable& t = psi.table();
  const auto& val = psi.values<S>();
  S sum = ScalarTraits<S>::zero();
  for (const auto& a : x.terms)
    for (const auto& b : y.terms)
      if (a.label == b.label)
        sum += a.coeff * ScalarTraits<S>::conj(b.coeff) *
               val[static_cast<std::size_t>(t.mul(t.inverse(b.base), a.base))];
  return sum;
}

inline Rational pair(const GroupVector& u, const GroupVector& v, const BoundCharacter& psi) {
  return pair_group(u, v, psi);
}
inline Rational pair(const EdgeVector& x, const EdgeVector& y, const BoundCharacter& psi) {
  return pair_edges(x, y, psi);
}
template <class S>
S pair_any(const BasicGroupVector<S>& u, const BasicGroupVector<S>& v, const BoundCharacter& psi) {
  return pair_group(u, v, psi);
}
template <class S>
S pair_any(const BasicEdgeVector<S>& x, const BasicEdgeVector<S>& y, const BoundCharacter& psi) {
  return pair_edges(x, y, psi);
}

// Left translation by h.
template <class S>
BasicEdgeVector<S> translate(int h, const BasicEdgeVector<S>& x, const GroupTable& t) {
  BasicEdgeVector<S> out = x;
  for (auto& e : out.terms) e.base = t.mul(h, e.base);
  return out;
}
template <class S>
BasicGroupVector<S> translate(int h, const BasicGroupVector<S>& u, const GroupTable& t) {
  BasicGroupVector<S> out;
  for (const auto& [g, c] : u.terms) out.add(t.mul(h, g), c);
  return out;
}

template <class S>
struct GramForm {
  Matrix<S> matrix;

  ScalarMode mode() const { return ScalarTraits<S>::exact ? ScalarMode::exact : ScalarMode::floating; }
};

template <class S, class V>
GramForm<S> gram_of(std::span<const V> span, const BoundCharacter& psi) {
  GramForm<S> g{Matrix<S>(span.size(), span.size())};
  for (std::size_t i = 0; i < span.size(); ++i)
    for (std::size_t j = i; j < span.size(); ++j) {
      g.matrix(i, j) = pair_any(span[i], span[j], psi);
      g.matrix(j, i) = ScalarTraits<S>::conj(g.matrix(i, j));
    }
  return g;
}

template <class V>
GramForm<Rational> gram(std::span<const V> span, const BoundCharacter& psi) {
  return gram_of<Rational>(span, psi);
}

// <Pv, v> for P the orthogonal projection onto span: b* G^+ b with
// G = gram(span), b_i = <span_i, v>.
template <class S, class V>
S projection_value(std::span<const V> span, const V& v, const BoundCharacter& psi, double tol = 1e-9) {
  if (span.empty()) return ScalarTraits<S>::zero();
  const GramForm<S> g = gram_of<S>(span, psi);
  const SemidefiniteSolver<S> solver(g.matrix, tol);
  if (!solver.positive_semidefinite())
    throw Error(ErrorCode::validation, "Gram form is not positive semidefinite", solver.failure());
  std::vector<S> b(span.size());
  for (std::size_t i = 0; i < span.size(); ++i) b[i] = pair_any(span[i], v, psi);
  return solver.quadratic(b);
}

// Exact elimination in rational mode; eigenvalues above tol * lambda_max in float mode.
template <class S>
std::size_t rank_semidefinite(const GramForm<S>& g, double tol = 1e-9);
template <>
std::size_t rank_semidefinite(const GramForm<Rational>& g, double tol);
template <>
std::size_t rank_semidefinite(const GramForm<Complex>& g, double tol);

enum class DimensionRoute { automatic, gram, rank_shortcut, quotient_module };
const char* to_string(DimensionRoute route);
DimensionRoute parse_dimension_route(std::string_view text);

inline constexpr std::size_t kMaxGramTerms = 20000;

struct DimensionResult {
  Scalar value;
  DimensionRoute route = DimensionRoute::gram;
  std::size_t span_size = 0;          // vectors after translation
  std::optional<std::size_t> rank;    // plain or semidefinite rank when computed
  std::optional<std::size_t> quotient_size;
};

// dim_psi of the closure of the C[G]-span of generating_vectors inside the
// edge space with num_labels labels. Sums projection values of the unit
// edges over the translated span (gram), or uses
//   regular:        C-rank / |G|                 (rank_shortcut)
//   permutation:    rank over the coset module / q (quotient_module)
// In automatic mode the cheapest applicable route is chosen. The gram route
// refuses spans with |G| * num_labels above kMaxGramTerms. Pass
// translate = false when the vectors already span a G-invariant space.
DimensionResult psi_dimension(std::span<const EdgeVector> generating_vectors, int num_labels,
                              const BoundCharacter& psi, ScalarMode mode,
                              DimensionRoute route = DimensionRoute::automatic, double tol = 1e-9,
                              bool translate = true);

// The route automatic mode picks for psi.
DimensionRoute preferred_route(const Character& psi);

// Right action of every element on the cosets of a permutation character
// (one coset for trivial): image[g * q + x] = x . g.
std::vector<int> coset_images(const Character& psi, const GroupTable& t, std::size_t& q);

}  // namespace betti
