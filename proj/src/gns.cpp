#include "betti/gns.hpp"

namespace betti {

const char* to_string(DimensionRoute route) {
  switch (route) {
    case DimensionRoute::automatic: return "auto";
    case DimensionRoute::gram: return "gram";
    case DimensionRoute::rank_shortcut: return "rank-shortcut";
    case DimensionRoute::quotient_module: return "quotient-module";
  }
  return "unknown";
}

DimensionRoute parse_dimension_route(std::string_view text) {
  if (text == "auto") return DimensionRoute::automatic;
  if (text == "gram") return DimensionRoute::gram;
  if (text == "rank-shortcut") return DimensionRoute::rank_shortcut;
  if (text == "quotient-module") return DimensionRoute::quotient_module;
  throw Error(ErrorCode::invalid_argument, "unknown route '" + std::string(text) + "'");
}

template <>
std::size_t rank_semidefinite(const GramForm<Rational>& g, double) {
  const Matrix<Rational>& m = g.matrix;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) throw Error(ErrorCode::validation, "Gram matrix is not symmetric");
  return rank_exact(m);
}

template <>
std::size_t rank_semidefinite(const GramForm<Complex>& g, double tol) {
  return SemidefiniteSolver<Complex>(g.matrix, tol).rank();
}

DimensionRoute preferred_route(const Character& psi) {
  switch (psi.kind()) {
    case Character::Kind::regular: return DimensionRoute::rank_shortcut;
    case Character::Kind::trivial:
    case Character::Kind::permutation: return DimensionRoute::quotient_module;
    default: return DimensionRoute::gram;
  }
}

std::vector<int> coset_images(const Character& psi, const GroupTable& t, std::size_t& q) {
  const std::size_t n = t.size();
  if (psi.kind() == Character::Kind::trivial) {
    q = 1;
    return std::vector<int>(n, 0);
  }
  if (psi.kind() != Character::Kind::permutation)
    throw Error(ErrorCode::invalid_argument, "coset module needs a permutation or trivial character");
  const CosetTable& perm = psi.permutation_table();
  if (perm.num_generators() != t.num_generators())
    throw Error(ErrorCode::precondition, "permutation table and group table have different generator counts");
  q = perm.size();
  std::vector<int> image(n * q);
  for (std::size_t c = 0; c < q; ++c) image[c] = static_cast<int>(c);
  // BFS tree of the regular table: g = parent(g) . column.
  for (std::size_t g = 1; g < n; ++g) {
    const auto p = static_cast<std::size_t>(t.cosets().parent(static_cast<int>(g)));
    const int col = t.cosets().parent_column(static_cast<int>(g));
    for (std::size_t c = 0; c < q; ++c) image[g * q + c] = perm.act(image[p * q + c], col);
  }
  return image;
}

namespace {

template <class S>
Scalar gram_dimension(std::span<const EdgeVector> gens, int num_labels, const BoundCharacter& psi, double tol,
                      bool translate, DimensionResult& out) {
  const GroupTable& t = psi.table();
  std::vector<BasicEdgeVector<S>> span;
  span.reserve(gens.size() * t.size());
  for (const EdgeVector& x : gens) {
    const BasicEdgeVector<S> y = convert_edges<S>(x);
    if (!translate) span.push_back(y);
    else
      for (std::size_t h = 0; h < t.size(); ++h) span.push_back(betti::translate(static_cast<int>(h), y, t));
  }
  out.span_size = span.size();
  if (span.empty()) return Scalar(ScalarTraits<S>::zero());
  const GramForm<S> g = gram_of<S>(std::span<const BasicEdgeVector<S>>(span), psi);
  const SemidefiniteSolver<S> solver(g.matrix, tol);
  if (!solver.positive_semidefinite())
    throw Error(ErrorCode::validation, "Gram form is not positive semidefinite", solver.failure());
  out.rank = solver.rank();
  S total = ScalarTraits<S>::zero();
  std::vector<S> b(span.size());
  for (int s = 0; s < num_labels; ++s) {
    const BasicEdgeVector<S> unit = BasicEdgeVector<S>::unit(s);
    for (std::size_t i = 0; i < span.size(); ++i) b[i] = pair_edges(span[i], unit, psi);
    total += solver.quadratic(b);
  }
  if constexpr (ScalarTraits<S>::exact) return Scalar(total);
  else return Scalar(Complex(total.real(), 0.0));
}

Rational rank_ratio(std::size_t rank, std::size_t denom) {
  Rational r(static_cast<unsigned long>(rank), static_cast<unsigned long>(denom));
  r.canonicalize();
  return r;
}

}  // namespace

DimensionResult psi_dimension(std::span<const EdgeVector> gens, int num_labels, const BoundCharacter& psi,
                              ScalarMode mode, DimensionRoute route, double tol, bool translate) {
  const GroupTable& t = psi.table();
  const std::size_t n = t.size();
  const auto labels = static_cast<std::size_t>(num_labels);
  for (const EdgeVector& x : gens)
    for (const auto& e : x.terms)
      if (e.label < 0 || e.label >= num_labels || e.base < 0 || static_cast<std::size_t>(e.base) >= n)
        throw Error(ErrorCode::invalid_argument, "edge term outside the edge space");
  if (route == DimensionRoute::automatic) route = preferred_route(psi.character());
  if (mode == ScalarMode::exact && !psi.is_rational())
    throw Error(ErrorCode::invalid_argument, "character '" + psi.character().describe() +
                                                 "' is not rational-valued; use float mode");

  DimensionResult out;
  out.route = route;
  auto finish = [&](const Rational& value) {
    out.value = mode == ScalarMode::exact ? Scalar(value) : Scalar(Complex(value.get_d(), 0.0));
    return out;
  };

  switch (route) {
    case DimensionRoute::rank_shortcut: {
      if (psi.character().kind() != Character::Kind::regular)
        throw Error(ErrorCode::invalid_argument, "rank shortcut applies to the regular character only");
      const std::size_t copies = translate ? n : 1;
      Matrix<Rational> m(gens.size() * copies, n * labels);
      std::size_t row = 0;
      for (const EdgeVector& x : gens)
        for (std::size_t h = 0; h < copies; ++h, ++row)
          for (const auto& e : x.terms)
            m(row, static_cast<std::size_t>(t.mul(static_cast<int>(h), e.base)) * labels +
                       static_cast<std::size_t>(e.label)) += e.coeff;
      out.span_size = m.rows();
      out.rank = rank_exact(m);
      return finish(rank_ratio(*out.rank, n));
    }
    case DimensionRoute::quotient_module: {
      std::size_t q = 0;
      const std::vector<int> image = coset_images(psi.character(), t, q);
      Matrix<Rational> m(gens.size() * q, q * labels);
      std::size_t row = 0;
      for (const EdgeVector& x : gens)
        for (std::size_t c = 0; c < q; ++c, ++row)
          for (const auto& e : x.terms)
            m(row, static_cast<std::size_t>(image[static_cast<std::size_t>(e.base) * q + c]) * labels +
                       static_cast<std::size_t>(e.label)) += e.coeff;
      out.span_size = m.rows();
      out.quotient_size = q;
      out.rank = rank_exact(m);
      return finish(rank_ratio(*out.rank, q));
    }
    case DimensionRoute::gram:
    case DimensionRoute::automatic:
      break;
  }
  if (n * labels > kMaxGramTerms)
    throw Error(ErrorCode::precondition, "edge space of " + std::to_string(n * labels) +
                                             " terms exceeds the Gram route budget of " +
                                             std::to_string(kMaxGramTerms));
  out.route = DimensionRoute::gram;
  if (mode == ScalarMode::exact) out.value = gram_dimension<Rational>(gens, num_labels, psi, tol, translate, out);
  else out.value = gram_dimension<Complex>(gens, num_labels, psi, tol, translate, out);
  return out;
}

}  // namespace betti
