#include "betti/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "betti/betti.hpp"
#include "betti/error.hpp"

namespace betti {

const char* to_string(SoundnessRegime regime) {
  switch (regime) {
    case SoundnessRegime::finite_table_exact: return "finite-table-exact";
    case SoundnessRegime::quotient_evaluated: return "quotient-evaluated-with-assertions";
  }
  return "unknown";
}

// --- context ----------------------------------------------------------------

CertificateContext::CertificateContext(Presentation p, const GroupTable& table, Character psi, ScalarMode mode)
    : p_(std::move(p)), group_(&table), psi_(std::move(psi)), mode_(mode) {
  if (table.num_generators() != p_.rank()) throw Error(ErrorCode::precondition, "group table does not match the presentation");
  bound_.emplace(psi_, table);
  if (mode_ == ScalarMode::exact && !bound_->is_rational())
    throw Error(ErrorCode::invalid_argument, "character '" + psi_.describe() + "' is not rational-valued; use float mode");
}

CertificateContext::CertificateContext(Presentation p, const CosetTable& quotient, Character psi, ScalarMode mode)
    : p_(std::move(p)), quotient_(&quotient), psi_(std::move(psi)), mode_(mode) {
  if (quotient.num_generators() != p_.rank()) throw Error(ErrorCode::precondition, "quotient table does not match the presentation");
  if (!quotient.satisfies(p_.relators)) throw Error(ErrorCode::precondition, "quotient table does not satisfy the relators");
  if (mode_ == ScalarMode::exact && !psi_.is_rational())
    throw Error(ErrorCode::invalid_argument, "character '" + psi_.describe() + "' is not rational-valued; use float mode");
}

CertificateContext::CertificateContext(Presentation p, Character psi, ScalarMode mode)
    : p_(std::move(p)), psi_(std::move(psi)), mode_(mode) {
  if (mode_ == ScalarMode::exact && !psi_.is_rational())
    throw Error(ErrorCode::invalid_argument, "character '" + psi_.describe() + "' is not rational-valued; use float mode");
}

int CertificateContext::element(const Word& w) const {
  if (!group_) throw Error(ErrorCode::precondition, "operation needs a finite group table");
  return group_->element(w);
}

PsiValue CertificateContext::psi_element(int g) const {
  if (!bound_) throw Error(ErrorCode::precondition, "operation needs a finite group table");
  return bound_->at(g);
}

PsiValue CertificateContext::psi(const Word& w) const {
  if (group_) return psi_element(group_->element(w));
  return evaluate_on_word(psi_, w, quotient_);
}

bool CertificateContext::is_identity(const Word& w) const {
  if (group_) return group_->element(w) == 0;
  return w.empty();
}

bool CertificateContext::is_nontrivial(const Word& w) const {
  if (group_) return group_->element(w) != 0;
  return quotient_ && quotient_->act(0, w) != 0;
}

// --- arithmetic on psi values -------------------------------------------------

namespace {

// Accumulates exact and floating sums side by side.
struct Acc {
  bool exact = true;
  Rational q = 0;
  Complex z = 0.0;

  void add(const Rational& c, const PsiValue& v) {
    z += c.get_d() * v.approx;
    if (exact && v.exact) q += c * *v.exact;
    else exact = false;
  }
  PsiValue value() const { return exact ? PsiValue::of(q) : PsiValue::of(z); }
};

Scalar as_scalar(const PsiValue& v, ScalarMode mode) {
  if (mode == ScalarMode::exact) {
    if (!v.exact) throw Error(ErrorCode::invalid_argument, "exact mode needs rational character values");
    return Scalar(*v.exact);
  }
  return Scalar(v.approx);
}

bool is_zero(const PsiValue& v, double tol = 1e-9) { return v.exact ? sgn(*v.exact) == 0 : std::abs(v.approx) <= tol; }

Scalar plus(const Scalar& a, const Scalar& b, int sign = 1) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.rational() + sign * b.rational()));
  return Scalar(a.complex() + static_cast<double>(sign) * b.complex());
}

Scalar scalar_of(long v, ScalarMode mode) {
  return mode == ScalarMode::exact ? Scalar(Rational(v)) : Scalar(Complex(static_cast<double>(v), 0.0));
}

bool scalar_geq(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a.rational() >= b.rational();
  return a.real() >= b.real() - tol;
}

bool scalar_eq(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return std::abs(a.complex() - b.complex()) <= tol;
}

std::string edge_string(const CertEdge& e, const std::vector<std::string>& gens, const LabelSet* labels) {
  const std::string label = labels && static_cast<std::size_t>(e.label) < labels->names.size()
                                ? labels->names[static_cast<std::size_t>(e.label)]
                                : std::to_string(e.label);
  return "(" + to_string(e.base, gens) + "," + label + ")";
}

}  // namespace

// --- cycles -------------------------------------------------------------------

LabelSet LabelSet::generators(const Presentation& p) {
  LabelSet l;
  for (int s = 0; s < p.rank(); ++s) {
    l.names.push_back(p.generators[static_cast<std::size_t>(s)]);
    l.words.push_back(Word::generator(s));
  }
  return l;
}

namespace {

// Merges terms on identical edges and drops zeros.
void normalize(Cycle& z, const CertificateContext& ctx) {
  std::vector<CertEdge> merged;
  if (ctx.group()) {
    std::map<std::pair<int, int>, std::size_t> index;
    for (CertEdge& e : z.edges) {
      const auto key = std::make_pair(e.element, e.label);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, merged.size());
        e.base = ctx.group()->word(e.element);
        merged.push_back(std::move(e));
      } else {
        merged[it->second].coeff += e.coeff;
      }
    }
  } else {
    std::map<std::pair<Word, int>, std::size_t> index;
    for (CertEdge& e : z.edges) {
      const auto key = std::make_pair(e.base, e.label);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, merged.size());
        merged.push_back(std::move(e));
      } else {
        merged[it->second].coeff += e.coeff;
      }
    }
  }
  std::erase_if(merged, [](const CertEdge& e) { return sgn(e.coeff) == 0; });
  z.edges = std::move(merged);
}

// Certifies that w is 1 in the group without a GroupTable.
bool is_relation(const Word& w, const Presentation& p) {
  if (w.empty()) return true;
  return std::any_of(p.relators.begin(), p.relators.end(), [&](const Word& r) { return is_cyclic_conjugate(w, r); });
}

// Sum of coeff * (start . label - start) must vanish. Checked with a GroupTable.
bool boundary_vanishes(const Cycle& z, const CertificateContext& ctx, const LabelSet* labels) {
  const GroupTable* t = ctx.group();
  if (!t) return true;
  std::map<int, Rational> d;
  for (const CertEdge& e : z.edges) {
    const int s = labels ? t->element(labels->words[static_cast<std::size_t>(e.label)]) : t->generator(e.label);
    d[t->mul(e.element, s)] += e.coeff;
    d[e.element] -= e.coeff;
  }
  return std::all_of(d.begin(), d.end(), [](const auto& kv) { return sgn(kv.second) == 0; });
}

}  // namespace

Cycle relator_cycle(const Word& w, const Word& base, const CertificateContext& ctx) {
  const Presentation& p = ctx.presentation();
  for (const Letter& l : w.letters())
    if (l.gen < 0 || l.gen >= p.rank()) throw Error(ErrorCode::invalid_argument, "word uses an unknown generator");
  Cycle z;
  z.relator = w;
  z.base = base;
  Word u = base;
  for (const Letter& l : w.letters()) {
    const Word step = Word::generator(l.gen, l.exp > 0 ? 1 : -1);
    for (int i = 0; i < std::abs(l.exp); ++i) {
      if (l.exp > 0) {
        z.edges.push_back({u, ctx.group() ? ctx.element(u) : -1, l.gen, Rational(1)});
        u = u * step;
      } else {
        u = u * step;
        z.edges.push_back({u, ctx.group() ? ctx.element(u) : -1, l.gen, Rational(-1)});
      }
    }
  }
  const std::string shown = to_string(w, p.generators);
  if (ctx.group()) {
    if (ctx.element(u) != ctx.element(base))
      throw Error(ErrorCode::precondition, "relator fails to close in the group table", shown);
  } else {
    if (ctx.quotient() && ctx.quotient()->act(ctx.quotient()->act(0, base), w) != ctx.quotient()->act(0, base))
      throw Error(ErrorCode::precondition, "relator fails to close in the quotient table", shown);
    if (!is_relation(w, p))
      throw Error(ErrorCode::undecidable, "word is not certified to be a relation without a group table", shown);
  }
  normalize(z, ctx);
  if (!boundary_vanishes(z, ctx, nullptr)) throw Error(ErrorCode::internal, "cycle has nonzero boundary", shown);
  z.verified = true;
  return z;
}

Cycle combine_cycles(const std::vector<std::pair<Rational, Cycle>>& parts, const CertificateContext& ctx) {
  Cycle z;
  z.verified = true;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& [c, part] = parts[i];
    if (i == 0) {
      z.relator = part.relator;
      z.base = part.base;
      z.family = part.family;
    }
    z.verified = z.verified && part.verified;
    for (const CertEdge& e : part.edges) z.edges.push_back({e.base, e.element, e.label, c * e.coeff});
  }
  normalize(z, ctx);
  return z;
}

Cycle unit_edge(int label, const CertificateContext& ctx) {
  Cycle z;
  z.edges.push_back({Word(), ctx.group() ? 0 : -1, label, Rational(1)});
  z.verified = true;
  return z;
}

PsiValue pair_cycles(const Cycle& x, const Cycle& y, const CertificateContext& ctx) {
  Acc acc;
  const GroupTable* t = ctx.group();
  for (const CertEdge& a : x.edges)
    for (const CertEdge& b : y.edges) {
      if (a.label != b.label) continue;
      // Rational coefficients, so conj is the identity on them.
      const Rational c = a.coeff * b.coeff;
      if (t) acc.add(c, ctx.psi_element(t->mul(t->inverse(b.element), a.element)));
      else acc.add(c, ctx.psi(b.base.inverse() * a.base));
    }
  return acc.value();
}

RayleighQuotient cycle_quotient(const Cycle& z, int label, const CertificateContext& ctx) {
  RayleighQuotient r;
  r.norm = pair_cycles(z, z, ctx);
  if (is_zero(r.norm)) throw Error(ErrorCode::precondition, "cycle is psi-null; quotient undefined");
  r.pairing = pair_cycles(z, unit_edge(label, ctx), ctx);
  if (ctx.mode() == ScalarMode::exact) {
    const Rational num = as_scalar(r.pairing, ScalarMode::exact).rational();
    r.value = Scalar(Rational(num * num / as_scalar(r.norm, ScalarMode::exact).rational()));
  } else {
    r.value = Scalar(Complex(std::norm(r.pairing.approx) / r.norm.approx.real(), 0.0));
  }
  return r;
}

// --- reports --------------------------------------------------------------------

nlohmann::json CertificateReport::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["kind"] = kind;
  j["regime"] = to_string(regime);
  j["mode"] = to_string(mode);
  j["presentation"] = presentation;
  j["character"] = character;
  nlohmann::json gens = nlohmann::json::array();
  for (const GeneratorWitness& w : generators) {
    nlohmann::json g;
    g["label"] = w.label;
    if (w.quotient) {
      g["quotient"] = w.quotient->value.to_json();
      g["pairing"] = as_scalar(w.quotient->pairing, mode).to_json();
      g["norm"] = as_scalar(w.quotient->norm, mode).to_json();
    } else {
      g["quotient"] = scalar_of(0, mode).to_json();
    }
    if (w.cycle) {
      g["cycle"] = {{"edges", w.cycle->edges.size()}, {"verified", w.cycle->verified}};
      if (!w.cycle->family.empty()) g["cycle"]["family"] = w.cycle->family;
    }
    gens.push_back(std::move(g));
  }
  j["generators"] = std::move(gens);
  j["b0_term"] = {{"value", b0_term.to_json()}, {"provenance", b0_provenance}};
  j["bound"] = bound.to_json();
  if (closed_form) j["closed_form"] = closed_form->to_json();
  if (closed_form_agrees) j["closed_form_agrees"] = *closed_form_agrees;
  if (exact_b1) j["exact_b1"] = exact_b1->to_json();
  if (sound) j["sound"] = *sound;
  if (!details.empty()) j["details"] = details;
  if (!explain.is_null()) j["explain"] = explain;
  return j;
}

std::pair<Scalar, std::string> select_b0_term(const CertificateContext& ctx, std::optional<std::size_t> regular_order) {
  if (ctx.bound()) return {b0_psi(*ctx.bound(), ctx.mode()).value, "exact"};
  if (regular_order) {
    const Rational u = b0_regular_upper(*regular_order);
    return {ctx.mode() == ScalarMode::exact ? Scalar(u) : Scalar(Complex(u.get_d(), 0.0)),
            "psi-regular subgroup of order " + std::to_string(*regular_order)};
  }
  return {scalar_of(1, ctx.mode()), "trivial bound"};
}

CertificateReport b1_upper_bound(const LabelSet& labels, const std::map<int, std::vector<Cycle>>& cycles,
                                 const CertificateContext& ctx, const Scalar& b0_term,
                                 const std::string& b0_provenance) {
  CertificateReport report;
  report.kind = "cycles";
  report.regime = ctx.regime();
  report.mode = ctx.mode();
  report.presentation = to_string(ctx.presentation());
  report.character = ctx.character().describe();
  report.b0_term = b0_term;
  report.b0_provenance = b0_provenance;
  Scalar sum = scalar_of(0, ctx.mode());
  for (std::size_t s = 0; s < labels.size(); ++s) {
    GeneratorWitness w;
    w.label = labels.names[s];
    auto it = cycles.find(static_cast<int>(s));
    if (it != cycles.end()) {
      for (const Cycle& z : it->second) {
        if (!z.verified) throw Error(ErrorCode::validation, "unverified cycle for generator " + w.label);
        if (z.empty()) continue;
        const RayleighQuotient r = cycle_quotient(z, static_cast<int>(s), ctx);
        if (!w.quotient || !scalar_geq(w.quotient->value, r.value, 0.0)) {
          w.quotient = r;
          w.cycle = z;
        }
      }
    }
    if (w.quotient) sum = plus(sum, w.quotient->value);
    report.generators.push_back(std::move(w));
  }
  report.bound = plus(plus(scalar_of(static_cast<long>(labels.size()) - 1, ctx.mode()), b0_term), sum, -1);
  return report;
}

void compare_with_exact(CertificateReport& report, const CertificateContext& ctx, double tol) {
  if (!ctx.bound()) return;
  const BettiReport exact = b1_psi_finite(ctx.presentation(), *ctx.bound(), ctx.mode(), DimensionRoute::automatic, tol);
  report.exact_b1 = exact.value;
  report.sound = scalar_geq(report.bound, exact.value, tol);
}

nlohmann::json explain_pairings(const CertificateReport& report, const LabelSet& labels, const CertificateContext& ctx) {
  const auto& gens = ctx.presentation().generators;
  const GroupTable* t = ctx.group();
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t s = 0; s < report.generators.size(); ++s) {
    const GeneratorWitness& w = report.generators[s];
    if (!w.cycle) continue;
    const Cycle unit = unit_edge(static_cast<int>(s), ctx);
    nlohmann::json rows = nlohmann::json::array();
    auto emit = [&](const Cycle& x, const Cycle& y, const char* which) {
      for (const CertEdge& a : x.edges)
        for (const CertEdge& b : y.edges) {
          if (a.label != b.label) continue;
          const PsiValue v = t ? ctx.psi_element(t->mul(t->inverse(b.element), a.element))
                               : ctx.psi(b.base.inverse() * a.base);
          if (is_zero(v)) continue;
          Acc c;
          c.add(a.coeff * b.coeff, v);
          rows.push_back({{"pair", which},
                          {"x", edge_string(a, gens, &labels)},
                          {"y", edge_string(b, gens, &labels)},
                          {"psi", as_scalar(v, ctx.mode()).to_json()},
                          {"contribution", as_scalar(c.value(), ctx.mode()).to_json()}});
        }
    };
    emit(*w.cycle, *w.cycle, "z,z");
    emit(*w.cycle, unit, "z,s");
    out.push_back({{"label", w.label}, {"pairs", std::move(rows)}});
  }
  return out;
}

// --- torsion ---------------------------------------------------------------------

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

CertificateReport torsion_certificate(const CertificateContext& ctx, const std::vector<int>& S, int p) {
  const GroupTable* t = ctx.group();
  if (!t) throw Error(ErrorCode::precondition, "torsion certificate needs a finite group table");
  if (!is_prime(p)) throw Error(ErrorCode::invalid_argument, std::to_string(p) + " is not prime");
  const Presentation& pres = ctx.presentation();
  const auto& names = pres.generators;
  if (static_cast<int>(S.size()) != pres.rank())
    throw Error(ErrorCode::invalid_argument, "torsion certificate needs S to be the full generating set");
  std::vector<int> elems;
  for (int s : S) {
    if (s < 0 || s >= pres.rank()) throw Error(ErrorCode::invalid_argument, "generator index out of range");
    const int g = t->generator(s);
    if (g == 0) throw Error(ErrorCode::precondition, "generator is trivial", names[static_cast<std::size_t>(s)]);
    if (std::find(elems.begin(), elems.end(), g) != elems.end())
      throw Error(ErrorCode::precondition, "generators are not pairwise distinct", names[static_cast<std::size_t>(s)]);
    if (element_order(*t, g) != p)
      throw Error(ErrorCode::precondition, "element has order " + std::to_string(element_order(*t, g)) + ", not " +
                                               std::to_string(p),
                  names[static_cast<std::size_t>(s)]);
    elems.push_back(g);
  }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < S.size(); ++j) {
      if (i == j) continue;
      const int ab = t->mul(elems[i], elems[j]);
      if (element_order(*t, ab) != p)
        throw Error(ErrorCode::precondition, "product has order " + std::to_string(element_order(*t, ab)) + ", not " +
                                                 std::to_string(p),
                    names[static_cast<std::size_t>(S[i])] + names[static_cast<std::size_t>(S[j])]);
    }
  if (const auto w = find_cyclic_intersection(*t, elems)) {
    auto name_of = [&](int g) {
      const auto k = static_cast<std::size_t>(std::find(elems.begin(), elems.end(), g) - elems.begin());
      return names[static_cast<std::size_t>(S[k])];
    };
    throw Error(ErrorCode::precondition, "cyclic subgroups <ab> and <ac> intersect nontrivially",
                "a=" + name_of(w->a) + " b=" + name_of(w->b) + " c=" + name_of(w->c) + " common=" +
                    to_string(t->word(w->common), names));
  }

  const LabelSet labels = LabelSet::generators(pres);
  const auto N = static_cast<long>(S.size());
  std::map<int, std::vector<Cycle>> cycles;
  bool disjoint = true;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < S.size(); ++i) {
    std::vector<std::pair<Rational, Cycle>> parts;
    std::vector<std::set<std::pair<int, int>>> edge_sets;
    for (std::size_t j = 0; j < S.size(); ++j) {
      if (i == j) continue;
      const Word ab = (Word::generator(S[i]) * Word::generator(S[j])).pow(p);
      Cycle c = relator_cycle(ab, Word(), ctx);
      std::set<std::pair<int, int>> edges;
      for (const CertEdge& e : c.edges) edges.insert({e.element, e.label});
      if (edges.size() != static_cast<std::size_t>(2 * p) || c.edges.size() != static_cast<std::size_t>(2 * p))
        disjoint = false;
      edge_sets.push_back(std::move(edges));
      parts.emplace_back(Rational(1), std::move(c));
    }
    const std::pair<int, int> first{0, S[i]};
    for (std::size_t x = 0; x < edge_sets.size(); ++x)
      for (std::size_t y = x + 1; y < edge_sets.size(); ++y) {
        std::vector<std::pair<int, int>> common;
        std::set_intersection(edge_sets[x].begin(), edge_sets[x].end(), edge_sets[y].begin(), edge_sets[y].end(),
                              std::back_inserter(common));
        if (common != std::vector<std::pair<int, int>>{first}) disjoint = false;
      }
    if (parts.empty()) continue;
    Cycle z = combine_cycles(parts, ctx);
    z.family = "torsion z_" + names[static_cast<std::size_t>(S[i])];
    cycles[S[i]].push_back(std::move(z));
  }

  // Labels outside S carry no cycle; restrict the label set to S.
  LabelSet used;
  std::map<int, std::vector<Cycle>> remapped;
  for (std::size_t i = 0; i < S.size(); ++i) {
    used.names.push_back(labels.names[static_cast<std::size_t>(S[i])]);
    used.words.push_back(labels.words[static_cast<std::size_t>(S[i])]);
    auto it = cycles.find(S[i]);
    if (it == cycles.end()) continue;
    for (Cycle z : it->second) {
      for (CertEdge& e : z.edges) {
        const auto k = std::find(S.begin(), S.end(), e.label) - S.begin();
        e.label = static_cast<int>(k);
      }
      remapped[static_cast<int>(i)].push_back(std::move(z));
    }
  }

  const Scalar zero = scalar_of(0, ctx.mode());
  CertificateReport report =
      b1_upper_bound(used, remapped, ctx, zero, "omitted: b0 vanishes for infinite finitely generated groups");
  report.kind = "torsion";
  const auto [b0_exact, provenance] = select_b0_term(ctx);
  const Scalar with_b0 = plus(report.bound, b0_exact);

  Rational closed = 0;
  if (N > 1) {
    const Rational x(2 * p - 1, N - 1);
    closed = Rational(2 * p - 2) / (1 + x);
  }
  report.closed_form = ctx.mode() == ScalarMode::exact ? Scalar(closed) : Scalar(Complex(closed.get_d(), 0.0));
  report.closed_form_agrees = scalar_eq(report.bound, *report.closed_form, 1e-9);
  const bool regular = ctx.character().kind() == Character::Kind::regular;
  for (std::size_t i = 0; i < report.generators.size(); ++i) {
    const GeneratorWitness& w = report.generators[i];
    nlohmann::json g = {{"label", w.label}};
    if (w.quotient) {
      g["shared_edge_pairing"] = as_scalar(w.quotient->pairing, ctx.mode()).to_json();
      if (regular && disjoint) {
        const Rational expect = N > 1 ? Rational(1) / (1 + Rational(2 * p - 1, N - 1)) : Rational(0);
        const Scalar e = ctx.mode() == ScalarMode::exact ? Scalar(expect) : Scalar(Complex(expect.get_d(), 0.0));
        if (!scalar_eq(w.quotient->value, e, 1e-9))
          throw Error(ErrorCode::internal, "torsion quotient differs from the closed form", w.label);
        if (!scalar_eq(as_scalar(w.quotient->pairing, ctx.mode()), scalar_of(N - 1, ctx.mode()), 1e-9))
          throw Error(ErrorCode::internal, "shared edge pairing differs from N - 1", w.label);
      }
    }
    per.push_back(std::move(g));
  }
  if (regular && disjoint && !*report.closed_form_agrees)
    throw Error(ErrorCode::internal, "torsion bound differs from the closed form");
  report.details = {{"p", p},
                    {"N", N},
                    {"edge_disjoint", disjoint},
                    {"per_generator", std::move(per)},
                    {"bound_at_most_2p_minus_2", scalar_geq(scalar_of(2L * p - 2, ctx.mode()), report.bound, 1e-9)},
                    {"exact_b0", b0_exact.to_json()},
                    {"bound_including_b0", with_b0.to_json()}};
  compare_with_exact(report, ctx);
  if (report.exact_b1) {
    const bool with_ok = scalar_geq(with_b0, *report.exact_b1, 1e-9);
    report.details["sound_including_b0"] = with_ok;
    report.sound = *report.sound && with_ok;
  }
  return report;
}

// --- q-normal --------------------------------------------------------------------

std::vector<Word> discover_h_list(const CertificateContext& ctx, const Word& a) {
  const GroupTable* t = ctx.group();
  if (!t) throw Error(ErrorCode::precondition, "h list discovery needs a finite group table");
  const int ea = ctx.element(a);
  if (ea == 0) throw Error(ErrorCode::precondition, "a is trivial");
  const int rank = ctx.presentation().rank();
  std::vector<int> gens;
  for (int s = 0; s < rank; ++s) gens.push_back(t->generator(s));
  std::vector<std::pair<bool, int>> candidates;  // (conjugate outside S, generator)
  for (int s = 0; s < rank; ++s) {
    const int g = gens[static_cast<std::size_t>(s)];
    const int c = t->conjugate(ea, g);
    if (g == 0 || !is_zero(ctx.psi_element(g)) || !is_zero(ctx.psi_element(c))) continue;
    candidates.emplace_back(std::find(gens.begin(), gens.end(), c) == gens.end(), s);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Word> out;
  std::vector<int> chosen;
  for (const auto& [outside, s] : candidates) {
    const int g = gens[static_cast<std::size_t>(s)];
    if (std::find(chosen.begin(), chosen.end(), g) != chosen.end()) continue;
    chosen.push_back(g);
    const std::vector<int> H = subgroup_closure(*t, chosen);
    if (std::binary_search(H.begin(), H.end(), ea)) {
      chosen.pop_back();
      continue;
    }
    out.push_back(Word::generator(s));
  }
  if (out.empty()) throw Error(ErrorCode::precondition, "no generator qualifies as h for this a", to_string(a, ctx.presentation().generators));
  return out;
}

CertificateReport qnormal_certificate(const CertificateContext& ctx, const Word& a, const std::vector<Word>& h_in) {
  const Presentation& pres = ctx.presentation();
  const auto& names = pres.generators;
  const GroupTable* t = ctx.group();
  auto same = [&](const Word& x, const Word& y) { return t ? t->element(x) == t->element(y) : x == y; };
  auto show = [&](const Word& w) { return to_string(w, names); };

  if (ctx.is_identity(a) || (!t && !ctx.is_nontrivial(a)))
    throw Error(t ? ErrorCode::precondition : ErrorCode::undecidable, "a is not certified nontrivial", show(a));
  std::vector<Word> h;
  for (const Word& w : h_in) {
    if (ctx.is_identity(w)) throw Error(ErrorCode::precondition, "degenerate 4-cycle: h_i = 1", show(w));
    if (!t && !ctx.is_nontrivial(w))
      throw Error(ErrorCode::undecidable, "h_i is not certified nontrivial by the quotient", show(w));
    if (std::none_of(h.begin(), h.end(), [&](const Word& x) { return same(x, w); })) h.push_back(w);
  }
  if (h.empty()) throw Error(ErrorCode::invalid_argument, "h list is empty");
  if (t) {
    std::vector<int> hs;
    for (const Word& w : h) hs.push_back(t->element(w));
    const std::vector<int> H = subgroup_closure(*t, hs);
    if (std::binary_search(H.begin(), H.end(), t->element(a)))
      throw Error(ErrorCode::precondition, "degenerate 4-cycle: a lies in the subgroup generated by the h_i", show(a));
  }
  const Word ainv = a.inverse();
  std::vector<Word> conj;
  for (const Word& w : h) {
    const Word c = a * w * ainv;
    if (!is_zero(ctx.psi(w))) throw Error(ErrorCode::precondition, "h list is not psi-regular: psi(h_i) != 0", show(w));
    if (!is_zero(ctx.psi(c)))
      throw Error(ErrorCode::precondition, "h list is not psi-regular: psi(a h_i a^-1) != 0", show(c));
    conj.push_back(c);
  }

  // Working labels S', deduplicated.
  LabelSet labels;
  auto label_of = [&](const Word& w) {
    for (std::size_t i = 0; i < labels.words.size(); ++i)
      if (same(labels.words[i], w)) return static_cast<int>(i);
    labels.words.push_back(w);
    labels.names.push_back(show(w));
    return static_cast<int>(labels.words.size() - 1);
  };
  const int la = label_of(a);
  std::vector<int> lh, lc;
  for (const Word& w : h) lh.push_back(label_of(w));
  for (const Word& c : conj) lc.push_back(label_of(c));

  const auto k = static_cast<long>(h.size());
  auto edge = [&](const Word& base, int label, long c) {
    return CertEdge{base, t ? t->element(base) : -1, label, Rational(c)};
  };
  Cycle z;
  z.family = "qnormal";
  z.base = Word();
  long m = 0;
  nlohmann::json flags = nlohmann::json::array();
  for (std::size_t i = 0; i < h.size(); ++i) {
    z.edges.push_back(edge(Word(), la, 1));
    z.edges.push_back(edge(a, lh[i], 1));
    z.edges.push_back(edge(conj[i], la, -1));
    z.edges.push_back(edge(Word(), lc[i], -1));
    const bool conj_in = std::any_of(h.begin(), h.end(), [&](const Word& x) { return same(x, conj[i]); });
    const Word back = ainv * h[i] * a;
    const bool back_in = std::any_of(h.begin(), h.end(), [&](const Word& x) { return same(x, back); });
    for (const Word& x : h)
      if (same(x, conj[i])) ++m;
    flags.push_back({{"h", show(h[i])}, {"a_h_ainv_in_h", conj_in}, {"ainv_h_a_in_h", back_in}});
  }
  {
    // Each 4-cycle closes in the free group: (1,a)(a,ah)(ah,aha^-1)(aha^-1,1).
    Cycle unnormalized = z;
    normalize(z, ctx);
    if (t) {
      std::map<int, Rational> d;
      for (const CertEdge& e : unnormalized.edges) {
        const int s = t->element(labels.words[static_cast<std::size_t>(e.label)]);
        d[t->mul(e.element, s)] += e.coeff;
        d[e.element] -= e.coeff;
      }
      for (const auto& [g, c] : d)
        if (sgn(c) != 0) throw Error(ErrorCode::internal, "q-normal cycle has nonzero boundary");
    }
  }
  z.verified = true;

  const RayleighQuotient r = cycle_quotient(z, la, ctx);
  const PsiValue psi_a = ctx.psi(a);
  const ScalarMode mode = ctx.mode();
  const Scalar kk = scalar_of(k, mode);
  if (!scalar_eq(as_scalar(r.pairing, mode), kk, 1e-9))
    throw Error(ErrorCode::internal, "<z, a> differs from k", as_scalar(r.pairing, mode).to_string());

  Scalar re_a, abs_re_a;
  if (mode == ScalarMode::exact) {
    re_a = Scalar(*psi_a.exact);
    abs_re_a = Scalar(Rational(abs(*psi_a.exact)));
  } else {
    re_a = Scalar(Complex(psi_a.approx.real(), 0.0));
    abs_re_a = Scalar(Complex(std::fabs(psi_a.approx.real()), 0.0));
  }
  auto affine = [&](const Scalar& x) {  // 3 + 2x
    return plus(scalar_of(3, mode), plus(x, x));
  };
  auto times_k = [&](const Scalar& x) {
    if (x.is_exact()) return Scalar(Rational(x.rational() * k));
    return Scalar(x.complex() * static_cast<double>(k));
  };
  const Scalar c_stated = affine(re_a);
  const Scalar eq_bound = plus(scalar_of(k * k, mode), times_k(c_stated));
  const Scalar corrected = plus(scalar_of(k * k, mode), times_k(affine(abs_re_a)));
  const Scalar norm = as_scalar(r.norm, mode);
  const Scalar predicted = plus(scalar_of(k * k + 3 * k, mode),
                                [&] {
                                  const Scalar two_re = plus(re_a, re_a);
                                  return two_re.is_exact() ? Scalar(Rational(two_re.rational() * m))
                                                           : Scalar(two_re.complex() * static_cast<double>(m));
                                }(),
                                -1);
  Scalar lower, increment;
  if (mode == ScalarMode::exact) {
    const Rational c = c_stated.rational();
    lower = Scalar(Rational(1 / (1 + c / k)));
    increment = Scalar(Rational(c / (k + c)));
  } else {
    const double c = c_stated.real();
    lower = Scalar(Complex(1.0 / (1.0 + c / static_cast<double>(k)), 0.0));
    increment = Scalar(Complex(c / (static_cast<double>(k) + c), 0.0));
  }

  std::map<int, std::vector<Cycle>> cycles;
  cycles[la].push_back(z);
  Scalar b0_term;
  std::string provenance;
  std::vector<int> label_elems;
  if (t) {
    for (const Word& w : labels.words) label_elems.push_back(t->element(w));
    const std::vector<int> K = subgroup_closure(*t, label_elems);
    b0_term = b0_psi_subgroup(*ctx.bound(), K, mode);
    provenance = "exact (subgroup generated by the labels)";
  } else {
    std::tie(b0_term, provenance) = select_b0_term(ctx);
  }
  CertificateReport report = b1_upper_bound(labels, cycles, ctx, b0_term, provenance);
  report.kind = "qnormal";
  report.closed_form = lower;
  report.closed_form_agrees = scalar_geq(r.value, lower, 1e-9);
  report.details = {{"k", k},
                    {"a", show(a)},
                    {"psi_a", psi_a.scalar().to_json()},
                    {"z_dot_a", as_scalar(r.pairing, mode).to_json()},
                    {"z_norm", norm.to_json()},
                    {"norm_bound", eq_bound.to_json()},
                    {"norm_bound_holds", scalar_geq(eq_bound, norm, 1e-9)},
                    {"corrected_norm_bound", corrected.to_json()},
                    {"corrected_norm_bound_holds", scalar_geq(corrected, norm, 1e-9)},
                    {"conjugate_matches", m},
                    {"predicted_norm", predicted.to_json()},
                    {"quotient_lower_bound", lower.to_json()},
                    {"bound_increment", increment.to_json()},
                    {"labels", labels.names},
                    {"h_flags", std::move(flags)}};
  if (t) {
    const BettiReport exact = b1_psi_cayley(*ctx.bound(), label_elems, mode);
    report.exact_b1 = exact.value;
    report.sound = scalar_geq(report.bound, exact.value, 1e-9);
  }
  return report;
}

// --- exhaustive search -------------------------------------------------------------

namespace {

template <class S>
S value_of(const PsiValue& v) {
  if constexpr (ScalarTraits<S>::exact) return *v.exact;
  else return v.approx;
}

template <class S>
double real_of(const S& x) {
  return ScalarTraits<S>::real(x);
}

// Greedy maximization of |<z,s>|^2 / <z,z> over integer combinations.
template <class S>
std::vector<long> greedy(const std::vector<std::vector<S>>& gram, const std::vector<S>& b, std::size_t budget) {
  const std::size_t n = b.size();
  std::vector<long> x(n, 0);
  S num_b = ScalarTraits<S>::zero(), den = ScalarTraits<S>::zero();
  std::vector<S> zc(n, ScalarTraits<S>::zero());  // <z, c_i>
  auto better = [](const S& n1, const S& d1, const S& n0, const S& d0) {
    // |n1|^2 / d1 > |n0|^2 / d0, with d0 = 0 meaning "no candidate yet".
    if (ScalarTraits<S>::is_zero(d0, 0.0)) return true;
    if constexpr (ScalarTraits<S>::exact) return n1 * n1 * d0 > n0 * n0 * d1;
    else return std::norm(n1) * d0.real() > std::norm(n0) * d1.real() * (1 + 1e-12);
  };
  for (std::size_t step = 0; step < budget; ++step) {
    std::ptrdiff_t best = -1;
    int best_sign = 0;
    S best_num = num_b, best_den = den;
    for (std::size_t i = 0; i < n; ++i)
      for (int sign : {1, -1}) {
        const S sg = ScalarTraits<S>::from(Rational(sign));
        const S nn = num_b + sg * b[i];
        const S dd = den + sg * (zc[i] + ScalarTraits<S>::conj(zc[i])) + gram[i][i];
        if (!ScalarTraits<S>::is_positive(dd, 1e-12)) continue;
        if (best < 0 ? better(nn, dd, num_b, den) : better(nn, dd, best_num, best_den)) {
          best = static_cast<std::ptrdiff_t>(i);
          best_sign = sign;
          best_num = nn;
          best_den = dd;
        }
      }
    if (best < 0) break;
    const auto i = static_cast<std::size_t>(best);
    const S sg = ScalarTraits<S>::from(Rational(best_sign));
    x[i] += best_sign;
    num_b = best_num;
    den = best_den;
    for (std::size_t j = 0; j < n; ++j) zc[j] += sg * gram[i][j];
  }
  return x;
}

template <class S>
std::map<int, std::vector<Cycle>> search_cycles(const std::vector<Cycle>& cands, const CertificateContext& ctx,
                                                std::size_t budget) {
  const std::size_t n = cands.size();
  std::vector<std::vector<S>> gram(n, std::vector<S>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      gram[i][j] = value_of<S>(pair_cycles(cands[i], cands[j], ctx));
      gram[j][i] = ScalarTraits<S>::conj(gram[i][j]);
    }
  std::map<int, std::vector<Cycle>> out;
  for (int s = 0; s < ctx.presentation().rank(); ++s) {
    const Cycle unit = unit_edge(s, ctx);
    std::vector<S> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = value_of<S>(pair_cycles(cands[i], unit, ctx));
    const std::vector<long> x = greedy<S>(gram, b, budget);
    std::vector<std::pair<Rational, Cycle>> parts;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != 0) parts.emplace_back(Rational(x[i]), cands[i]);
    if (parts.empty()) continue;
    Cycle z = combine_cycles(parts, ctx);
    z.family = "search";
    if (!z.empty()) out[s].push_back(std::move(z));
  }
  return out;
}

}  // namespace

CertificateReport search_certificate(const CertificateContext& ctx, std::size_t budget) {
  const GroupTable* t = ctx.group();
  if (!t) throw Error(ErrorCode::precondition, "cycle search needs a finite group table");
  const Presentation& p = ctx.presentation();
  std::vector<Cycle> cands;
  std::set<std::vector<std::tuple<int, int, Rational>>> seen;
  for (const Word& r : p.relators) {
    if (r.empty()) continue;
    for (std::size_t g = 0; g < t->size(); ++g) {
      Cycle c = relator_cycle(r, t->word(static_cast<int>(g)), ctx);
      if (c.empty()) continue;
      std::vector<std::tuple<int, int, Rational>> key;
      for (const CertEdge& e : c.edges) key.emplace_back(e.element, e.label, e.coeff);
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
      cands.push_back(std::move(c));
    }
  }
  const std::map<int, std::vector<Cycle>> cycles =
      ctx.mode() == ScalarMode::exact ? search_cycles<Rational>(cands, ctx, budget)
                                      : search_cycles<Complex>(cands, ctx, budget);
  const auto [b0, provenance] = select_b0_term(ctx);
  CertificateReport report = b1_upper_bound(LabelSet::generators(p), cycles, ctx, b0, provenance);
  report.kind = "search";
  report.details = {{"candidates", cands.size()}, {"budget", budget}};
  compare_with_exact(report, ctx);
  return report;
}

// --- cycle files -------------------------------------------------------------------

std::map<int, std::vector<Cycle>> load_cycle_families(const nlohmann::json& j, const CertificateContext& ctx) {
  const Presentation& p = ctx.presentation();
  const nlohmann::json* entries = &j;
  if (j.is_object()) {
    if (!j.contains("cycles")) throw Error(ErrorCode::validation, "cycles file lacks a 'cycles' array");
    entries = &j.at("cycles");
  }
  if (!entries->is_array()) throw Error(ErrorCode::validation, "cycles must be an array");
  std::map<std::pair<int, std::string>, std::vector<std::pair<Rational, Cycle>>> groups;
  std::vector<std::pair<int, std::string>> order;
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const nlohmann::json& e = (*entries)[i];
    try {
      const int s = p.generator_index(e.at("generator").get<std::string>());
      if (s < 0) throw Error(ErrorCode::unknown_generator, "unknown generator '" + e.at("generator").get<std::string>() + "'");
      const Word r = parse_word(e.at("relator").get<std::string>(), p.generators);
      const Word base = e.contains("base") ? parse_word(e.at("base").get<std::string>(), p.generators) : Word();
      Rational c = 1;
      if (e.contains("coefficient")) {
        const auto& cv = e.at("coefficient");
        c = cv.is_string() ? parse_rational(cv.get<std::string>()) : Rational(cv.get<long>());
      }
      const std::string family = e.contains("family") ? e.at("family").get<std::string>() : "#" + std::to_string(i);
      const auto key = std::make_pair(s, family);
      if (!groups.count(key)) order.push_back(key);
      Cycle z = relator_cycle(r, base, ctx);
      z.family = family;
      groups[key].emplace_back(c, std::move(z));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::validation, "cycle entry " + std::to_string(i) + ": " + ex.what());
    }
  }
  std::map<int, std::vector<Cycle>> out;
  for (const auto& key : order) {
    Cycle z = combine_cycles(groups[key], ctx);
    z.family = key.second;
    out[key.first].push_back(std::move(z));
  }
  return out;
}

}  // namespace betti
