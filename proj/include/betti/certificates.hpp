#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "betti/characters.hpp"
#include "betti/enumeration.hpp"
#include "betti/presentation.hpp"
#include "betti/scalar.hpp"

namespace betti {

enum class SoundnessRegime { finite_table_exact, quotient_evaluated };
const char* to_string(SoundnessRegime regime);

// Word problem plus character. With a GroupTable everything is decided
// exactly; with a quotient CosetTable, psi is evaluated on words through
// evaluate_on_word and undecidable pairings raise Error(undecidable).
class CertificateContext {
 public:
  CertificateContext(Presentation p, const GroupTable& table, Character psi, ScalarMode mode = ScalarMode::exact);
  CertificateContext(Presentation p, const CosetTable& quotient, Character psi, ScalarMode mode = ScalarMode::exact);
  // No oracle: only syntactic identities are available.
  CertificateContext(Presentation p, Character psi, ScalarMode mode = ScalarMode::exact);

  const Presentation& presentation() const { return p_; }
  SoundnessRegime regime() const { return group_ ? SoundnessRegime::finite_table_exact : SoundnessRegime::quotient_evaluated; }
  const GroupTable* group() const { return group_; }
  const CosetTable* quotient() const { return quotient_; }
  const Character& character() const { return psi_; }
  const BoundCharacter* bound() const { return bound_ ? &*bound_ : nullptr; }
  ScalarMode mode() const { return mode_; }

  // Element index of w; requires a GroupTable.
  int element(const Word& w) const;
  PsiValue psi(const Word& w) const;
  PsiValue psi_element(int g) const;
  // True when w is certified to be 1 in the group.
  bool is_identity(const Word& w) const;
  // Returns true when the word is certified to differ from 1.
  bool is_nontrivial(const Word& w) const;

 private:
  Presentation p_;
  const GroupTable* group_ = nullptr;
  const CosetTable* quotient_ = nullptr;
  Character psi_;
  std::optional<BoundCharacter> bound_;
  ScalarMode mode_;
};

struct CertEdge {
  Word base;          // reduced word of the edge's start vertex
  int element = -1;   // element index when a GroupTable is present
  int label = 0;      // index into the label list
  Rational coeff;
};

// A formal sum of edges with its construction trace.
struct Cycle {
  std::vector<CertEdge> edges;
  Word relator;
  Word base;
  std::string family;
  bool verified = false;

  bool empty() const { return edges.empty(); }
};

// Labels of a Cayley graph: either the presentation generators or arbitrary
// element words. Labels are compared by element with a GroupTable and by
// reduced word otherwise.
struct LabelSet {
  std::vector<std::string> names;
  std::vector<Word> words;

  static LabelSet generators(const Presentation& p);
  std::size_t size() const { return words.size(); }
};

// Walks w from base: letter s at u adds +(u, s), letter s^-1 adds -(u s^-1, s).
// Terms on the same edge are merged (by element with a GroupTable, by word
// otherwise). Throws Error(precondition) when w does not close.
Cycle relator_cycle(const Word& w, const Word& base, const CertificateContext& ctx);

// Sum of coefficient * cycle over cycles sharing a label list.
Cycle combine_cycles(const std::vector<std::pair<Rational, Cycle>>& parts, const CertificateContext& ctx);

// Sesquilinear edge pairing through psi; the unit edge (1, s) is
// Cycle{{1, e, s, 1}}.
PsiValue pair_cycles(const Cycle& x, const Cycle& y, const CertificateContext& ctx);
Cycle unit_edge(int label, const CertificateContext& ctx);

struct RayleighQuotient {
  PsiValue pairing;  // <z, s>
  PsiValue norm;     // <z, z>
  Scalar value;      // |<z, s>|^2 / <z, z>
};

// Throws Error(precondition) when <z, z> = 0.
RayleighQuotient cycle_quotient(const Cycle& z, int label, const CertificateContext& ctx);

struct GeneratorWitness {
  std::string label;
  std::optional<Cycle> cycle;
  std::optional<RayleighQuotient> quotient;
};

struct CertificateReport {
  std::string kind;  // torsion, qnormal, cycles or search
  std::vector<GeneratorWitness> generators;
  Scalar b0_term;
  std::string b0_provenance;
  Scalar bound;
  std::optional<Scalar> closed_form;
  std::optional<bool> closed_form_agrees;
  std::optional<Scalar> exact_b1;
  std::optional<bool> sound;
  SoundnessRegime regime = SoundnessRegime::finite_table_exact;
  ScalarMode mode = ScalarMode::exact;
  std::string presentation;
  std::string character;
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json explain;  // per-pair pairing tables, filled on request

  nlohmann::json to_json() const;
};

// Keeps the best witness per label; bound = |S| - 1 + b0 - sum of quotients.
// Every cycle must be verified.
CertificateReport b1_upper_bound(const LabelSet& labels, const std::map<int, std::vector<Cycle>>& cycles,
                                 const CertificateContext& ctx, const Scalar& b0_term,
                                 const std::string& b0_provenance);

// b0 term by regime: exact b0 with a GroupTable, 1/|K| for a designated
// psi-regular subgroup order, otherwise the trivial bound 1.
std::pair<Scalar, std::string> select_b0_term(const CertificateContext& ctx,
                                              std::optional<std::size_t> regular_order = std::nullopt);

// Fills exact_b1 and sound from the finite route when a GroupTable exists.
void compare_with_exact(CertificateReport& report, const CertificateContext& ctx, double tol = 1e-9);

// Pairing tables of each chosen cycle against itself and its unit edge.
nlohmann::json explain_pairings(const CertificateReport& report, const LabelSet& labels,
                                const CertificateContext& ctx);

// z_a = sum over b != a of the (ab)^p walk from 1, for each a in S (generator
// indices). The b0 term is 0, the value a finitely generated infinite
// torsion group has; `details.bound_including_b0` adds the exact b0.
CertificateReport torsion_certificate(const CertificateContext& ctx, const std::vector<int>& S, int p);

// z = sum_i (1,a) + (a,ah_i) - (ah_ia^-1,ah_i) - (1,ah_ia^-1) over the
// labels S' = {a} u {h_i} u {a h_i a^-1}.
CertificateReport qnormal_certificate(const CertificateContext& ctx, const Word& a, const std::vector<Word>& h);

// Candidate h list for a over a GroupTable: generators s with psi(s) = 0 and
// psi(a s a^-1) = 0, added while a stays outside the subgroup they generate.
// Generators whose conjugate a s a^-1 is itself a generator come first.
std::vector<Word> discover_h_list(const CertificateContext& ctx, const Word& a);

// Greedy search over relator translates (finite table only): for each
// generator, repeatedly adds the +-translate that most improves its quotient.
CertificateReport search_certificate(const CertificateContext& ctx, std::size_t budget = 64);

// Cycle families from JSON: {"cycles":[{"generator","relator","base","coefficient","family"?}...]}.
// Entries sharing generator and family are summed.
std::map<int, std::vector<Cycle>> load_cycle_families(const nlohmann::json& j, const CertificateContext& ctx);

}  // namespace betti
