#include "betti/characters.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "betti/error.hpp"
#include "betti/linalg.hpp"

namespace betti {

struct Character::Node {
  Kind kind = Kind::regular;
  std::string label;
  std::optional<CosetTable> perm;
  std::vector<std::pair<Word, Scalar>> table;
  std::vector<std::pair<Rational, Character>> parts;
};

const char* to_string(Character::Kind kind) {
  switch (kind) {
    case Character::Kind::regular: return "regular";
    case Character::Kind::trivial: return "trivial";
    case Character::Kind::permutation: return "permutation";
    case Character::Kind::table: return "table";
    case Character::Kind::mixture: return "mixture";
  }
  return "unknown";
}

Character Character::regular() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::regular;
  n->label = "regular";
  return Character(std::move(n));
}

Character Character::trivial() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::trivial;
  n->label = "trivial";
  return Character(std::move(n));
}

Character Character::permutation(CosetTable table, std::string label) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::permutation;
  n->label = label.empty() ? "perm[" + std::to_string(table.size()) + "]" : std::move(label);
  n->perm = std::move(table);
  return Character(std::move(n));
}

Character Character::table(std::vector<std::pair<Word, Scalar>> values, std::string label) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "table character has no values");
  auto n = std::make_shared<Node>();
  n->kind = Kind::table;
  n->label = label.empty() ? "table" : std::move(label);
  n->table = std::move(values);
  return Character(std::move(n));
}

Character Character::mixture(std::vector<std::pair<Rational, Character>> parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "mixture has no parts");
  Rational total = 0;
  std::string label = "mix:";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (sgn(parts[i].first) < 0) throw Error(ErrorCode::invalid_argument, "mixture weight is negative");
    total += parts[i].first;
    if (i) label += "+";
    label += parts[i].first.get_str() + "*" + parts[i].second.describe();
  }
  if (total != 1)
    throw Error(ErrorCode::invalid_argument, "mixture weights sum to " + rational_to_string(total) + ", not 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::mixture;
  n->label = std::move(label);
  n->parts = std::move(parts);
  return Character(std::move(n));
}

Character::Kind Character::kind() const { return node_->kind; }

bool Character::is_rational() const {
  switch (node_->kind) {
    case Kind::table:
      return std::all_of(node_->table.begin(), node_->table.end(), [](const auto& e) { return e.second.is_exact(); });
    case Kind::mixture:
      return std::all_of(node_->parts.begin(), node_->parts.end(),
                         [](const auto& p) { return p.second.is_rational(); });
    default:
      return true;
  }
}

std::string Character::describe() const { return node_->label; }

const CosetTable& Character::permutation_table() const {
  if (node_->kind != Kind::permutation) throw Error(ErrorCode::invalid_argument, "not a permutation character");
  return *node_->perm;
}

const std::vector<std::pair<Word, Scalar>>& Character::table_values() const { return node_->table; }
const std::vector<std::pair<Rational, Character>>& Character::parts() const { return node_->parts; }

// --- binding ----------------------------------------------------------------

namespace {

void check_same_generators(const CosetTable& perm, const GroupTable& t) {
  if (perm.num_generators() != t.num_generators())
    throw Error(ErrorCode::precondition, "permutation table and group table have different generator counts");
}

// Fixed-point counts of every group element on the permutation table.
// Also checks that the word-wise action is a homomorphism from G.
std::vector<std::size_t> fixed_counts(const CosetTable& perm, const GroupTable& t) {
  check_same_generators(perm, t);
  const std::size_t n = t.size(), q = perm.size();
  std::vector<int> image(n * q);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t c = 0; c < q; ++c) image[g * q + c] = perm.act(static_cast<int>(c), t.word(static_cast<int>(g)));
  for (std::size_t g = 0; g < n; ++g)
    for (int s = 0; s < t.num_generators(); ++s) {
      const auto gs = static_cast<std::size_t>(t.mul(static_cast<int>(g), t.generator(s)));
      for (std::size_t c = 0; c < q; ++c)
        if (image[gs * q + c] != perm.act(image[g * q + c], 2 * s))
          throw Error(ErrorCode::precondition, "permutation table is not an action of the group");
    }
  std::vector<std::size_t> fixed(n, 0);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t c = 0; c < q; ++c)
      if (image[g * q + c] == static_cast<int>(c)) ++fixed[g];
  return fixed;
}

}  // namespace

BoundCharacter::BoundCharacter(Character psi, const GroupTable& table)
    : psi_(std::move(psi)), table_(&table), rational_(psi_.is_rational()) {
  const std::size_t n = table.size();
  if (rational_) exact_.assign(n, Rational(0));
  approx_.assign(n, Complex(0.0, 0.0));
  switch (psi_.kind()) {
    case Character::Kind::regular:
      if (rational_) exact_[0] = 1;
      approx_[0] = 1.0;
      break;
    case Character::Kind::trivial:
      if (rational_) std::fill(exact_.begin(), exact_.end(), Rational(1));
      std::fill(approx_.begin(), approx_.end(), Complex(1.0, 0.0));
      break;
    case Character::Kind::permutation: {
      const CosetTable& perm = psi_.permutation_table();
      const std::vector<std::size_t> fixed = fixed_counts(perm, table);
      for (std::size_t g = 0; g < n; ++g) {
        Rational v(static_cast<unsigned long>(fixed[g]), static_cast<unsigned long>(perm.size()));
        v.canonicalize();
        approx_[g] = v.get_d();
        exact_[g] = std::move(v);
      }
      break;
    }
    case Character::Kind::table: {
      const auto classes = conjugacy_classes(table);
      std::vector<int> class_of(n, -1);
      for (std::size_t k = 0; k < classes.size(); ++k)
        for (int g : classes[k]) class_of[static_cast<std::size_t>(g)] = static_cast<int>(k);
      std::vector<std::optional<Scalar>> value(classes.size());
      for (const auto& [w, v] : psi_.table_values()) {
        for (const Letter& l : w.letters())
          if (l.gen >= table.num_generators()) throw Error(ErrorCode::precondition, "class representative uses unknown generator");
        const int k = class_of[static_cast<std::size_t>(table.element(w))];
        if (value[static_cast<std::size_t>(k)] && !(*value[static_cast<std::size_t>(k)] == v))
          throw Error(ErrorCode::validation, "table rows give different values on one conjugacy class",
                      to_string(w, table.cosets().generators()));
        value[static_cast<std::size_t>(k)] = v;
      }
      for (std::size_t k = 0; k < classes.size(); ++k) {
        if (!value[k])
          throw Error(ErrorCode::precondition, "table character misses a conjugacy class",
                      to_string(table.word(classes[k][0]), table.cosets().generators()));
        for (int g : classes[k]) {
          approx_[static_cast<std::size_t>(g)] = value[k]->complex();
          if (rational_) exact_[static_cast<std::size_t>(g)] = value[k]->rational();
        }
      }
      break;
    }
    case Character::Kind::mixture:
      for (const auto& [weight, part] : psi_.parts()) {
        const BoundCharacter b(part, table);
        for (std::size_t g = 0; g < n; ++g) {
          approx_[g] += weight.get_d() * b.approx_[g];
          if (rational_) exact_[g] += weight * b.exact_[g];
        }
      }
      break;
  }
}

const std::vector<Rational>& BoundCharacter::exact_values() const {
  if (!rational_) throw Error(ErrorCode::invalid_argument, "character '" + psi_.describe() + "' is not rational-valued; use float mode");
  return exact_;
}

PsiValue BoundCharacter::at(int g) const {
  if (rational_) return PsiValue::of(exact_[static_cast<std::size_t>(g)]);
  return PsiValue::of(approx_[static_cast<std::size_t>(g)]);
}

// --- word-level evaluation --------------------------------------------------

PsiValue evaluate_on_word(const Character& psi, const Word& w, const CosetTable* quotient) {
  switch (psi.kind()) {
    case Character::Kind::trivial:
      return PsiValue::of(Rational(1));
    case Character::Kind::regular:
      if (w.empty()) return PsiValue::of(Rational(1));
      if (quotient && quotient->act(0, w) != 0) return PsiValue::of(Rational(0));
      throw Error(ErrorCode::undecidable, "cannot decide whether a word is trivial from the quotient table",
                  quotient ? to_string(w, quotient->generators()) : std::string());
    case Character::Kind::permutation: {
      const CosetTable& t = psi.permutation_table();
      Rational v(static_cast<unsigned long>(t.fixed_points(w)), static_cast<unsigned long>(t.size()));
      v.canonicalize();
      return PsiValue::of(v);
    }
    case Character::Kind::table:
      throw Error(ErrorCode::precondition, "table characters need a full group table");
    case Character::Kind::mixture: {
      Rational exact = 0;
      Complex approx = 0.0;
      bool rational = true;
      for (const auto& [weight, part] : psi.parts()) {
        const PsiValue v = evaluate_on_word(part, w, quotient);
        approx += weight.get_d() * v.approx;
        if (v.exact) exact += weight * *v.exact;
        else rational = false;
      }
      return rational ? PsiValue::of(exact) : PsiValue::of(approx);
    }
  }
  throw Error(ErrorCode::internal, "unknown character kind");
}

// --- validation -------------------------------------------------------------

nlohmann::json CharacterValidation::to_json() const {
  nlohmann::json j;
  j["valid"] = valid;
  j["exact_check"] = exact_check;
  if (!valid) {
    j["failed_invariant"] = failed_invariant;
    j["witness"] = witness;
  }
  if (min_eigenvalue) j["min_eigenvalue"] = *min_eigenvalue;
  return j;
}

CharacterValidation validate_character(const Character& psi, const GroupTable& t, double tol) {
  CharacterValidation report;
  std::optional<BoundCharacter> bound;
  try {
    bound.emplace(psi, t);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::validation) throw;
    report.valid = false;
    report.failed_invariant = "class_function";
    report.witness = "conflicting values on the class of " + e.witness();
    return report;
  }
  const BoundCharacter& b = *bound;
  const std::size_t n = t.size();
  const auto& gens = t.cosets().generators();
  report.exact_check = b.is_rational();
  auto fail = [&](const char* invariant, std::string witness) {
    report.valid = false;
    report.failed_invariant = invariant;
    report.witness = std::move(witness);
  };
  auto equal = [&](int g, int h, bool conjugated) {
    if (b.is_rational()) return b.exact_values()[static_cast<std::size_t>(g)] == b.exact_values()[static_cast<std::size_t>(h)];
    const Complex x = b.approx_values()[static_cast<std::size_t>(g)];
    const Complex y = b.approx_values()[static_cast<std::size_t>(h)];
    return std::abs(x - (conjugated ? std::conj(y) : y)) <= tol;
  };

  const PsiValue one = b.at(0);
  if (one.exact ? *one.exact != 1 : std::abs(one.approx - 1.0) > tol) {
    fail("normalization", "psi(1) = " + one.scalar().to_string());
    return report;
  }
  for (std::size_t g = 0; g < n && report.valid; ++g)
    for (int s = 0; s < t.num_generators(); ++s) {
      const int c = t.conjugate(t.generator(s), static_cast<int>(g));
      if (!equal(c, static_cast<int>(g), false)) {
        fail("class_function", "psi(" + to_string(t.word(c), gens) + ") != psi(" +
                                   to_string(t.word(static_cast<int>(g)), gens) + ")");
        break;
      }
    }
  if (!report.valid) return report;
  for (std::size_t g = 0; g < n; ++g)
    if (!equal(t.inverse(static_cast<int>(g)), static_cast<int>(g), true)) {
      fail("hermitian", "psi(g^-1) != conj(psi(g)) for g = " + to_string(t.word(static_cast<int>(g)), gens));
      return report;
    }

  Matrix<Complex> approx(n, n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h)
      approx(g, h) = b.approx_values()[static_cast<std::size_t>(t.mul(t.inverse(static_cast<int>(h)), static_cast<int>(g)))];
  report.min_eigenvalue = min_eigenvalue(approx);
  if (b.is_rational()) {
    Matrix<Rational> gram(n, n);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h)
        gram(g, h) = b.exact_values()[static_cast<std::size_t>(t.mul(t.inverse(static_cast<int>(h)), static_cast<int>(g)))];
    const SemidefiniteSolver<Rational> solver(gram);
    if (!solver.positive_semidefinite()) fail("positive_type", solver.failure());
  } else if (*report.min_eigenvalue < -tol) {
    fail("positive_type", "Gram matrix has eigenvalue " + std::to_string(*report.min_eigenvalue));
  }
  return report;
}

PsiRegularityReport is_psi_regular(const BoundCharacter& psi, std::span<const int> K, double tol) {
  const GroupTable& t = psi.table();
  if (!is_subgroup(t, K)) throw Error(ErrorCode::precondition, "element set is not closed under the group operations");
  PsiRegularityReport report;
  report.subgroup.assign(K.begin(), K.end());
  std::sort(report.subgroup.begin(), report.subgroup.end());
  for (int k : report.subgroup) {
    if (k == 0) continue;
    const PsiValue v = psi.at(k);
    const bool zero = v.exact ? sgn(*v.exact) == 0 : std::abs(v.approx) <= tol;
    if (!zero) report.witnesses.push_back(k);
  }
  report.regular = report.witnesses.empty();
  return report;
}

// --- parsing ----------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Rational weight; decimals are converted exactly.
Rational parse_weight(std::string_view text) {
  text = trim(text);
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return parse_rational(text);
  std::string digits(text.substr(0, dot));
  std::string frac(text.substr(dot + 1));
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorCode::invalid_argument, "malformed weight '" + std::string(text) + "'");
  Rational q(mpz_class((digits.empty() ? "0" : digits) + frac, 10));
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  q /= den;
  return q;
}

}  // namespace

Character parse_table_character(std::string_view csv, const Presentation& p, std::string label) {
  std::vector<std::pair<Word, Scalar>> values;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    if (!header) {
      if (row != "class_rep,value")
        throw SyntaxError("expected header 'class_rep,value'", lineno, 1);
      header = true;
      continue;
    }
    const auto comma = row.rfind(',');
    if (comma == std::string_view::npos) throw SyntaxError("expected 'class_rep,value'", lineno, 1);
    values.emplace_back(parse_word(row.substr(0, comma), p.generators), parse_scalar(row.substr(comma + 1)));
  }
  if (!header) throw SyntaxError("missing header 'class_rep,value'", 1, 1);
  return Character::table(std::move(values), std::move(label));
}

Character load_table_character(const std::string& path, const Presentation& p) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open character table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_table_character(buf.str(), p, "table:" + path);
}

Character parse_character_spec(std::string_view spec, const Presentation& p, const std::string& base_dir,
                               std::size_t max_cosets) {
  spec = trim(spec);
  if (spec == "regular" || spec == "delta") return Character::regular();
  if (spec == "trivial") return Character::trivial();
  if (spec.rfind("perm:", 0) == 0) {
    const std::vector<Word> gens = parse_word_list(spec.substr(5), p.generators);
    CosetTable t = enumerate_cosets(p, gens, max_cosets);
    return Character::permutation(std::move(t), std::string(spec));
  }
  if (spec.rfind("table:", 0) == 0) {
    std::filesystem::path path{std::string(trim(spec.substr(6)))};
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    Character c = load_table_character(path.string(), p);
    return Character::table(c.table_values(), std::string(spec));
  }
  if (spec.rfind("mix:", 0) == 0) {
    std::vector<std::pair<Rational, Character>> parts;
    std::string_view rest = spec.substr(4);
    while (!rest.empty()) {
      const auto plus = rest.find('+');
      const std::string_view item = rest.substr(0, plus);
      const auto star = item.find('*');
      if (star == std::string_view::npos)
        throw Error(ErrorCode::invalid_argument, "mixture item '" + std::string(item) + "' lacks 'weight*'");
      parts.emplace_back(parse_weight(item.substr(0, star)),
                         parse_character_spec(item.substr(star + 1), p, base_dir, max_cosets));
      if (plus == std::string_view::npos) break;
      rest = rest.substr(plus + 1);
    }
    return Character::mixture(std::move(parts));
  }
  throw Error(ErrorCode::invalid_argument, "unknown character spec '" + std::string(spec) + "'");
}

}  // namespace betti
