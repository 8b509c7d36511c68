#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "betti/enumeration.hpp"
#include "betti/presentation.hpp"
#include "betti/scalar.hpp"

namespace betti {

// A normalized positive-type class function. Values are realized through
// a GroupTable (bind) or, for word-level evaluation on possibly infinite
// groups, through a coset table (evaluate_on_word).
class Character {
 public:
  enum class Kind { regular, trivial, permutation, table, mixture };

  static Character regular();
  static Character trivial();
  // psi(g) = (cosets fixed by g) / q.
  static Character permutation(CosetTable table, std::string label = {});
  // Values per conjugacy class, keyed by a representative word.
  static Character table(std::vector<std::pair<Word, Scalar>> values, std::string label = {});
  // Weights must be nonnegative and sum to exactly 1.
  static Character mixture(std::vector<std::pair<Rational, Character>> parts);

  Kind kind() const;
  bool is_rational() const;
  std::string describe() const;

  const CosetTable& permutation_table() const;
  const std::vector<std::pair<Word, Scalar>>& table_values() const;
  const std::vector<std::pair<Rational, Character>>& parts() const;

 private:
  struct Node;
  explicit Character(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline Character permutation_character(const CosetTable& t) { return Character::permutation(t); }
inline Character mix_characters(std::vector<std::pair<Rational, Character>> parts) {
  return Character::mixture(std::move(parts));
}

const char* to_string(Character::Kind kind);

struct PsiValue {
  std::optional<Rational> exact;
  Complex approx;

  static PsiValue of(const Rational& q) { return {q, Complex(q.get_d(), 0.0)}; }
  static PsiValue of(Complex z) { return {std::nullopt, z}; }
  Scalar scalar() const { return exact ? Scalar(*exact) : Scalar(approx); }
};

// A character evaluated on every element of a finite group.
class BoundCharacter {
 public:
  BoundCharacter(Character psi, const GroupTable& table);

  const Character& character() const { return psi_; }
  const GroupTable& table() const { return *table_; }
  bool is_rational() const { return rational_; }

  const std::vector<Rational>& exact_values() const;
  const std::vector<Complex>& approx_values() const { return approx_; }
  template <class S>
  const std::vector<S>& values() const;

  PsiValue at(int g) const;

 private:
  Character psi_;
  const GroupTable* table_;
  bool rational_;
  std::vector<Rational> exact_;
  std::vector<Complex> approx_;
};

template <>
inline const std::vector<Rational>& BoundCharacter::values<Rational>() const {
  return exact_values();
}
template <>
inline const std::vector<Complex>& BoundCharacter::values<Complex>() const {
  return approx_;
}

// Evaluates psi on a word of a possibly infinite group. The regular character
// needs `quotient` to certify w != 1 (its image moves coset 0); a word whose
// image fixes coset 0 without freely reducing to 1 raises Error(undecidable).
PsiValue evaluate_on_word(const Character& psi, const Word& w, const CosetTable* quotient);

struct CharacterValidation {
  bool valid = true;
  std::string failed_invariant;  // "normalization", "class_function", "hermitian", "positive_type"
  std::string witness;
  bool exact_check = false;
  std::optional<double> min_eigenvalue;

  nlohmann::json to_json() const;
};

CharacterValidation validate_character(const Character& psi, const GroupTable& t, double tol = 1e-9);

struct PsiRegularityReport {
  std::vector<int> subgroup;
  bool regular = true;
  std::vector<int> witnesses;  // k != 1 with psi(k) != 0
};

// Throws Error(precondition) when K is not a subgroup.
PsiRegularityReport is_psi_regular(const BoundCharacter& psi, std::span<const int> K, double tol = 1e-9);

// Mini-language: regular | trivial | perm:<subgroup words> | table:<csv path>
// | mix:w1*spec1+w2*spec2. Relative table paths resolve against base_dir.
Character parse_character_spec(std::string_view spec, const Presentation& p, const std::string& base_dir = {},
                               std::size_t max_cosets = kDefaultMaxCosets);

// CSV with header `class_rep,value`; values are p/q rationals, decimals or re+imi.
Character load_table_character(const std::string& path, const Presentation& p);
Character parse_table_character(std::string_view csv, const Presentation& p, std::string label = {});

}  // namespace betti
