#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace betti {

// One run of a generator: gen^exp with exp != 0.
struct Letter {
  int gen = 0;
  int exp = 1;

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// A freely reduced word in the free group, stored run-length encoded.
// Adjacent runs always have distinct generators.
class Word {
 public:
  Word() = default;

  static Word generator(int gen, int exp = 1);
  // Reduces an arbitrary letter sequence.
  static Word from_letters(std::span<const Letter> letters);
  // Signed column codes as used by coset tables: 2g is g, 2g+1 is g^-1.
  static Word from_columns(std::span<const int> columns);

  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  // Number of letters after expanding powers.
  std::size_t length() const;

  Word inverse() const;
  Word pow(int n) const;
  std::vector<int> columns() const;

  friend Word operator*(const Word& u, const Word& v);
  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

Word free_reduce(std::span<const Letter> letters);
Word commutator(const Word& u, const Word& v);

// True when w is a cyclic conjugate of r or of r^-1.
bool is_cyclic_conjugate(const Word& w, const Word& r);

struct Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;

  int rank() const { return static_cast<int>(generators.size()); }
  int generator_index(std::string_view name) const;  // -1 if absent

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

// Grammar: `< g1, g2, ... | w1, w2, ... >` with `#` line comments.
// Words: juxtaposition, optional `*`, `x^-1` or the case-swapped alias `X`,
// powers `(w)^n`, commutators `[u,v] = u v u^-1 v^-1`, `u = v` for u v^-1,
// and `1` for the identity.
Presentation parse_presentation(std::string_view text);
Presentation load_presentation(const std::string& path);

// Parses a single word over the given generators.
Word parse_word(std::string_view text, const std::vector<std::string>& generators);
// Comma-separated words; commas inside brackets belong to commutators.
std::vector<Word> parse_word_list(std::string_view text, const std::vector<std::string>& generators);

std::string to_string(const Word& w, const std::vector<std::string>& generators);
std::string to_string(const Presentation& p);

// Finitely supported element of the integral free group ring.
class FreeGroupRingElement {
 public:
  using Terms = std::map<Word, long long>;

  FreeGroupRingElement() = default;
  static FreeGroupRingElement of(const Word& w, long long coeff = 1);

  void add(const Word& w, long long coeff);
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend FreeGroupRingElement operator+(const FreeGroupRingElement& a, const FreeGroupRingElement& b);
  friend FreeGroupRingElement operator-(const FreeGroupRingElement& a, const FreeGroupRingElement& b);
  friend FreeGroupRingElement operator*(const FreeGroupRingElement& a, const FreeGroupRingElement& b);
  friend bool operator==(const FreeGroupRingElement&, const FreeGroupRingElement&) = default;

 private:
  Terms terms_;
};

// Fox derivative d(w)/d(gen).
FreeGroupRingElement fox_derivative(const Word& w, int gen);

}  // namespace betti
