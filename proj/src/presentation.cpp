#include "betti/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "betti/error.hpp"

namespace betti {

// --- words ------------------------------------------------------------------

Word Word::from_letters(std::span<const Letter> letters) {
  Word w;
  auto& out = w.letters_;
  for (const Letter& l : letters) {
    if (l.exp == 0) continue;
    if (!out.empty() && out.back().gen == l.gen) {
      out.back().exp += l.exp;
      if (out.back().exp == 0) out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return w;
}

Word Word::generator(int gen, int exp) {
  const Letter l{gen, exp};
  return free_reduce(std::span<const Letter>(&l, 1));
}

Word free_reduce(std::span<const Letter> letters) { return Word::from_letters(letters); }

Word Word::from_columns(std::span<const int> columns) {
  std::vector<Letter> letters;
  letters.reserve(columns.size());
  for (int c : columns) letters.push_back({c / 2, (c % 2) ? -1 : 1});
  return free_reduce(letters);
}

std::size_t Word::length() const {
  std::size_t n = 0;
  for (const Letter& l : letters_) n += static_cast<std::size_t>(std::abs(l.exp));
  return n;
}

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back({it->gen, -it->exp});
  return w;
}

Word Word::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  std::vector<Letter> letters;
  letters.reserve(letters_.size() * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) letters.insert(letters.end(), letters_.begin(), letters_.end());
  return free_reduce(letters);
}

std::vector<int> Word::columns() const {
  std::vector<int> cols;
  cols.reserve(length());
  for (const Letter& l : letters_) {
    const int c = 2 * l.gen + (l.exp < 0 ? 1 : 0);
    for (int i = 0; i < std::abs(l.exp); ++i) cols.push_back(c);
  }
  return cols;
}

Word operator*(const Word& u, const Word& v) {
  std::vector<Letter> letters = u.letters_;
  letters.insert(letters.end(), v.letters_.begin(), v.letters_.end());
  return free_reduce(letters);
}

Word commutator(const Word& u, const Word& v) { return u * v * u.inverse() * v.inverse(); }

bool is_cyclic_conjugate(const Word& w, const Word& r) {
  const Word target = w;
  for (const Word& base : {r, r.inverse()}) {
    const std::vector<int> cols = base.columns();
    if (cols.empty()) {
      if (target.empty()) return true;
      continue;
    }
    std::vector<int> rotated(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::rotate_copy(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(k), cols.end(), rotated.begin());
      if (Word::from_columns(rotated) == target) return true;
    }
  }
  return false;
}

int Presentation::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (generators[i] == name) return static_cast<int>(i);
  return -1;
}

// --- parser -----------------------------------------------------------------

namespace {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Presentation presentation() {
    Presentation p;
    expect('<');
    skip();
    if (peek() == '|' || peek() == '>') fail("empty generator list", ErrorCode::empty_generators);
    for (;;) {
      skip();
      const int line = line_, col = col_;
      if (!is_name_start(peek())) fail("expected generator name");
      std::string name;
      while (is_name_char(peek())) name.push_back(advance());
      if (std::find(p.generators.begin(), p.generators.end(), name) != p.generators.end())
        throw SyntaxError("duplicate generator '" + name + "'", line, col);
      p.generators.push_back(std::move(name));
      skip();
      if (peek() == ',') {
        advance();
        continue;
      }
      break;
    }
    set_generators(p.generators);
    skip();
    if (peek() == '|') {
      advance();
      p.relators = word_list('>');
    }
    expect('>');
    skip();
    if (!at_end()) fail("trailing input after presentation");
    return p;
  }

  void set_generators(const std::vector<std::string>& gens) {
    names_.clear();
    for (std::size_t i = 0; i < gens.size(); ++i) names_.push_back({gens[i], static_cast<int>(i), 1});
    for (std::size_t i = 0; i < gens.size(); ++i) {
      std::string alias = gens[i];
      const unsigned char c0 = static_cast<unsigned char>(alias[0]);
      if (std::islower(c0)) alias[0] = static_cast<char>(std::toupper(c0));
      else if (std::isupper(c0)) alias[0] = static_cast<char>(std::tolower(c0));
      else continue;
      if (std::find(gens.begin(), gens.end(), alias) != gens.end()) continue;
      names_.push_back({alias, static_cast<int>(i), -1});
    }
    // Longest match first.
    std::stable_sort(names_.begin(), names_.end(),
                     [](const Name& a, const Name& b) { return a.text.size() > b.text.size(); });
  }

  std::vector<Word> word_list(char terminator) {
    std::vector<Word> words;
    skip();
    if (peek() == terminator || at_end()) return words;
    for (;;) {
      words.push_back(relation());
      skip();
      if (peek() == ',') {
        advance();
        continue;
      }
      return words;
    }
  }

  Word single_word() {
    Word w = relation();
    skip();
    if (!at_end()) fail("unexpected character");
    return w;
  }

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

 private:
  struct Name {
    std::string text;
    int gen;
    int sign;
  };

  Word relation() {
    Word lhs = term();
    skip();
    if (peek() == '=') {
      advance();
      Word rhs = term();
      return lhs * rhs.inverse();
    }
    return lhs;
  }

  Word term() {
    Word w;
    for (;;) {
      skip();
      const char c = peek();
      if (c == '*') {
        advance();
        continue;
      }
      if (c == '(' || c == '[' || c == '1' || is_name_start(c)) {
        w = w * factor();
        continue;
      }
      return w;
    }
  }

  Word factor() {
    Word base = primary();
    skip();
    if (peek() == '^') {
      advance();
      skip();
      return base.pow(integer());
    }
    return base;
  }

  Word primary() {
    skip();
    const char c = peek();
    if (c == '(') {
      advance();
      Word w = relation();
      expect(')');
      return w;
    }
    if (c == '[') {
      advance();
      Word w = relation();
      expect(',');
      w = commutator(w, relation());
      skip();
      while (peek() == ',') {
        advance();
        w = commutator(w, relation());
        skip();
      }
      expect(']');
      return w;
    }
    if (c == '1') {
      advance();
      return Word();
    }
    return name();
  }

  Word name() {
    const int line = line_, col = col_;
    const std::string_view rest = text_.substr(pos_);
    for (const Name& n : names_) {
      if (rest.substr(0, n.text.size()) == n.text) {
        for (std::size_t i = 0; i < n.text.size(); ++i) advance();
        return Word::generator(n.gen, n.sign);
      }
    }
    std::string token;
    for (std::size_t i = 0; i < rest.size() && is_name_char(rest[i]); ++i) token.push_back(rest[i]);
    throw Error(ErrorCode::unknown_generator, "unknown generator '" + token + "' at " + std::to_string(line) +
                                                  ":" + std::to_string(col));
  }

  int integer() {
    skip();
    int sign = 1;
    if (peek() == '-' || peek() == '+') {
      if (advance() == '-') sign = -1;
      skip();
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer exponent");
    long long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (advance() - '0');
      if (v > 1000000) fail("exponent too large");
    }
    return sign * static_cast<int>(v);
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  [[noreturn]] void fail(const std::string& message, ErrorCode code = ErrorCode::syntax) {
    if (code == ErrorCode::syntax) throw SyntaxError(message, line_, col_);
    throw Error(code, message + " at " + std::to_string(line_) + ":" + std::to_string(col_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Name> names_;
};

}  // namespace

Presentation parse_presentation(std::string_view text) {
  Parser parser(text);
  return parser.presentation();
}

Presentation load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open presentation file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_presentation(buf.str());
}

Word parse_word(std::string_view text, const std::vector<std::string>& generators) {
  Parser parser(text);
  parser.set_generators(generators);
  return parser.single_word();
}

std::vector<Word> parse_word_list(std::string_view text, const std::vector<std::string>& generators) {
  Parser parser(text);
  parser.set_generators(generators);
  std::vector<Word> words = parser.word_list('\0');
  if (!parser.at_end()) throw SyntaxError("unexpected character in word list", 1, 1);
  return words;
}

std::string to_string(const Word& w, const std::vector<std::string>& generators) {
  if (w.empty()) return "1";
  const bool single = std::all_of(generators.begin(), generators.end(),
                                  [](const std::string& g) { return g.size() == 1; });
  std::string out;
  bool first = true;
  for (const Letter& l : w.letters()) {
    if (!first && !single) out += ' ';
    first = false;
    out += generators.at(static_cast<std::size_t>(l.gen));
    if (l.exp != 1) out += "^" + std::to_string(l.exp);
  }
  return out;
}

std::string to_string(const Presentation& p) {
  std::string out = "<";
  for (std::size_t i = 0; i < p.generators.size(); ++i) {
    if (i) out += ", ";
    out += p.generators[i];
  }
  out += " |";
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    out += i ? ", " : " ";
    out += to_string(p.relators[i], p.generators);
  }
  out += ">";
  return out;
}

// --- Fox calculus -----------------------------------------------------------

FreeGroupRingElement FreeGroupRingElement::of(const Word& w, long long coeff) {
  FreeGroupRingElement e;
  e.add(w, coeff);
  return e;
}

void FreeGroupRingElement::add(const Word& w, long long coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

FreeGroupRingElement operator+(const FreeGroupRingElement& a, const FreeGroupRingElement& b) {
  FreeGroupRingElement r = a;
  for (const auto& [w, c] : b.terms_) r.add(w, c);
  return r;
}

FreeGroupRingElement operator-(const FreeGroupRingElement& a, const FreeGroupRingElement& b) {
  FreeGroupRingElement r = a;
  for (const auto& [w, c] : b.terms_) r.add(w, -c);
  return r;
}

FreeGroupRingElement operator*(const FreeGroupRingElement& a, const FreeGroupRingElement& b) {
  FreeGroupRingElement r;
  for (const auto& [u, c] : a.terms_)
    for (const auto& [v, d] : b.terms_) r.add(u * v, c * d);
  return r;
}

FreeGroupRingElement fox_derivative(const Word& w, int gen) {
  FreeGroupRingElement d;
  Word prefix;
  for (int col : w.columns()) {
    const Word letter = Word::from_columns(std::span<const int>(&col, 1));
    if (col / 2 == gen) {
      if (col % 2 == 0) d.add(prefix, 1);
      else d.add(prefix * letter, -1);
    }
    prefix = prefix * letter;
  }
  return d;
}

}  // namespace betti
