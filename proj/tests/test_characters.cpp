#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "betti/characters.hpp"
#include "betti/error.hpp"
#include "support.hpp"

using namespace betti;

namespace {

const Presentation& s3() {
  static const Presentation p = parse_presentation("<a,b | a^2, b^2, (ab)^3>");
  return p;
}

Rational value(const BoundCharacter& psi, const Presentation& p, const char* word) {
  return *psi.at(psi.table().element(parse_word(word, p.generators))).exact;
}

}  // namespace

TEST_CASE("permutation character on cosets of an order-two subgroup") {
  const GroupTable t = make_group_table(s3());
  const Character perm = parse_character_spec("perm:a", s3());
  const BoundCharacter psi(perm, t);
  CHECK(value(psi, s3(), "1") == 1);
  CHECK(value(psi, s3(), "a") == Rational(1, 3));
  CHECK(value(psi, s3(), "b") == Rational(1, 3));
  CHECK(value(psi, s3(), "ab") == 0);
}

TEST_CASE("permutation characters of the extreme actions") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    const BoundCharacter regular(Character::permutation(t.cosets()), t);
    std::vector<Word> all;
    for (int s = 0; s < p.rank(); ++s) all.push_back(Word::generator(s));
    const BoundCharacter point(Character::permutation(enumerate_cosets(p, all)), t);
    for (std::size_t x = 0; x < t.size(); ++x) {
      CHECK(*regular.at(static_cast<int>(x)).exact == (x == 0 ? 1 : 0));
      CHECK(*point.at(static_cast<int>(x)).exact == 1);
    }
  }
}

TEST_CASE("mixtures") {
  const GroupTable z2 = make_group_table(parse_presentation("<a | a^2>"));
  const Presentation pz2 = parse_presentation("<a | a^2>");
  const BoundCharacter half(parse_character_spec("mix:1/2*regular+1/2*trivial", pz2), z2);
  CHECK(*half.at(1).exact == Rational(1, 2));
  const BoundCharacter one(Character::mixture({{Rational(1), Character::regular()}}), z2);
  CHECK(*one.at(1).exact == 0);

  const GroupTable t = make_group_table(s3());
  const BoundCharacter mix(parse_character_spec("mix:1/3*trivial+2/3*perm:a", s3()), t);
  CHECK(value(mix, s3(), "a") == Rational(5, 9));
  CHECK(value(mix, s3(), "ab") == Rational(1, 3));

  CHECK_THROWS_AS(Character::mixture({{Rational(1, 2), Character::regular()}}), Error);
  CHECK_THROWS_AS(parse_character_spec("mix:1/2*regular+1/3*trivial", s3()), Error);
  CHECK_THROWS_AS(Character::mixture({{Rational(-1, 2), Character::regular()}, {Rational(3, 2), Character::trivial()}}),
                  Error);
  const BoundCharacter dec(parse_character_spec("mix:0.25*regular+0.75*trivial", s3()), t);
  CHECK(value(dec, s3(), "a") == Rational(3, 4));
}

TEST_CASE("validation of standard characters") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    CHECK(validate_character(Character::regular(), t).valid);
    CHECK(validate_character(Character::trivial(), t).valid);
    const auto subs = std::vector<Word>{Word::generator(0)};
    CHECK(validate_character(Character::permutation(enumerate_cosets(p, subs)), t).valid);
  }
}

TEST_CASE("non positive table character is rejected") {
  const Presentation p = parse_presentation("<a | a^3>");
  const GroupTable t = make_group_table(p);
  const Character bad = parse_table_character("class_rep,value\n1,1\na,-1\na^2,-1\n", p);
  const CharacterValidation v = validate_character(bad, t);
  CHECK_FALSE(v.valid);
  CHECK(v.failed_invariant == "positive_type");
  REQUIRE(v.min_eigenvalue.has_value());
  // Circulant with first row (1,-1,-1): eigenvalues 1 - 2 = -1 and 1 + 1 = 2.
  CHECK(*v.min_eigenvalue == doctest::Approx(-1.0));
  const Character loaded = load_table_character(support::data_path("z3_nonpsd.csv"), p);
  CHECK_FALSE(validate_character(loaded, t).valid);
}

TEST_CASE("validation reports the failing invariant") {
  const Presentation p = parse_presentation("<a | a^3>");
  const GroupTable t = make_group_table(p);
  const auto v1 = validate_character(parse_table_character("class_rep,value\n1,2\na,0\na^2,0\n", p), t);
  CHECK(v1.failed_invariant == "normalization");
  const auto v2 = validate_character(parse_table_character("class_rep,value\n1,1\na,1/2\na^2,1/4\n", p), t);
  CHECK(v2.failed_invariant == "hermitian");

  const GroupTable s = make_group_table(s3());
  const Character split = parse_table_character("class_rep,value\n1,1\na,1/2\nb,0\nab,0\nba,0\naba,0\n", s3());
  const auto v3 = validate_character(split, s);
  CHECK(v3.failed_invariant == "class_function");
  CHECK_FALSE(v3.witness.empty());
}

TEST_CASE("complex table characters on Z/3") {
  const Presentation p = parse_presentation("<a | a^3>");
  const GroupTable t = make_group_table(p);
  const Character chi = parse_table_character(
      "class_rep,value\n1,1\na,-0.5+0.8660254037844386i\na^2,-0.5-0.8660254037844386i\n", p);
  CHECK_FALSE(chi.is_rational());
  const CharacterValidation v = validate_character(chi, t, 1e-9);
  CHECK(v.valid);
  const BoundCharacter psi(chi, t);
  // psi(g^-1) = conj psi(g)
  for (int g = 0; g < 3; ++g) CHECK(std::abs(psi.at(t.inverse(g)).approx - std::conj(psi.at(g).approx)) < 1e-12);
}

TEST_CASE("table characters need every class exactly once") {
  const Presentation p = parse_presentation("<a | a^3>");
  const GroupTable t = make_group_table(p);
  CHECK_THROWS_AS(BoundCharacter(parse_table_character("class_rep,value\n1,1\na,0\n", p), t), Error);
  CHECK_NOTHROW(BoundCharacter(parse_table_character("class_rep,value\n1,1\na,0\na^2,0\na^-1,0\n", p), t));
  CHECK_THROWS_AS(BoundCharacter(parse_table_character("class_rep,value\n1,1\na,0\na^2,0\na^-1,1\n", p), t), Error);
}

TEST_CASE("psi regularity") {
  const GroupTable t = make_group_table(s3());
  const int a = t.generator(0);
  const std::vector<int> K = subgroup_closure(t, std::vector<int>{a});
  CHECK(is_psi_regular(BoundCharacter(Character::regular(), t), K).regular);
  CHECK(is_psi_regular(BoundCharacter(Character::trivial(), t), std::vector<int>{0}).regular);
  const auto report = is_psi_regular(BoundCharacter(parse_character_spec("perm:a", s3()), t), K);
  CHECK_FALSE(report.regular);
  CHECK(report.witnesses == std::vector<int>{a});
  CHECK_THROWS_AS(is_psi_regular(BoundCharacter(Character::regular(), t), std::vector<int>{0, a, t.generator(1)}),
                  Error);
}

TEST_CASE("Gram matrices of characters are positive semidefinite") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    for (const char* spec : {"regular", "trivial", "perm:1", "mix:1/4*regular+3/4*perm:1"}) {
      const CharacterValidation v = validate_character(parse_character_spec(spec, p), t);
      CHECK(v.valid);
    }
  }
}

TEST_CASE("evaluation on words through a quotient") {
  const Presentation z2 = parse_presentation("<a, b | [a,b]>");
  const CosetTable q = enumerate_cosets(parse_presentation("<a, b | [a,b], a^2, b^2>"), {});
  const Word a = Word::generator(0);
  CHECK(*evaluate_on_word(Character::regular(), Word(), &q).exact == 1);
  CHECK(*evaluate_on_word(Character::regular(), a, &q).exact == 0);
  CHECK_THROWS_AS(evaluate_on_word(Character::regular(), a.pow(2), &q), Error);
  CHECK(*evaluate_on_word(Character::permutation(q), a.pow(2), nullptr).exact == 1);
  CHECK(*evaluate_on_word(Character::trivial(), a, nullptr).exact == 1);
  try {
    evaluate_on_word(Character::regular(), a.pow(2), &q);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undecidable);
  }
  (void)z2;
}

TEST_CASE("spec parser errors") {
  CHECK_THROWS_AS(parse_character_spec("nonsense", s3()), Error);
  CHECK_THROWS_AS(parse_character_spec("perm:c", s3()), Error);
  CHECK_THROWS_AS(parse_character_spec("table:missing.csv", s3(), BETTI_DATA_DIR), Error);
}
