#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "betti/betti.hpp"
#include "betti/error.hpp"
#include "projection_suite.hpp"
#include "support.hpp"

using namespace betti;

namespace {

const char* const kSpecs[] = {"regular", "trivial", "perm:1", "perm:", "mix:1/3*regular+2/3*trivial",
                              "mix:1/2*perm:+1/2*regular"};

std::string spec_for(const char* spec, const Presentation& p) {
  std::string s = spec;
  // A bare "perm:" means the cosets of the first generator.
  for (std::size_t pos = s.find("perm:"); pos != std::string::npos; pos = s.find("perm:", pos + 5)) {
    const std::size_t end = pos + 5;
    if (end == s.size() || s[end] == '+') s.insert(end, p.generators[0]);
  }
  return s;
}

// For a finite group, b0 is the mean of psi over G.
Rational mean_of(const BoundCharacter& psi) {
  Rational sum = 0;
  for (const Rational& v : psi.exact_values()) sum += v;
  Rational n(static_cast<long>(psi.table().size()));
  return sum / n;
}

CosetTable quotient_table(const Presentation& p, const std::string& extra) {
  Presentation q = p;
  for (const Word& r : parse_word_list(extra, p.generators)) q.relators.push_back(r);
  return enumerate_cosets(q, {}, 100000);
}

}  // namespace

TEST_CASE("b0 is the mean of the character on finite groups") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    for (const char* spec : kSpecs) {
      const BoundCharacter psi(parse_character_spec(spec_for(spec, p), p), t);
      CAPTURE(spec);
      const BettiReport r = b0_psi(psi, ScalarMode::exact);
      CHECK(r.value == Scalar(mean_of(psi)));
      CHECK(b0_psi(psi, ScalarMode::exact, DimensionRoute::gram).value == r.value);
      CHECK(b0_psi(psi, ScalarMode::floating).value.real() == doctest::Approx(mean_of(psi).get_d()));
    }
  }
}

TEST_CASE("b0 examples") {
  const Presentation s3 = parse_presentation("<a, b | a^2, b^2, (ab)^3>");
  const GroupTable t = make_group_table(s3);
  CHECK(b0_psi(BoundCharacter(Character::regular(), t), ScalarMode::exact).value == Scalar(Rational(1, 6)));
  CHECK(b0_psi(BoundCharacter(Character::trivial(), t), ScalarMode::exact).value == Scalar(Rational(1)));
  CHECK(b0_psi(BoundCharacter(parse_character_spec("perm:a", s3), t), ScalarMode::exact).value ==
        Scalar(Rational(1, 3)));
  CHECK(b0_regular_upper(4) == Rational(1, 4));
  CHECK(b0_regular_upper(std::nullopt) == 0);
}

TEST_CASE("b0 of a subgroup") {
  const Presentation p = parse_presentation("<a, b | a^3, b^3, (ab)^3, (ab^-1)^3>");
  const GroupTable t = make_group_table(p);
  const BoundCharacter delta(Character::regular(), t);
  const std::vector<int> K = subgroup_closure(t, std::vector<int>{t.generator(0)});
  CHECK(b0_psi_subgroup(delta, K, ScalarMode::exact) == Scalar(Rational(1, 3)));
  const BoundCharacter trivial(Character::trivial(), t);
  CHECK(b0_psi_subgroup(trivial, K, ScalarMode::exact) == Scalar(Rational(1)));
}

TEST_CASE("b0 is at most 1/|K| for psi-regular subgroups") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    for (const char* spec : kSpecs) {
      const BoundCharacter psi(parse_character_spec(spec_for(spec, p), p), t);
      const Rational b0 = b0_psi(psi, ScalarMode::exact).value.rational();
      for (int s = 0; s < t.num_generators(); ++s) {
        const std::vector<int> K = subgroup_closure(t, std::vector<int>{t.generator(s)});
        if (!is_psi_regular(psi, K).regular) continue;
        CHECK(b0 <= b0_regular_upper(K.size()));
      }
    }
  }
}

TEST_CASE("edge boundary kernel has the cycle-space dimension") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    const auto kernel = boundary_kernel(t);
    const std::size_t n = t.size(), s = static_cast<std::size_t>(p.rank());
    CHECK(kernel.size() == s * n - n + 1);
    // Every basis vector is a cycle.
    for (const EdgeVector& z : kernel) {
      std::vector<Rational> boundary(n, Rational(0));
      for (const auto& e : z.terms) {
        boundary[static_cast<std::size_t>(e.base)] -= e.coeff;
        boundary[static_cast<std::size_t>(t.mul(e.base, t.generator(e.label)))] += e.coeff;
      }
      for (const Rational& x : boundary) CHECK(x == 0);
    }
  }
}

TEST_CASE("relator walks close up and match Fox rows") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    const auto rows = fox_rows(p, t);
    REQUIRE(rows.size() == p.relators.size());
    const BoundCharacter delta(Character::regular(), t);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const EdgeVector walk = relator_walk(p.relators[i], 0, t);
      // Same vector: the difference has zero norm under delta.
      EdgeVector diff = walk;
      for (const auto& e : rows[i].terms) diff.add(e.base, e.label, -e.coeff);
      CHECK(pair(diff, diff, delta) == 0);
    }
  }
}

TEST_CASE("b1 vanishes on finite groups") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    for (const char* spec : kSpecs) {
      CAPTURE(spec);
      const BoundCharacter psi(parse_character_spec(spec_for(spec, p), p), t);
      const BettiReport automatic = b1_psi_finite(p, psi, ScalarMode::exact);
      CHECK(automatic.value == Scalar(Rational(0)));
      CHECK(automatic.b0_term == Scalar(mean_of(psi)));
      CHECK(b1_psi_finite(p, psi, ScalarMode::exact, DimensionRoute::gram).value == Scalar(Rational(0)));
      CHECK(std::abs(b1_psi_finite(p, psi, ScalarMode::floating).value.real()) < 1e-9);
    }
  }
}

TEST_CASE("b1 vanishes for complex characters") {
  for (int n : {3, 5, 6}) {
    const Presentation p = parse_presentation("<a | a^" + std::to_string(n) + ">");
    const GroupTable t = make_group_table(p);
    const BoundCharacter chi(support::linear_character(n, 1), t);
    const BettiReport r = b1_psi_finite(p, chi, ScalarMode::floating);
    CHECK(std::abs(r.value.complex()) < 1e-9);
    CHECK(std::abs(r.b0_term.complex()) < 1e-9);
    CHECK_THROWS_AS(b1_psi_finite(p, chi, ScalarMode::exact), Error);
  }
}

TEST_CASE("b1 does not depend on the generating set") {
  const Presentation two = parse_presentation("<a, b | a^2, b^2, (ab)^3>");
  const Presentation three = parse_presentation("<a, b, c | a^2, b^2, c^2, (ab)^3, abac>");
  const GroupTable t2 = make_group_table(two), t3 = make_group_table(three);
  for (const char* spec : {"regular", "trivial", "perm:a"}) {
    const BettiReport r2 = b1_psi_finite(two, BoundCharacter(parse_character_spec(spec, two), t2), ScalarMode::exact);
    const BettiReport r3 =
        b1_psi_finite(three, BoundCharacter(parse_character_spec(spec, three), t3), ScalarMode::exact);
    CHECK(r2.value == r3.value);
    CHECK(r2.b0_term == r3.b0_term);
    CHECK(r3.num_generators == 3);
  }
}

TEST_CASE("Cayley graphs of subgroups") {
  const Presentation p = parse_presentation("<a, b | a^3, b^3, (ab)^3, (ab^-1)^3>");
  const GroupTable t = make_group_table(p);
  const BoundCharacter delta(Character::regular(), t);
  const int a = t.generator(0), b = t.generator(1);
  const BettiReport one = b1_psi_cayley(delta, std::vector<int>{a}, ScalarMode::exact);
  CHECK(one.value == Scalar(Rational(0)));
  CHECK(one.b0_term == Scalar(Rational(1, 3)));
  const BettiReport whole = b1_psi_cayley(delta, std::vector<int>{a, b, t.mul(a, b)}, ScalarMode::exact);
  CHECK(whole.value == Scalar(Rational(0)));
  CHECK(whole.b0_term == Scalar(Rational(1, 27)));
  CHECK(whole.num_generators == 3);
}

TEST_CASE("free group quotients") {
  const Presentation f2 = parse_presentation("<a, b | >");
  for (const auto& [extra, order] : std::vector<std::pair<std::string, long>>{
           {"a^2, b", 2}, {"a^5, b a^-2", 5}, {"a^2, b^2, (ab)^3", 6}, {"a^3, b^3, (ab)^3, (ab^-1)^3", 27}}) {
    CAPTURE(extra);
    const CosetTable q = quotient_table(f2, extra);
    REQUIRE(q.size() == static_cast<std::size_t>(order));
    // A subgroup of index n in F_2 is free of rank n + 1.
    CHECK(b1_psi_perm_quotient(f2, q).value == Scalar(Rational(order + 1, order)));
  }
  CHECK(b1_psi_perm_quotient(f2, quotient_table(f2, "a, b")).value == Scalar(Rational(2)));
}

TEST_CASE("free abelian quotients") {
  const Presentation z2 = parse_presentation("<a, b | [a,b]>");
  Rational previous = 3;
  for (long n = 1; n <= 5; ++n) {
    const std::string e = std::to_string(n);
    const CosetTable q = quotient_table(z2, "a^" + e + ", b^" + e);
    const Rational value = b1_psi_perm_quotient(z2, q).value.rational();
    CHECK(value == Rational(2) / Rational(n * n));
    CHECK(value < previous);
    previous = value;
  }
  const Presentation z3 = parse_presentation("<a, b, c | [a,b], [a,c], [b,c]>");
  CHECK(b1_psi_perm_quotient(z3, quotient_table(z3, "a^2, b, c")).value == Scalar(Rational(3, 2)));
}

TEST_CASE("finite groups with their regular quotient") {
  for (const auto& g : support::corpus()) {
    CAPTURE(g.name);
    const Presentation p = parse_presentation(g.text);
    const GroupTable t = make_group_table(p);
    const BettiReport r = b1_psi_perm_quotient(p, t.cosets(), &t);
    CHECK(r.value == Scalar(Rational(0)));
    CHECK(r.b0_term == Scalar(Rational(1, static_cast<long>(t.size()))));
    // Cosets of a subgroup that need not be normal.
    const CosetTable sub = enumerate_cosets(p, std::vector<Word>{Word::generator(0)});
    CHECK(b1_psi_perm_quotient(p, sub, &t).value == Scalar(Rational(0)));
  }
}

TEST_CASE("report serialization") {
  const Presentation p = parse_presentation("<a | a^3>");
  const GroupTable t = make_group_table(p);
  const BettiReport r = b1_psi_finite(p, BoundCharacter(Character::regular(), t), ScalarMode::exact);
  const nlohmann::json j = r.to_json();
  CHECK(j.at("quantity") == "b1");
  CHECK(j.at("value") == "0/1");
  CHECK(BettiReport::csv_header().size() == r.csv_row().size());
}
