#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "betti/betti.h"

namespace {

// Takes ownership of a returned string.
std::string take(char* s) {
  std::string out = s ? s : "";
  betti_string_free(s);
  return out;
}

std::string data(const char* name) { return std::string(BETTI_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strcmp(betti_version(), "1.0.0") == 0);
  CHECK(std::strcmp(betti_status_name(BETTI_OK), "ok") == 0);
  CHECK(std::strcmp(betti_status_name(BETTI_ERR_CAP_EXCEEDED), "cap_exceeded") == 0);
  CHECK(betti_exit_code(BETTI_OK) == 0);
  CHECK(betti_exit_code(BETTI_ERR_UNDECIDABLE) == 3);
  CHECK(betti_exit_code(BETTI_ERR_SYNTAX) == 2);
}

TEST_CASE("presentations") {
  betti_presentation* p = nullptr;
  REQUIRE(betti_presentation_parse("<a, b | a^2, b^2, (ab)^3>", &p) == BETTI_OK);
  CHECK(betti_presentation_rank(p) == 2);
  char* text = nullptr;
  REQUIRE(betti_presentation_string(p, &text) == BETTI_OK);
  CHECK(take(text).find("ab") != std::string::npos);
  betti_presentation_free(p);

  betti_presentation* bad = nullptr;
  CHECK(betti_presentation_parse("<a | b>", &bad) == BETTI_ERR_UNKNOWN_GENERATOR);
  CHECK(bad == nullptr);
  const nlohmann::json err = nlohmann::json::parse(betti_last_error());
  CHECK(err.at("error").at("code") == "unknown_generator");
  CHECK(betti_presentation_parse("<a | a^>", &bad) == BETTI_ERR_SYNTAX);
  CHECK(betti_presentation_load(data("missing.grp").c_str(), &bad) == BETTI_ERR_IO);
  CHECK(betti_presentation_parse(nullptr, &bad) == BETTI_ERR_INVALID_ARGUMENT);

  REQUIRE(betti_presentation_load(data("b23.grp").c_str(), &p) == BETTI_OK);
  betti_table* t = nullptr;
  REQUIRE(betti_group_table(p, 0, &t) == BETTI_OK);
  CHECK(betti_table_order(t) == 27);
  char* json = nullptr;
  REQUIRE(betti_table_json(t, &json) == BETTI_OK);
  CHECK(nlohmann::json::parse(take(json)).at("size") == 27);
  betti_table_free(t);
  betti_presentation_free(p);
}

TEST_CASE("cap exceeded through the C interface") {
  betti_presentation* p = nullptr;
  REQUIRE(betti_presentation_parse("<a, b | >", &p) == BETTI_OK);
  betti_table* t = nullptr;
  CHECK(betti_group_table(p, 100, &t) == BETTI_ERR_CAP_EXCEEDED);
  CHECK(t == nullptr);
  char* report = nullptr;
  CHECK(betti_b1_quotient(p, "a^2, b^2, (ab)^3", 0, &report) == BETTI_OK);
  CHECK(nlohmann::json::parse(take(report)).at("value") == "7/6");
  betti_presentation_free(p);
}

TEST_CASE("characters and Betti numbers") {
  betti_presentation* p = nullptr;
  REQUIRE(betti_presentation_load(data("z3.grp").c_str(), &p) == BETTI_OK);
  betti_table* t = nullptr;
  REQUIRE(betti_group_table(p, 0, &t) == BETTI_OK);

  betti_character* delta = nullptr;
  REQUIRE(betti_character_parse(p, "regular", nullptr, &delta) == BETTI_OK);
  char* report = nullptr;
  REQUIRE(betti_b0(t, delta, BETTI_MODE_EXACT, 1e-9, &report) == BETTI_OK);
  CHECK(nlohmann::json::parse(take(report)).at("value") == "1/3");
  REQUIRE(betti_b1(t, delta, BETTI_MODE_EXACT, 1e-9, &report) == BETTI_OK);
  CHECK(nlohmann::json::parse(take(report)).at("value") == "0/1");
  REQUIRE(betti_b1(t, delta, BETTI_MODE_FLOAT, 1e-9, &report) == BETTI_OK);
  CHECK(nlohmann::json::parse(take(report)).at("value").is_array());

  int valid = -1;
  char* vjson = nullptr;
  REQUIRE(betti_character_validate(delta, t, 1e-9, &valid, &vjson) == BETTI_OK);
  CHECK(valid == 1);
  take(vjson);

  betti_character* bad = nullptr;
  REQUIRE(betti_character_parse(p, "table:z3_nonpsd.csv", BETTI_DATA_DIR, &bad) == BETTI_OK);
  REQUIRE(betti_character_validate(bad, t, 1e-9, &valid, &vjson) == BETTI_OK);
  CHECK(valid == 0);
  CHECK(nlohmann::json::parse(take(vjson)).at("failed_invariant") == "positive_type");
  betti_character_free(bad);

  betti_character* none = nullptr;
  CHECK(betti_character_parse(p, "perm:q", nullptr, &none) != BETTI_OK);
  CHECK(none == nullptr);
  CHECK(betti_b1(nullptr, delta, BETTI_MODE_EXACT, 1e-9, &report) == BETTI_ERR_INVALID_ARGUMENT);

  betti_character_free(delta);
  betti_table_free(t);
  betti_presentation_free(p);
  betti_character_free(nullptr);
  betti_table_free(nullptr);
  betti_presentation_free(nullptr);
}

TEST_CASE("run configurations") {
  const nlohmann::json cfg = {{"command", "b1"}, {"presentation", data("z2.grp")}, {"quotient", "a^2, b^2"}};
  char* out = nullptr;
  char* err = nullptr;
  int code = -1;
  CHECK(betti_run(cfg.dump().c_str(), &out, &err, &code) == BETTI_OK);
  CHECK(code == 0);
  CHECK(nlohmann::json::parse(take(out)).at("value") == "1/2");
  CHECK(take(err).empty());

  const nlohmann::json cap = {{"command", "b1"}, {"presentation", data("f2.grp")}, {"max_cosets", 100}};
  CHECK(betti_run(cap.dump().c_str(), &out, &err, &code) == BETTI_ERR_CAP_EXCEEDED);
  CHECK(code == 3);
  CHECK(take(out).empty());
  CHECK(nlohmann::json::parse(take(err)).at("exit_code") == 3);

  CHECK(betti_run("{not json", &out, &err, &code) == BETTI_ERR_SYNTAX);
  CHECK(code == 2);
  take(out);
  take(err);
}
