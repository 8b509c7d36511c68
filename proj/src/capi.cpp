#include "betti/betti.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "betti/betti.hpp"
#include "betti/characters.hpp"
#include "betti/enumeration.hpp"
#include "betti/presentation.hpp"
#include "betti/run.hpp"

struct betti_presentation {
  betti::Presentation p;
};

struct betti_table {
  betti::Presentation p;
  betti::GroupTable t;
};

struct betti_character {
  betti::Character psi;
};

namespace {

thread_local std::string last_error;

betti_status status_of(betti::ErrorCode code) {
  return static_cast<betti_status>(static_cast<int>(code) + 1);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
betti_status guard(F&& f) {
  try {
    last_error.clear();
    f();
    return BETTI_OK;
  } catch (const betti::Error& e) {
    last_error = betti::error_json(e).dump();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = R"({"schema":1,"error":{"code":"cap_exceeded","message":"out of memory"},"exit_code":3})";
    return BETTI_ERR_CAP_EXCEEDED;
  } catch (const std::exception& e) {
    last_error = betti::error_json(betti::Error(betti::ErrorCode::internal, e.what())).dump();
    return BETTI_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw betti::Error(betti::ErrorCode::invalid_argument, std::string("null ") + what);
}

betti::ScalarMode mode_of(betti_mode m) {
  return m == BETTI_MODE_FLOAT ? betti::ScalarMode::floating : betti::ScalarMode::exact;
}

}  // namespace

extern "C" {

const char* betti_version(void) { return "1.0.0"; }

const char* betti_status_name(betti_status status) {
  if (status == BETTI_OK) return "ok";
  if (status < BETTI_ERR_SYNTAX || status > BETTI_ERR_INTERNAL) return "unknown";
  return betti::to_string(static_cast<betti::ErrorCode>(static_cast<int>(status) - 1));
}

const char* betti_last_error(void) { return last_error.c_str(); }

int betti_exit_code(betti_status status) {
  if (status == BETTI_OK) return 0;
  return status == BETTI_ERR_CAP_EXCEEDED || status == BETTI_ERR_UNDECIDABLE ? 3 : 2;
}

void betti_string_free(char* s) { std::free(s); }

betti_status betti_presentation_parse(const char* text, betti_presentation** out) {
  return guard([&] {
    require(text, "text");
    require(out, "output");
    *out = new betti_presentation{betti::parse_presentation(text)};
  });
}

betti_status betti_presentation_load(const char* path, betti_presentation** out) {
  return guard([&] {
    require(path, "path");
    require(out, "output");
    *out = new betti_presentation{betti::load_presentation(path)};
  });
}

betti_status betti_presentation_string(const betti_presentation* p, char** out) {
  return guard([&] {
    require(p, "presentation");
    require(out, "output");
    *out = copy_string(betti::to_string(p->p));
  });
}

int betti_presentation_rank(const betti_presentation* p) { return p ? p->p.rank() : -1; }

void betti_presentation_free(betti_presentation* p) { delete p; }

betti_status betti_group_table(const betti_presentation* p, size_t max_cosets, betti_table** out) {
  return guard([&] {
    require(p, "presentation");
    require(out, "output");
    const std::size_t cap = max_cosets ? max_cosets : betti::default_max_cosets();
    *out = new betti_table{p->p, betti::make_group_table(p->p, cap)};
  });
}

size_t betti_table_order(const betti_table* t) { return t ? t->t.size() : 0; }

betti_status betti_table_json(const betti_table* t, char** out) {
  return guard([&] {
    require(t, "table");
    require(out, "output");
    *out = copy_string(betti::table_to_json(t->t.cosets()).dump());
  });
}

void betti_table_free(betti_table* t) { delete t; }

betti_status betti_character_parse(const betti_presentation* p, const char* spec, const char* base_dir,
                                   betti_character** out) {
  return guard([&] {
    require(p, "presentation");
    require(spec, "spec");
    require(out, "output");
    *out = new betti_character{betti::parse_character_spec(spec, p->p, base_dir ? base_dir : "")};
  });
}

void betti_character_free(betti_character* c) { delete c; }

betti_status betti_character_validate(const betti_character* c, const betti_table* t, double tol, int* valid,
                                      char** report_json) {
  return guard([&] {
    require(c, "character");
    require(t, "table");
    const betti::CharacterValidation v = betti::validate_character(c->psi, t->t, tol);
    if (valid) *valid = v.valid ? 1 : 0;
    if (report_json) *report_json = copy_string(v.to_json().dump());
  });
}

betti_status betti_b0(const betti_table* t, const betti_character* c, betti_mode mode, double tol,
                      char** report_json) {
  return guard([&] {
    require(t, "table");
    require(c, "character");
    require(report_json, "output");
    const betti::BoundCharacter psi(c->psi, t->t);
    betti::BettiReport r = betti::b0_psi(psi, mode_of(mode), betti::DimensionRoute::automatic, tol);
    r.presentation = betti::to_string(t->p);
    *report_json = copy_string(r.to_json().dump());
  });
}

betti_status betti_b1(const betti_table* t, const betti_character* c, betti_mode mode, double tol,
                      char** report_json) {
  return guard([&] {
    require(t, "table");
    require(c, "character");
    require(report_json, "output");
    const betti::BoundCharacter psi(c->psi, t->t);
    const betti::BettiReport r = betti::b1_psi_finite(t->p, psi, mode_of(mode), betti::DimensionRoute::automatic, tol);
    *report_json = copy_string(r.to_json().dump());
  });
}

betti_status betti_b1_quotient(const betti_presentation* p, const char* extra_relators, size_t max_cosets,
                               char** report_json) {
  return guard([&] {
    require(p, "presentation");
    require(extra_relators, "relators");
    require(report_json, "output");
    betti::Presentation q = p->p;
    for (betti::Word& w : betti::parse_word_list(extra_relators, q.generators)) q.relators.push_back(std::move(w));
    const std::size_t cap = max_cosets ? max_cosets : betti::default_max_cosets();
    const betti::CosetTable table = betti::enumerate_cosets(q, {}, cap);
    *report_json = copy_string(betti::b1_psi_perm_quotient(p->p, table).to_json().dump());
  });
}

betti_status betti_run(const char* config_json, char** out, char** err, int* exit_code) {
  std::optional<betti::RunResult> result;
  const betti_status s = guard([&] {
    require(config_json, "configuration");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw betti::Error(betti::ErrorCode::syntax, std::string("invalid configuration JSON: ") + e.what());
    }
    result = betti::run(betti::RunConfig::from_json(j));
  });
  if (s != BETTI_OK) {
    if (out) *out = nullptr;
    if (err) *err = copy_string(last_error + "\n");
    if (exit_code) *exit_code = betti_exit_code(s);
    return s;
  }
  if (out) *out = copy_string(result->out);
  if (err) *err = copy_string(result->err);
  if (exit_code) *exit_code = result->exit_code;
  if (result->exit_code != 0) {
    last_error = result->err;
    const auto j = nlohmann::json::parse(result->err, nullptr, false);
    if (!j.is_discarded() && j.contains("error")) {
      const std::string code = j["error"].value("code", "internal");
      for (int k = BETTI_ERR_SYNTAX; k <= BETTI_ERR_INTERNAL; ++k)
        if (code == betti_status_name(static_cast<betti_status>(k))) return static_cast<betti_status>(k);
    }
    return BETTI_ERR_INTERNAL;
  }
  return BETTI_OK;
}

}  // extern "C"
