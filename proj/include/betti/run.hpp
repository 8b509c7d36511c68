#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "betti/error.hpp"
#include "betti/scalar.hpp"

namespace betti {

// One CLI invocation. Relative paths resolve against base_dir.
struct RunConfig {
  std::string command;      // enumerate, b0, b1, certify, character-validate, batch
  std::string certificate;  // torsion, qnormal, cycles, search (certify only)
  std::string presentation;
  std::string presentation_text;  // inline alternative to a path
  std::string character = "regular";
  ScalarMode mode = ScalarMode::exact;
  double tol = 1e-9;
  std::size_t max_cosets = 0;  // 0 means default_max_cosets()
  std::string format = "json";
  std::uint64_t seed = 0;
  std::string route = "auto";
  std::string quotient;  // .grp path or extra relators
  std::string subgroup;  // comma-separated words
  int prime = 0;
  std::string a;
  std::string h;
  std::string cycles;
  std::string manifest;
  std::optional<std::size_t> regular_order;
  std::size_t budget = 64;
  bool explain = false;
  std::string base_dir;

  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = {});
  nlohmann::json to_json() const;
};

struct RunResult {
  int exit_code = 0;
  std::string out;  // report (empty on failure)
  std::string err;  // error JSON (empty on success)
};

// Exit codes: 0 success, 2 precondition or validation failure, 3 cap
// exceeded or undecidable.
RunResult run(const RunConfig& config);

int exit_code_for(ErrorCode code);
nlohmann::json error_json(const Error& e);

}  // namespace betti
