#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "betti/run.hpp"
#include "support.hpp"

using namespace betti;
namespace fs = std::filesystem;

namespace {

RunConfig config(nlohmann::json j) { return RunConfig::from_json(j, BETTI_DATA_DIR); }

nlohmann::json run_json(const nlohmann::json& j) {
  const RunResult r = run(config(j));
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.err.empty());
  return nlohmann::json::parse(r.out);
}

// Scratch directory removed on scope exit.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("betti_run_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("b0 and b1 reports") {
  const nlohmann::json b1 = run_json({{"command", "b1"}, {"presentation", "z3.grp"}});
  CHECK(b1.at("value") == "0/1");
  CHECK(b1.at("components").at("b0") == "1/3");
  CHECK(b1.at("components").at("dim_psi") == "1/3");
  const nlohmann::json b0 = run_json({{"command", "b0"}, {"presentation", "s3.grp"}, {"character", "perm:a"}});
  CHECK(b0.at("value") == "1/3");
  const nlohmann::json sub =
      run_json({{"command", "b0"}, {"presentation", "b23.grp"}, {"subgroup", "a"}});
  CHECK(sub.at("value") == "1/3");
  const nlohmann::json fl = run_json({{"command", "b1"}, {"presentation", "s3.grp"}, {"mode", "float"}});
  REQUIRE(fl.at("value").is_array());
  CHECK(std::abs(fl.at("value")[0].get<double>()) < 1e-9);
}

TEST_CASE("quotient b1") {
  const nlohmann::json r = run_json({{"command", "b1"}, {"presentation", "z2.grp"}, {"quotient", "a^2, b^2"}});
  CHECK(r.at("value") == "1/2");
  const nlohmann::json f = run_json({{"command", "b1"}, {"presentation", "f2.grp"}, {"quotient", "s3.grp"}});
  CHECK(f.at("value") == "7/6");
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::cap_exceeded) == 3);
  CHECK(exit_code_for(ErrorCode::undecidable) == 3);
  for (ErrorCode c : {ErrorCode::syntax, ErrorCode::unknown_generator, ErrorCode::empty_generators,
                      ErrorCode::invalid_argument, ErrorCode::precondition, ErrorCode::validation,
                      ErrorCode::route_disagreement, ErrorCode::io, ErrorCode::internal})
    CHECK(exit_code_for(c) == 2);

  const RunResult cap = run(config({{"command", "b1"}, {"presentation", "f2.grp"}, {"max_cosets", 200}}));
  CHECK(cap.exit_code == 3);
  CHECK(cap.out.empty());
  const nlohmann::json err = nlohmann::json::parse(cap.err);
  CHECK(err.at("error").at("code") == "cap_exceeded");
  CHECK(err.at("exit_code") == 3);

  const RunResult bad = run(config({{"command", "character-validate"}, {"presentation", "z3.grp"},
                                    {"character", "table:z3_nonpsd.csv"}}));
  CHECK(bad.exit_code == 2);
  CHECK(nlohmann::json::parse(bad.err).at("error").at("code") == "validation");

  const RunResult missing = run(config({{"command", "b1"}, {"presentation", "nowhere.grp"}}));
  CHECK(missing.exit_code == 2);
  CHECK(nlohmann::json::parse(missing.err).at("error").at("code") == "io");

  CHECK_THROWS_AS(RunConfig::from_json({{"command", "b1"}, {"colour", "red"}}), Error);
}

TEST_CASE("runs are deterministic") {
  const nlohmann::json j = {{"command", "certify"}, {"certificate", "search"}, {"presentation", "d4.grp"},
                            {"character", "mix:1/2*regular+1/2*trivial"}};
  const RunResult a = run(config(j)), b = run(config(j));
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("certificates through the runner") {
  const nlohmann::json t =
      run_json({{"command", "certify"}, {"certificate", "torsion"}, {"presentation", "b23.grp"}, {"prime", 3}});
  CHECK(t.at("bound") == "2/3");
  CHECK(t.at("sound") == true);
  CHECK(t.at("details").at("bound_including_b0") == "19/27");
  const nlohmann::json q = run_json({{"command", "certify"}, {"certificate", "qnormal"}, {"presentation", "s3.grp"},
                                     {"a", "a"}, {"h", "b"}, {"explain", true}});
  CHECK(q.at("details").at("quotient_lower_bound") == "1/4");
  CHECK(q.contains("explain"));
  const nlohmann::json qa = run_json(
      {{"command", "certify"}, {"certificate", "qnormal"}, {"presentation", "s3.grp"}, {"a", "a"}, {"h", "auto"}});
  CHECK(qa.at("details").at("quotient_lower_bound") == "1/4");
  const nlohmann::json c = run_json(
      {{"command", "certify"}, {"certificate", "cycles"}, {"presentation", "z3.grp"}, {"cycles", "z3_cycles.json"}});
  CHECK(c.at("bound") == "0/1");
}

TEST_CASE("enumeration reports") {
  const nlohmann::json e = run_json({{"command", "enumerate"}, {"presentation", "s3.grp"}, {"subgroup", "a"}});
  CHECK(e.at("size") == 3);
  CHECK(e.at("subgroup") == nlohmann::json::array({"a"}));
  const RunResult csv = run(config({{"command", "enumerate"}, {"presentation", "s3.grp"}, {"format", "csv"}}));
  CHECK(csv.exit_code == 2);
}

TEST_CASE("batch manifests") {
  Scratch s;
  fs::copy_file(support::data_path("z3.grp"), s.dir / "z3.grp");
  fs::copy_file(support::data_path("z2.grp"), s.dir / "z2.grp");

  RunConfig empty;
  empty.command = "batch";
  empty.manifest = s.write("empty.json", "[]");
  const RunResult e = run(empty);
  CHECK(e.exit_code == 0);
  CHECK(nlohmann::json::parse(e.out).at("rows").empty());

  RunConfig dup = empty;
  dup.manifest = s.write("dup.json", R"([{"command":"b1","presentation":"z3.grp"},
                                          {"command":"b1","presentation":"z3.grp"},
                                          {"command":"b1","presentation":"missing.grp"},
                                          {"command":"b1","presentation":"z3.grp","bogus":1}])");
  const RunResult d = run(dup);
  CHECK(d.exit_code == 0);
  const nlohmann::json rows = nlohmann::json::parse(d.out).at("rows");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].at("report") == rows[1].at("report"));
  CHECK(rows[2].at("exit_code") == 2);
  CHECK(rows[3].at("exit_code") == 2);

  RunConfig chain = empty;
  chain.manifest = support::data_path("z2_chain.json");
  chain.format = "csv";
  const auto lines = lines_of(run(chain).out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "index,command,presentation,character,exit_code,quantity,value,route,error");
  CHECK(lines[1].find(",1/2,") != std::string::npos);
  CHECK(lines[2].find(",2/9,") != std::string::npos);
  CHECK(lines[3].find(",1/8,") != std::string::npos);

  RunConfig nested = empty;
  nested.manifest = s.write("nested.json", R"([{"command":"batch","manifest":"empty.json"}])");
  CHECK(nlohmann::json::parse(run(nested).out).at("rows")[0].at("exit_code") == 2);
}

TEST_CASE("configuration round trip") {
  RunConfig c;
  c.command = "certify";
  c.certificate = "qnormal";
  c.presentation = "s3.grp";
  c.a = "a";
  c.h = "b";
  c.mode = ScalarMode::floating;
  c.regular_order = 3;
  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}
