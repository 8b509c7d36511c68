#include <cstdio>
#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "betti/betti.h"

namespace {

struct Options {
  std::string presentation;
  std::string character = "regular";
  std::string mode = "exact";
  double tol = 1e-9;
  std::size_t max_cosets = 0;
  bool csv = false;
  std::uint64_t seed = 0;
  std::string route = "auto";
  std::string quotient;
  std::string subgroup;
  int prime = 0;
  std::string a;
  std::string h;
  std::string cycles;
  std::string manifest;
  std::size_t regular_order = 0;
  std::size_t budget = 64;
  bool explain = false;
};

void add_common(CLI::App* app, Options& o, bool needs_character) {
  app->add_option("--presentation,-p", o.presentation, "presentation file (.grp)")->required();
  if (needs_character) {
    app->add_option("--character,-c", o.character, "character spec")->capture_default_str();
    app->add_option("--mode", o.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
    app->add_option("--tol", o.tol, "numerical cutoff")->check(CLI::NonNegativeNumber)->capture_default_str();
  }
  app->add_option("--max-cosets", o.max_cosets, "coset cap (default BETTI_MAX_COSETS or 100000)");
}

nlohmann::json config_of(const std::string& command, const std::string& certificate, const Options& o) {
  nlohmann::json j = {{"command", command},   {"presentation", o.presentation}, {"character", o.character},
                      {"mode", o.mode},        {"tol", o.tol},                   {"max_cosets", o.max_cosets},
                      {"format", o.csv ? "csv" : "json"}, {"seed", o.seed},      {"route", o.route},
                      {"quotient", o.quotient}, {"subgroup", o.subgroup},        {"budget", o.budget},
                      {"explain", o.explain}};
  if (!certificate.empty()) j["certificate"] = certificate;
  if (o.prime) j["prime"] = o.prime;
  if (!o.a.empty()) j["a"] = o.a;
  if (!o.h.empty()) j["h"] = o.h;
  if (!o.cycles.empty()) j["cycles"] = o.cycles;
  if (!o.manifest.empty()) j["manifest"] = o.manifest;
  if (o.regular_order) j["regular_order"] = o.regular_order;
  return j;
}

int usage_error(const std::string& message) {
  const nlohmann::json j = {{"schema", 1}, {"error", {{"code", "invalid_argument"}, {"message", message}}}, {"exit_code", 2}};
  std::cerr << j.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character-weighted Betti numbers of finitely presented groups"};
  app.set_version_flag("--version", std::string(betti_version()));
  app.require_subcommand(1);
  Options o;
  std::string command, certificate;
  app.add_option("--seed", o.seed, "seed for randomized checks");

  CLI::App* enumerate = app.add_subcommand("enumerate", "Todd-Coxeter coset enumeration");
  add_common(enumerate, o, false);
  enumerate->add_option("--subgroup", o.subgroup, "comma-separated subgroup generators");

  for (const char* name : {"b0", "b1"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("compute ") + name + " for a character");
    add_common(sub, o, true);
    sub->add_option("--subgroup", o.subgroup, "restrict to the subgroup generated by these words");
    sub->add_option("--route", o.route, "auto, gram, rank-shortcut or quotient-module")->capture_default_str();
    sub->add_flag("--csv", o.csv, "CSV output");
    if (std::string(name) == "b1")
      sub->add_option("--quotient", o.quotient, "quotient .grp file or extra relators");
  }

  CLI::App* certify = app.add_subcommand("certify", "cycle certificates bounding b1");
  certify->require_subcommand(1);
  const std::pair<const char*, const char*> kinds[] = {
      {"torsion", "relator cycles of a group of prime exponent"},
      {"qnormal", "cycle through a, the h_i and their conjugates a h_i a^-1"},
      {"cycles", "user-supplied cycle families"},
      {"search", "greedy search over relator translates"}};
  for (const auto& [name, about] : kinds) {
    CLI::App* sub = certify->add_subcommand(name, about);
    add_common(sub, o, true);
    sub->add_flag("--explain", o.explain, "include per-pair pairing tables");
    sub->add_flag("--csv", o.csv, "CSV output");
    const std::string n = name;
    if (n == "torsion") sub->add_option("--prime", o.prime, "exponent p")->required();
    if (n == "qnormal") {
      sub->set_help_flag("--help", "Print this help message and exit");
      sub->add_option("--a", o.a, "the element a")->required();
      sub->add_option("--h", o.h, "comma-separated h_i, or auto")->required();
    }
    if (n == "cycles") sub->add_option("--cycles", o.cycles, "cycle family JSON")->required();
    if (n == "qnormal" || n == "cycles") {
      sub->add_option("--quotient", o.quotient, "evaluate through this quotient instead of a group table");
      sub->add_option("--regular-order", o.regular_order, "order of a psi-regular subgroup for the b0 term");
    }
    if (n == "search") sub->add_option("--budget", o.budget, "greedy steps per generator")->capture_default_str();
  }

  CLI::App* character = app.add_subcommand("character", "character tools");
  character->require_subcommand(1);
  CLI::App* validate = character->add_subcommand("validate", "check normalization, class function and positivity");
  add_common(validate, o, true);

  CLI::App* batch = app.add_subcommand("batch", "run a JSON manifest of configurations");
  batch->add_option("manifest", o.manifest, "manifest path")->required();
  batch->add_flag("--csv", o.csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  if (*enumerate) command = "enumerate";
  for (const char* name : {"b0", "b1"})
    if (*app.get_subcommand(name)) command = name;
  if (*certify) {
    command = "certify";
    certificate = certify->get_subcommands().front()->get_name();
  }
  if (*character) command = "character-validate";
  if (*batch) command = "batch";

  const std::string config = config_of(command, certificate, o).dump();
  char* out = nullptr;
  char* err = nullptr;
  int exit_code = 2;
  betti_run(config.c_str(), &out, &err, &exit_code);
  if (out) std::fputs(out, stdout);
  if (err) std::fputs(err, stderr);
  betti_string_free(out);
  betti_string_free(err);
  return exit_code;
}
