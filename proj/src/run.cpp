#include "betti/run.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "betti/betti.hpp"
#include "betti/certificates.hpp"
#include "betti/characters.hpp"
#include "betti/enumeration.hpp"
#include "betti/presentation.hpp"

namespace betti {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::syntax, "invalid JSON in '" + path + "': " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

std::string scalar_text(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array() && j.size() == 2) {
    std::ostringstream ss;
    ss.precision(17);
    ss << j[0].get<double>();
    if (j[1].get<double>() != 0.0) ss << (j[1].get<double>() < 0 ? "" : "+") << j[1].get<double>() << "i";
    return ss.str();
  }
  return j.dump();
}

std::vector<std::string> certificate_csv_header() {
  return {"kind", "bound", "b0_term", "closed_form", "exact_b1", "sound", "regime", "mode", "presentation", "character"};
}

std::vector<std::string> certificate_csv_row(const CertificateReport& r) {
  return {r.kind,
          r.bound.to_string(),
          r.b0_term.to_string(),
          r.closed_form ? r.closed_form->to_string() : "",
          r.exact_b1 ? r.exact_b1->to_string() : "",
          r.sound ? (*r.sound ? "true" : "false") : "",
          to_string(r.regime),
          to_string(r.mode),
          r.presentation,
          r.character};
}

class Runner {
 public:
  explicit Runner(const RunConfig& c) : c_(c) {
    if (c_.tol < 0) throw Error(ErrorCode::invalid_argument, "tol must be nonnegative");
    if (c_.format != "json" && c_.format != "csv")
      throw Error(ErrorCode::invalid_argument, "unknown output format '" + c_.format + "'");
    cap_ = c_.max_cosets ? c_.max_cosets : default_max_cosets();
  }

  std::string execute() {
    const std::string& cmd = c_.command;
    if (cmd == "enumerate") return enumerate();
    if (cmd == "b0") return b0();
    if (cmd == "b1") return b1();
    if (cmd == "certify") return certify();
    if (cmd == "character-validate" || cmd == "validate") return validate();
    if (cmd == "batch") return batch();
    throw Error(ErrorCode::invalid_argument, "unknown command '" + cmd + "'");
  }

 private:
  const Presentation& presentation() {
    if (!p_) {
      if (!c_.presentation_text.empty()) p_ = parse_presentation(c_.presentation_text);
      else if (!c_.presentation.empty()) p_ = load_presentation(resolve(c_.presentation, c_.base_dir));
      else throw Error(ErrorCode::invalid_argument, "no presentation given");
    }
    return *p_;
  }

  const GroupTable& group() {
    if (!t_) t_ = make_group_table(presentation(), cap_);
    return *t_;
  }

  Character character() {
    return parse_character_spec(c_.character.empty() ? "regular" : c_.character, presentation(), c_.base_dir, cap_);
  }

  std::vector<Word> words(const std::string& text) { return parse_word_list(text, presentation().generators); }

  const CosetTable& quotient_table() {
    if (q_) return *q_;
    const Presentation& p = presentation();
    const std::string path = resolve(c_.quotient, c_.base_dir);
    if (fs::is_regular_file(path)) {
      if (fs::path(path).extension() == ".json") {
        q_ = table_from_json(read_json(path));
      } else {
        const Presentation qp = load_presentation(path);
        if (qp.generators != p.generators)
          throw Error(ErrorCode::precondition, "quotient presentation has different generators");
        q_ = enumerate_cosets(qp, {}, cap_);
      }
    } else {
      Presentation qp = p;
      for (Word& w : words(c_.quotient)) qp.relators.push_back(std::move(w));
      q_ = enumerate_cosets(qp, {}, cap_);
    }
    if (q_->generators() != p.generators) throw Error(ErrorCode::precondition, "quotient table has different generators");
    return *q_;
  }

  std::vector<int> subgroup_elements() {
    std::vector<int> out;
    for (const Word& w : words(c_.subgroup)) out.push_back(group().element(w));
    if (out.empty()) throw Error(ErrorCode::invalid_argument, "subgroup list is empty");
    return out;
  }

  std::string emit_betti(const BettiReport& r) {
    if (c_.format == "csv") return csv_line(BettiReport::csv_header()) + csv_line(r.csv_row());
    return r.to_json().dump(2) + "\n";
  }

  std::string emit_certificate(const CertificateReport& r) {
    if (c_.format == "csv") return csv_line(certificate_csv_header()) + csv_line(certificate_csv_row(r));
    return r.to_json().dump(2) + "\n";
  }

  std::string enumerate() {
    const Presentation& p = presentation();
    const std::vector<Word> sub = c_.subgroup.empty() ? std::vector<Word>{} : words(c_.subgroup);
    const CosetTable t = enumerate_cosets(p, sub, cap_);
    if (c_.format == "csv") throw Error(ErrorCode::invalid_argument, "enumerate reports JSON only");
    nlohmann::json j = table_to_json(t);
    j["presentation"] = to_string(p);
    j["subgroup"] = nlohmann::json::array();
    for (const Word& w : sub) j["subgroup"].push_back(to_string(w, p.generators));
    return j.dump(2) + "\n";
  }

  std::string b0() {
    const BoundCharacter psi(character(), group());
    if (!c_.subgroup.empty()) {
      const std::vector<int> K = subgroup_closure(group(), subgroup_elements());
      BettiReport r;
      r.quantity = "b0";
      r.mode = c_.mode;
      r.route = to_string(DimensionRoute::gram);
      r.num_generators = static_cast<int>(words(c_.subgroup).size());
      r.presentation = to_string(presentation()) + " subgroup " + c_.subgroup;
      r.character = psi.character().describe();
      r.value = b0_psi_subgroup(psi, K, c_.mode, c_.tol);
      r.b0_term = r.value;
      r.dim_term = r.value.is_exact() ? Scalar(Rational(1 - r.value.rational()))
                                      : Scalar(Complex(1.0 - r.value.real(), 0.0));
      r.ranks["subgroup_order"] = K.size();
      return emit_betti(r);
    }
    BettiReport r = b0_psi(psi, c_.mode, parse_dimension_route(c_.route), c_.tol);
    r.presentation = to_string(presentation());
    return emit_betti(r);
  }

  std::string b1() {
    const Presentation& p = presentation();
    if (!c_.quotient.empty()) {
      if (!c_.subgroup.empty()) throw Error(ErrorCode::invalid_argument, "--quotient and --subgroup are exclusive");
      return emit_betti(b1_psi_perm_quotient(p, quotient_table()));
    }
    const BoundCharacter psi(character(), group());
    if (!c_.subgroup.empty()) {
      BettiReport r = b1_psi_cayley(psi, subgroup_elements(), c_.mode, c_.tol);
      r.presentation = to_string(p) + " subgroup " + c_.subgroup;
      return emit_betti(r);
    }
    return emit_betti(b1_psi_finite(p, psi, c_.mode, parse_dimension_route(c_.route), c_.tol));
  }

  std::unique_ptr<CertificateContext> context(bool allow_quotient) {
    if (allow_quotient && !c_.quotient.empty())
      return std::make_unique<CertificateContext>(presentation(), quotient_table(), character(), c_.mode);
    return std::make_unique<CertificateContext>(presentation(), group(), character(), c_.mode);
  }

  std::string certify() {
    const std::string& kind = c_.certificate;
    std::unique_ptr<CertificateContext> ctx;
    CertificateReport r;
    LabelSet labels = LabelSet::generators(presentation());
    if (kind == "torsion") {
      if (c_.prime <= 0) throw Error(ErrorCode::invalid_argument, "torsion certificate needs --prime");
      ctx = context(false);
      std::vector<int> S(static_cast<std::size_t>(presentation().rank()));
      for (std::size_t i = 0; i < S.size(); ++i) S[i] = static_cast<int>(i);
      r = torsion_certificate(*ctx, S, c_.prime);
    } else if (kind == "qnormal") {
      if (c_.a.empty() || c_.h.empty()) throw Error(ErrorCode::invalid_argument, "q-normal certificate needs --a and --h");
      ctx = context(true);
      const Word a = parse_word(c_.a, presentation().generators);
      r = qnormal_certificate(*ctx, a, c_.h == "auto" ? discover_h_list(*ctx, a) : words(c_.h));
      labels = LabelSet{};
      for (const auto& name : r.details.at("labels")) {
        labels.names.push_back(name.get<std::string>());
        labels.words.push_back(parse_word(name.get<std::string>(), presentation().generators));
      }
    } else if (kind == "cycles") {
      if (c_.cycles.empty()) throw Error(ErrorCode::invalid_argument, "cycles certificate needs --cycles");
      ctx = context(true);
      const auto families = load_cycle_families(read_json(resolve(c_.cycles, c_.base_dir)), *ctx);
      const auto [b0, provenance] = select_b0_term(*ctx, c_.regular_order);
      r = b1_upper_bound(labels, families, *ctx, b0, provenance);
      compare_with_exact(r, *ctx, c_.tol);
    } else if (kind == "search") {
      ctx = context(false);
      r = search_certificate(*ctx, c_.budget);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown certificate '" + kind + "'");
    }
    if (c_.explain) r.explain = explain_pairings(r, labels, *ctx);
    return emit_certificate(r);
  }

  std::string validate() {
    const Character psi = character();
    const CharacterValidation v = validate_character(psi, group(), c_.tol);
    if (!v.valid)
      throw Error(ErrorCode::validation, "character fails " + v.failed_invariant, v.witness);
    nlohmann::json j = {{"schema", 1}, {"character", psi.describe()}, {"presentation", to_string(presentation())}};
    j["validation"] = v.to_json();
    return j.dump(2) + "\n";
  }

  std::string batch() {
    const std::string path = resolve(c_.manifest.empty() ? c_.presentation : c_.manifest, c_.base_dir);
    if (path.empty()) throw Error(ErrorCode::invalid_argument, "batch needs a manifest");
    const nlohmann::json manifest = read_json(path);
    if (!manifest.is_array()) throw Error(ErrorCode::validation, "manifest must be a JSON array of run configurations");
    const std::string dir = fs::path(path).parent_path().string();
    nlohmann::json rows = nlohmann::json::array();
    std::string csv = csv_line({"index", "command", "presentation", "character", "exit_code", "quantity", "value",
                                "route", "error"});
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      nlohmann::json row = {{"index", i}};
      RunResult res;
      RunConfig cfg;
      try {
        cfg = RunConfig::from_json(manifest[i], dir);
        if (cfg.command == "batch") throw Error(ErrorCode::invalid_argument, "nested batch runs are not allowed");
        cfg.format = "json";
        res = run(cfg);
      } catch (const Error& e) {
        res = {exit_code_for(e.code()), {}, error_json(e).dump()};
      }
      row["exit_code"] = res.exit_code;
      nlohmann::json report = res.exit_code == 0 ? nlohmann::json::parse(res.out) : nlohmann::json::parse(res.err);
      std::string quantity, value, route, error;
      if (res.exit_code == 0) {
        quantity = report.value("quantity", report.value("kind", cfg.command));
        if (report.contains("value")) value = scalar_text(report["value"]);
        else if (report.contains("bound")) value = scalar_text(report["bound"]);
        route = report.value("route", "");
        row["report"] = std::move(report);
      } else {
        error = report["error"].value("message", "");
        row["error"] = std::move(report["error"]);
      }
      csv += csv_line({std::to_string(i), cfg.command, cfg.presentation.empty() ? cfg.presentation_text : cfg.presentation,
                       cfg.character, std::to_string(res.exit_code), quantity, value, route, error});
      rows.push_back(std::move(row));
    }
    if (c_.format == "csv") return csv;
    return nlohmann::json{{"schema", 1}, {"rows", std::move(rows)}}.dump(2) + "\n";
  }

  const RunConfig& c_;
  std::size_t cap_ = 0;
  std::optional<Presentation> p_;
  std::optional<GroupTable> t_;
  std::optional<CosetTable> q_;
};

}  // namespace

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::cap_exceeded || code == ErrorCode::undecidable ? 3 : 2;
}

nlohmann::json error_json(const Error& e) {
  nlohmann::json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (!e.witness().empty()) err["witness"] = e.witness();
  return {{"schema", 1}, {"error", std::move(err)}, {"exit_code", exit_code_for(e.code())}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "run configuration must be a JSON object");
  static const std::vector<std::string> known = {
      "command", "certificate", "presentation", "presentation_text", "character", "mode", "tol",
      "max_cosets", "format", "seed", "route", "quotient", "subgroup", "prime", "a", "h", "cycles",
      "manifest", "regular_order", "budget", "explain", "base_dir"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::validation, "unknown configuration field '" + key + "'");
  RunConfig c;
  try {
    c.command = j.value("command", "");
    c.certificate = j.value("certificate", "");
    c.presentation = j.value("presentation", "");
    c.presentation_text = j.value("presentation_text", "");
    c.character = j.value("character", "regular");
    c.mode = parse_scalar_mode(j.value("mode", "exact"));
    c.tol = j.value("tol", 1e-9);
    c.max_cosets = j.value("max_cosets", std::size_t{0});
    c.format = j.value("format", "json");
    c.seed = j.value("seed", std::uint64_t{0});
    c.route = j.value("route", "auto");
    c.quotient = j.value("quotient", "");
    c.subgroup = j.value("subgroup", "");
    c.prime = j.value("prime", 0);
    c.a = j.value("a", "");
    c.h = j.value("h", "");
    c.cycles = j.value("cycles", "");
    c.manifest = j.value("manifest", "");
    if (j.contains("regular_order") && !j["regular_order"].is_null())
      c.regular_order = j["regular_order"].get<std::size_t>();
    c.budget = j.value("budget", std::size_t{64});
    c.explain = j.value("explain", false);
    c.base_dir = j.value("base_dir", base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, std::string("bad run configuration: ") + e.what());
  }
  if (c.tol < 0) throw Error(ErrorCode::invalid_argument, "tol must be nonnegative");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"command", command},       {"certificate", certificate}, {"presentation", presentation},
                      {"presentation_text", presentation_text}, {"character", character}, {"mode", to_string(mode)},
                      {"tol", tol},               {"max_cosets", max_cosets}, {"format", format},
                      {"seed", seed},             {"route", route},           {"quotient", quotient},
                      {"subgroup", subgroup},     {"prime", prime},           {"a", a},
                      {"h", h},                   {"cycles", cycles},         {"manifest", manifest},
                      {"budget", budget},         {"explain", explain},       {"base_dir", base_dir}};
  if (regular_order) j["regular_order"] = *regular_order;
  return j;
}

RunResult run(const RunConfig& config) {
  RunResult r;
  try {
    Runner runner(config);
    r.out = runner.execute();
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e.code());
    r.out.clear();
    r.err = error_json(e).dump() + "\n";
  } catch (const std::bad_alloc&) {
    r.exit_code = 3;
    r.out.clear();
    r.err = error_json(Error(ErrorCode::cap_exceeded, "out of memory")).dump() + "\n";
  } catch (const std::exception& e) {
    r.exit_code = 2;
    r.out.clear();
    r.err = error_json(Error(ErrorCode::internal, e.what())).dump() + "\n";
  }
  return r;
}

}  // namespace betti
