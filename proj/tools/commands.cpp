#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <cmath>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "run_config.hpp"
#include "vsm/inference.hpp"
#include "vsm/model_io.hpp"
#include "vsm/oracle.hpp"
#include "vsm/parser.hpp"
#include "vsm/similarity.hpp"

namespace vsm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& p, std::string_view content) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimilarityMatrix load_similarity(const std::optional<fs::path>& path, const KnowledgeBase& kb) {
  if (!path) return jaccard_similarity(kb);
  return read_similarity_matrix(read_file(*path), kb);
}

std::string model_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "model_%03zu.json", i);
  return buf;
}

const char* status_name(EnsembleStatus s) { return s == EnsembleStatus::Complete ? "complete" : "partial"; }

json ensemble_document(const Ensemble& e) {
  json doc;
  doc["requested"] = e.requested;
  doc["accepted"] = e.size();
  doc["status"] = status_name(e.status);
  auto& members = doc["members"] = json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto& p = e.provenance[i];
    members.push_back({{"file", model_file_name(i)},
                       {"seed", p.seed},
                       {"final_loss", p.final_loss},
                       {"hard_loss", p.hard_loss},
                       {"disparity", p.disparity},
                       {"iterations", p.iterations}});
  }
  auto& attempts = doc["attempts"] = json::array();
  for (const auto& a : e.attempts) {
    attempts.push_back({{"seed", a.seed}, {"accepted", a.accepted}, {"reason", a.reason}});
  }
  return doc;
}

/// Parse or semantic failure while reading a KB, with the code to return.
struct KbFailure {
  int code;
  std::string message;
};

std::variant<KnowledgeBase, KbFailure> load_kb(const fs::path& path, int parse_code, int semantic_code) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    return KbFailure{exit_code::input_error, e.what()};
  }
  try {
    return parse_kb(text);
  } catch (const ParseError& e) {
    return KbFailure{parse_code, path.string() + ": parse error: " + e.what()};
  } catch (const SemanticError& e) {
    return KbFailure{semantic_code, path.string() + ": error: " + e.what()};
  }
}

}  // namespace

Ensemble load_ensemble(const fs::path& dir, const KnowledgeBase& kb) {
  const auto doc = nlohmann::json::parse(read_file(dir / "ensemble.json"));
  Ensemble e;
  e.requested = doc.at("requested").get<std::size_t>();
  e.status = doc.at("status").get<std::string>() == "complete" ? EnsembleStatus::Complete : EnsembleStatus::Partial;
  for (const auto& m : doc.at("members")) {
    Provenance p;
    p.seed = m.at("seed").get<std::uint64_t>();
    p.final_loss = m.at("final_loss").get<double>();
    p.hard_loss = m.at("hard_loss").get<double>();
    p.disparity = m.at("disparity").get<double>();
    p.iterations = m.at("iterations").get<int>();
    e.add(read_model(read_file(dir / m.at("file").get<std::string>()), kb), p);
  }
  return e;
}

int cmd_validate(const fs::path& kb_path, bool as_json, std::ostream& out, std::ostream& err) {
  auto loaded = load_kb(kb_path, exit_code::parse_error, exit_code::semantic_error);
  if (auto* f = std::get_if<KbFailure>(&loaded)) {
    err << f->message << "\n";
    return f->code;
  }
  const auto& kb = std::get<KnowledgeBase>(loaded);
  if (as_json) {
    json doc{{"terms", kb.num_terms()},         {"predicates", kb.num_predicates()},
             {"triples", kb.triples().size()},  {"axioms", kb.axioms().size()},
             {"constraints", kb.constraints().size()}, {"queries", kb.queries().size()},
             {"oracle_bits", required_bits(kb)}};
    out << doc.dump(2) << "\n";
  } else {
    out << "terms: " << kb.num_terms() << "\n"
        << "predicates: " << kb.num_predicates() << "\n"
        << "triples: " << kb.triples().size() << "\n"
        << "axioms: " << kb.axioms().size() << "\n"
        << "constraints: " << kb.constraints().size() << "\n"
        << "queries: " << kb.queries().size() << "\n";
  }
  return exit_code::ok;
}

int cmd_solve(const SolveRequest& req, bool as_json, std::ostream& out, std::ostream& err) {
  auto loaded = load_kb(req.kb_path, exit_code::parse_error, exit_code::semantic_error);
  if (auto* f = std::get_if<KbFailure>(&loaded)) {
    err << f->message << "\n";
    return f->code;
  }
  const auto& kb = std::get<KnowledgeBase>(loaded);
  try {
    req.config.validate();
    const SimilarityMatrix sim = load_similarity(req.sim_path, kb);
    std::vector<TraceRecord> trace;
    const Ensemble e = generate_ensemble(kb, sim, req.config, req.config.ensemble_size, &trace);

    fs::create_directories(req.out_dir);
    std::vector<std::string> outputs{"ensemble.json", "diagnostics.tsv"};
    for (std::size_t i = 0; i < e.size(); ++i) outputs.push_back(model_file_name(i));

    json manifest;
    manifest["tool"] = "vsm";
    manifest["version"] = kToolVersion;
    manifest["command"] = "solve";
    manifest["inputs"]["kb"] = req.kb_path.string();
    manifest["inputs"]["kb_hash"] = content_hash(read_file(req.kb_path));
    manifest["inputs"]["similarity"] = req.sim_path ? json(req.sim_path->string()) : json(nullptr);
    if (req.sim_path) manifest["inputs"]["similarity_hash"] = content_hash(read_file(*req.sim_path));
    manifest["inputs"]["config"] = req.config_path ? json(req.config_path->string()) : json(nullptr);
    manifest["config"] = config_to_json(req.config);
    auto& seeds = manifest["seeds"] = json::array();
    for (const auto& a : e.attempts) seeds.push_back(a.seed);
    manifest["outputs"] = outputs;
    write_file_atomic(req.out_dir / "manifest.json", manifest.dump(2) + "\n");

    for (std::size_t i = 0; i < e.size(); ++i) {
      write_file_atomic(req.out_dir / model_file_name(i), write_model(e.models[i], kb));
    }
    const json doc = ensemble_document(e);
    write_file_atomic(req.out_dir / "ensemble.json", doc.dump(2) + "\n");

    std::string tsv = "seed\titeration\tloss\tsharpness\n";
    for (const auto& r : trace) {
      tsv += std::to_string(r.seed) + "\t" + std::to_string(r.iteration) + "\t" + fmt(r.loss) + "\t" +
             fmt(r.sharpness) + "\n";
    }
    write_file_atomic(req.out_dir / "diagnostics.tsv", tsv);

    for (const auto& a : e.attempts) {
      if (!a.accepted) err << "seed " << a.seed << " rejected: " << a.reason << "\n";
    }
    if (as_json) {
      out << doc.dump(2) << "\n";
    } else {
      out << "accepted " << e.size() << "/" << e.requested << " members (" << status_name(e.status) << ") after "
          << e.attempts.size() << " attempts\n";
      for (std::size_t i = 0; i < e.size(); ++i) {
        out << "  " << model_file_name(i) << "  seed " << e.provenance[i].seed << "  disparity "
            << fmt(e.provenance[i].disparity) << "\n";
      }
      out << "written to " << req.out_dir.string() << "\n";
    }
    return e.status == EnsembleStatus::Complete ? exit_code::ok : exit_code::partial;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::input_error;
  }
}

int cmd_query(const QueryRequest& req, bool as_json, std::ostream& out, std::ostream& err) {
  auto loaded = load_kb(req.kb_path, exit_code::input_error, exit_code::input_error);
  if (auto* f = std::get_if<KbFailure>(&loaded)) {
    err << f->message << "\n";
    return f->code;
  }
  const auto& kb = std::get<KnowledgeBase>(loaded);
  try {
    NamedQuery q;
    if (const auto* named = kb.find_query(req.query)) q = *named;
    else q = parse_query_formula(req.query, kb);
    const Ensemble e = load_ensemble(req.ensemble_dir, kb);
    if (e.empty()) {
      err << "error: ensemble in '" << req.ensemble_dir.string() << "' has no members\n";
      return exit_code::input_error;
    }

    const auto vars = free_vars(*q.formula);
    if (!vars.empty()) {
      const auto bound = query_bindings(e, q.formula, kb);
      if (as_json) {
        json doc{{"query", to_string(*q.formula, kb)}, {"variable", *vars.begin()}, {"bindings", json::array()}};
        for (TermId t : bound) doc["bindings"].push_back(kb.name(t));
        out << doc.dump(2) << "\n";
      } else {
        for (TermId t : bound) out << kb.name(t) << "\n";
        if (req.explain) out << explain(e, q.formula, kb);
      }
      return bound.empty() ? exit_code::query_false : exit_code::ok;
    }

    const QueryVerdict v = query_closed(e, *q.formula, kb);
    if (as_json) {
      json doc{{"query", to_string(*q.formula, kb)},
               {"verdict", to_string(v.value)},
               {"agreeing", v.agreeing()},
               {"members", v.per_model.size()},
               {"per_model", json::array()}};
      for (const auto& [i, b] : v.per_model) doc["per_model"].push_back({{"model", i}, {"value", b}});
      if (req.explain) doc["explanation"] = explain(e, q.formula, kb);
      out << doc.dump(2) << "\n";
    } else {
      out << v.str() << "\n";
      if (req.explain) out << explain(e, q.formula, kb);
    }
    switch (v.value) {
      case Truth::True: return exit_code::ok;
      case Truth::False: return exit_code::query_false;
      case Truth::Unknown: return exit_code::unknown;
    }
    return exit_code::unknown;
  } catch (const ParseError& ex) {
    err << "query: parse error: " << ex.what() << "\n";
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
  }
  return exit_code::input_error;
}

int cmd_compare(const CompareRequest& req, bool as_json, std::ostream& out, std::ostream& err) {
  auto loaded = load_kb(req.kb_path, exit_code::input_error, exit_code::input_error);
  if (auto* f = std::get_if<KbFailure>(&loaded)) {
    err << f->message << "\n";
    return f->code;
  }
  const auto& kb = std::get<KnowledgeBase>(loaded);
  try {
    check_oracle_cap(kb);
    const auto queries = parse_queries(read_file(req.queries_path), kb);
    const Ensemble e = load_ensemble(req.ensemble_dir, kb);
    if (e.empty()) {
      err << "error: ensemble in '" << req.ensemble_dir.string() << "' has no members\n";
      return exit_code::input_error;
    }
    const ComparisonReport report = compare(e, kb, queries);
    const std::string text = as_json ? report.to_json().dump(2) + "\n" : report.to_text();
    if (req.report_path) write_file_atomic(*req.report_path, text);
    out << text;
    return report.soundness_violations.empty() ? exit_code::ok : exit_code::unsound;
  } catch (const OracleCapExceeded& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::cap_exceeded;
  } catch (const ParseError& ex) {
    err << req.queries_path.string() << ": parse error: " << ex.what() << "\n";
  } catch (const SemanticError& ex) {
    err << req.queries_path.string() << ": error: " << ex.what() << "\n";
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
  }
  return exit_code::input_error;
}

int cmd_score(const ScoreRequest& req, bool as_json, std::ostream& out, std::ostream& err) {
  auto loaded = load_kb(req.kb_path, exit_code::input_error, exit_code::input_error);
  if (auto* f = std::get_if<KbFailure>(&loaded)) {
    err << f->message << "\n";
    return f->code;
  }
  const auto& kb = std::get<KnowledgeBase>(loaded);
  try {
    const VectorModel m = read_model(read_file(req.model_path), kb);
    const SimilarityMatrix sim = load_similarity(req.sim_path, kb);
    const DisparityOptions opts{req.config.eps_sd, req.config.sim_resolution * m.delta()};
    const double score = disparity_score(sim, m, opts);
    const bool preferred = is_preferred(sim, m, req.config.preference_threshold, opts, req.config.preference_mode);
    const auto report = satisfies_kb(m, kb);
    if (as_json) {
      json doc{{"disparity", score},
               {"threshold", std::isinf(req.config.preference_threshold) ? json("inf") : json(req.config.preference_threshold)},
               {"preferred", preferred},
               {"satisfies_kb", report.satisfied},
               {"violations", json::array()}};
      for (const auto& v : report.violations) doc["violations"].push_back(v.description);
      out << doc.dump(2) << "\n";
    } else {
      std::ostringstream s;
      s.precision(17);
      s << "disparity: " << score << "\n";
      out << s.str() << "preferred: " << (preferred ? "yes" : "no") << " (threshold " << fmt(req.config.preference_threshold)
          << ")\n"
          << (report.satisfied ? "SAT" : "UNSAT") << "\n";
      for (const auto& v : report.violations) out << "  violated: " << v.description << "\n";
    }
    return exit_code::ok;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code::input_error;
  }
}

}  // namespace vsm::cli
