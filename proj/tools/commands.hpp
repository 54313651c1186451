// Subcommands behind the `vsm` executable. Each returns the process exit
// code and writes human text (or JSON with `json`) to `out`, errors to `err`.
//
//   validate  0 ok, 1 parse/arity error, 2 semantic error
//   solve     0 full ensemble, 3 partial, 1/2 bad KB, 2 bad config or I/O
//   query     0 TRUE, 1 FALSE, 4 UNKNOWN, 2 bad input
//             binding queries: 0 when some term binds, 1 when none does
//   compare   0 done, 5 soundness violation, 6 oracle cap exceeded, 2 bad input
//   score     0 done, 2 missing or bad input

#ifndef VSM_TOOLS_COMMANDS_HPP
#define VSM_TOOLS_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "vsm/ensemble.hpp"
#include "vsm/logic.hpp"
#include "vsm/solver.hpp"

namespace vsm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse_error = 1;
inline constexpr int semantic_error = 2;
inline constexpr int input_error = 2;
inline constexpr int partial = 3;
inline constexpr int query_false = 1;
inline constexpr int unknown = 4;
inline constexpr int unsound = 5;
inline constexpr int cap_exceeded = 6;
}  // namespace exit_code

struct SolveRequest {
  std::filesystem::path kb_path;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> sim_path;
  std::optional<std::filesystem::path> config_path;
  SolveConfig config;
};

struct QueryRequest {
  std::filesystem::path ensemble_dir;
  std::filesystem::path kb_path;
  std::string query;  // a query name from the KB, or formula text
  bool explain = false;
};

struct CompareRequest {
  std::filesystem::path ensemble_dir;
  std::filesystem::path kb_path;
  std::filesystem::path queries_path;
  std::optional<std::filesystem::path> report_path;
};

struct ScoreRequest {
  std::filesystem::path model_path;
  std::filesystem::path kb_path;
  std::optional<std::filesystem::path> sim_path;
  SolveConfig config;  // threshold, resolution, eps
};

int cmd_validate(const std::filesystem::path& kb_path, bool json, std::ostream& out, std::ostream& err);
int cmd_solve(const SolveRequest& req, bool json, std::ostream& out, std::ostream& err);
int cmd_query(const QueryRequest& req, bool json, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareRequest& req, bool json, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreRequest& req, bool json, std::ostream& out, std::ostream& err);

/// Whole-file read; throws std::runtime_error when the file is missing.
std::string read_file(const std::filesystem::path& p);
/// Writes to a sibling temp file, then renames over `p`.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

/// Loads ensemble.json and its model files from a solve output directory.
Ensemble load_ensemble(const std::filesystem::path& dir, const KnowledgeBase& kb);

}  // namespace vsm::cli

#endif  // VSM_TOOLS_COMMANDS_HPP
