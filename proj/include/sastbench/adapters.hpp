#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/error.hpp"
#include "sastbench/finding_model.hpp"

namespace sastbench {

enum class UnmappedAction { drop, keep_unmapped };

/// Tool-specific rule id -> CWE table. `tool_pattern` is a case-insensitive
/// glob matched against the analyzer name; "*" applies to every tool.
struct RuleMap {
  std::string tool_pattern = "*";
  std::map<std::string, int> entries;
  UnmappedAction default_action = UnmappedAction::keep_unmapped;

  static RuleMap from_json(const nlohmann::json& doc);
  static RuleMap load(const std::filesystem::path& path);
  /// "sonarqube", "pmd" or "spotbugs"; best-effort defaults.
  static RuleMap builtin(std::string_view name);
  /// Built-in name or path to a rule map file.
  static RuleMap resolve(const std::string& name_or_path);

  bool applies_to(std::string_view tool_name) const;
};

/// Exact lookup first, then a "CWE-<n>" token embedded in the rule id.
std::optional<CweId> map_rule(const ToolId& tool, std::string_view rule_id, const RuleMap& map);

/// First "CWE-<n>" token in free text (case-insensitive), if any.
std::optional<CweId> extract_cwe_token(std::string_view text);

struct ReportDiagnostics {
  std::size_t skipped_no_location = 0;
  std::size_t skipped_outside_target = 0;
  std::size_t dropped_unmapped = 0;
  std::size_t kept_unmapped = 0;

  bool operator==(const ReportDiagnostics&) const = default;
};

struct NormalizedReport {
  ToolId tool;
  std::string target;  // corpus root or submission id; empty matches any
  std::vector<Finding> findings;
  std::size_t unmapped_count = 0;  // dropped + kept without a CWE
  std::string produced_at;
  bool degraded = false;  // analyzer exited nonzero but produced output
  ReportDiagnostics diagnostics;

  /// Sorts findings into canonical order.
  void canonicalize();
};

/// Parses a SARIF 2.1.0 document. Results without a physical location are
/// skipped and counted; unknown fields are ignored.
NormalizedReport parse_sarif(std::string_view document, const RuleMap& rule_map,
                             const std::filesystem::path& target_root,
                             const Taxonomy& taxonomy = Taxonomy::builtin("default"));

/// One finding per line with a fixed field order.
std::string finding_to_jsonl_line(const Finding& finding);
std::string report_to_jsonl(const NormalizedReport& report);

/// Reads the JSONL form back. Class labels are re-derived from `taxonomy`.
/// `fallback_tool` names the report when the body has no lines.
NormalizedReport report_from_jsonl(std::string_view text, const Taxonomy& taxonomy,
                                   std::string fallback_tool = {});

using NativeParser = std::function<NormalizedReport(
    std::string_view document, const RuleMap& rule_map,
    const std::filesystem::path& target_root, const Taxonomy& taxonomy)>;

/// Plug-in point for tool-native formats; "jsonl" is registered by default.
void register_native_parser(const std::string& name, NativeParser parser);
bool is_known_format(std::string_view format);
/// `format` is "sarif", "native:<name>" or a bare native parser name.
NormalizedReport parse_report(std::string_view format, std::string_view document,
                              const RuleMap& rule_map, const std::filesystem::path& target_root,
                              const Taxonomy& taxonomy = Taxonomy::builtin("default"));

/// Loads a report file, picking the parser from the extension when `format`
/// is empty (".jsonl" -> jsonl, anything else -> sarif).
NormalizedReport load_report(const std::filesystem::path& path, std::string_view format,
                             const RuleMap& rule_map, const std::filesystem::path& target_root,
                             const Taxonomy& taxonomy = Taxonomy::builtin("default"));

struct AnalyzerSpec {
  ToolId tool;
  std::vector<std::string> command;  // may contain {target} and {output}
  std::string output_format = "sarif";
  std::chrono::seconds timeout{300};
  std::string rule_map;  // built-in name or path; empty for none

  static AnalyzerSpec from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

std::vector<AnalyzerSpec> load_analyzer_specs(const std::filesystem::path& path);

struct ExecutionRecord {
  ToolId tool;
  std::vector<std::string> argv;
  int exit_code = 0;
  bool timed_out = false;
  long long duration_ms = 0;
  std::string stderr_tail;
  std::string output_path;
  bool degraded = false;
  std::string started_at;

  nlohmann::ordered_json to_json() const;
};

struct AnalyzerRun {
  NormalizedReport report;
  ExecutionRecord record;
};

/// Raised by run_analyzer; carries the execution record of the failed run.
class AnalyzerError : public Error {
 public:
  AnalyzerError(ErrorKind kind, const std::string& message, ExecutionRecord record)
      : Error(kind, message), record_(std::move(record)) {}

  const ExecutionRecord& record() const noexcept { return record_; }

 private:
  ExecutionRecord record_;
};

/// Runs an analyzer against `target`, writing its raw output, the normalized
/// JSONL and the execution record under `work_dir`.
AnalyzerRun run_analyzer(const AnalyzerSpec& spec, const std::filesystem::path& target,
                         const std::filesystem::path& work_dir,
                         const Taxonomy& taxonomy = Taxonomy::builtin("default"));

std::string utc_timestamp();

}  // namespace sastbench
