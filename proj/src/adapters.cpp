#include "sastbench/adapters.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include "builtin_data.hpp"
#include "sastbench/process.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sastbench {

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

// --- Rule maps ---

RuleMap RuleMap::from_json(const json& doc) {
  RuleMap map;
  try {
    map.tool_pattern = doc.value("tool", std::string{"*"});
    if (map.tool_pattern.empty()) map.tool_pattern = "*";
    const auto entries = doc.value("entries", json::object());
    for (const auto& [rule, cwe] : entries.items()) {
      map.entries[rule] = CweId(cwe.get<int>()).value();
    }
    auto action = doc.value("defaultAction", std::string{"keep-unmapped"});
    if (action == "drop") {
      map.default_action = UnmappedAction::drop;
    } else if (action == "keep-unmapped") {
      map.default_action = UnmappedAction::keep_unmapped;
    } else {
      throw Error(ErrorKind::malformed_config, "unknown defaultAction '" + action + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_config, std::string("malformed rule map: ") + e.what());
  }
  return map;
}

RuleMap RuleMap::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read rule map " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_config, path.string() + ": " + e.what());
  }
}

RuleMap RuleMap::builtin(std::string_view name) {
  if (name == "sonarqube") return from_json(json::parse(detail::kSonarqubeRuleMapJson));
  if (name == "pmd") return from_json(json::parse(detail::kPmdRuleMapJson));
  if (name == "spotbugs") return from_json(json::parse(detail::kSpotbugsRuleMapJson));
  throw Error(ErrorKind::not_found, "no built-in rule map named '" + std::string(name) + "'");
}

RuleMap RuleMap::resolve(const std::string& name_or_path) {
  if (name_or_path == "sonarqube" || name_or_path == "pmd" || name_or_path == "spotbugs") {
    return builtin(name_or_path);
  }
  return load(name_or_path);
}

bool RuleMap::applies_to(std::string_view tool_name) const {
  std::string name(tool_name);
  return ::fnmatch(tool_pattern.c_str(), name.c_str(), FNM_CASEFOLD) == 0;
}

std::optional<CweId> extract_cwe_token(std::string_view text) {
  static const std::regex kToken(R"(CWE-0*([1-9][0-9]{0,6}))", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, kToken)) return CweId(std::stoi(m[1].str()));
  return std::nullopt;
}

std::optional<CweId> map_rule(const ToolId& tool, std::string_view rule_id, const RuleMap& map) {
  if (map.applies_to(tool.name)) {
    auto it = map.entries.find(std::string(rule_id));
    if (it != map.entries.end()) return CweId(it->second);
  }
  return extract_cwe_token(rule_id);
}

// --- Normalized reports ---

void NormalizedReport::canonicalize() {
  std::sort(findings.begin(), findings.end(), canonical_less);
}

std::string finding_to_jsonl_line(const Finding& f) {
  nlohmann::ordered_json j;
  j["tool"] = f.tool.name;
  j["toolVersion"] = f.tool.version;
  j["ruleId"] = f.rule_id;
  if (f.cwe) j["cwe"] = f.cwe->value();
  if (f.weakness_class) j["class"] = *f.weakness_class;
  j["file"] = f.location.file;
  j["line"] = f.location.line;
  if (f.location.end_line) j["endLine"] = *f.location.end_line;
  j["severity"] = to_string(f.severity);
  j["message"] = f.message;
  return j.dump();
}

std::string report_to_jsonl(const NormalizedReport& report) {
  std::string out;
  for (const auto& f : report.findings) {
    out += finding_to_jsonl_line(f);
    out += '\n';
  }
  return out;
}

NormalizedReport report_from_jsonl(std::string_view text, const Taxonomy& taxonomy,
                                   std::string fallback_tool) {
  NormalizedReport report;
  report.tool.name = std::move(fallback_tool);
  report.produced_at = utc_timestamp();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      Finding f;
      f.tool = ToolId{j.at("tool").get<std::string>(), j.value("toolVersion", std::string{})};
      f.rule_id = j.at("ruleId").get<std::string>();
      if (j.contains("cwe") && !j.at("cwe").is_null()) f.cwe = CweId(j.at("cwe").get<int>());
      std::optional<int> end;
      if (j.contains("endLine") && !j.at("endLine").is_null()) end = j.at("endLine").get<int>();
      f.location = SourceLocation::make(j.at("file").get<std::string>(), j.at("line").get<int>(), end);
      auto sev = parse_severity(j.value("severity", std::string{"medium"}));
      if (!sev) throw Error(ErrorKind::malformed_report, "unknown severity");
      f.severity = *sev;
      f.message = j.value("message", std::string{});
      f = with_class(std::move(f), taxonomy);
      validate_finding(f);
      if (!f.cwe) ++report.unmapped_count;
      if (report.findings.empty()) report.tool = f.tool;
      report.findings.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::malformed_report,
                  "JSONL line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  report.diagnostics.kept_unmapped = report.unmapped_count;
  report.canonicalize();
  return report;
}

// --- SARIF ---

namespace {

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

// Maps a SARIF artifact URI onto a path relative to the target root, or
// nullopt when it points outside the target.
std::optional<std::string> relative_uri(std::string_view uri, const fs::path& target_root) {
  std::string path = percent_decode(uri);
  if (path.rfind("file://", 0) == 0) {
    path.erase(0, 7);
    // file://host/path: drop the (usually empty) authority.
    if (!path.empty() && path.front() != '/') {
      auto slash = path.find('/');
      path = slash == std::string::npos ? std::string{} : path.substr(slash);
    }
  }
  fs::path p(path);
  if (p.is_absolute()) {
    if (target_root.empty()) return std::nullopt;
    auto root = fs::absolute(target_root).lexically_normal();
    auto rel = p.lexically_normal().lexically_relative(root);
    if (rel.empty() || *rel.begin() == "..") return std::nullopt;
    path = rel.generic_string();
  }
  try {
    return normalize_relative_path(path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Severity severity_from_level(std::string_view level) {
  if (level == "error") return Severity::high;
  if (level == "note") return Severity::low;
  if (level == "none") return Severity::info;
  return Severity::medium;
}

std::optional<Severity> severity_from_score(const json& props) {
  if (!props.is_object() || !props.contains("security-severity")) return std::nullopt;
  double score = 0;
  const auto& v = props.at("security-severity");
  try {
    score = v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (score >= 9.0) return Severity::critical;
  if (score >= 7.0) return Severity::high;
  if (score >= 4.0) return Severity::medium;
  if (score > 0.0) return Severity::low;
  return Severity::info;
}

std::optional<CweId> cwe_from_tags(const json& props) {
  if (!props.is_object() || !props.contains("tags") || !props.at("tags").is_array()) {
    return std::nullopt;
  }
  for (const auto& tag : props.at("tags")) {
    if (!tag.is_string()) continue;
    if (auto cwe = extract_cwe_token(tag.get<std::string>())) return cwe;
  }
  return std::nullopt;
}

const json* find_rule(const json& run, std::string_view rule_id, const json& result) {
  const json* rules = nullptr;
  if (auto t = run.find("tool"); t != run.end() && t->is_object()) {
    if (auto d = t->find("driver"); d != t->end() && d->is_object()) {
      if (auto r = d->find("rules"); r != d->end() && r->is_array()) rules = &*r;
    }
  }
  if (rules == nullptr) return nullptr;
  if (auto idx = result.find("ruleIndex"); idx != result.end() && idx->is_number_integer()) {
    auto i = idx->get<long long>();
    if (i >= 0 && static_cast<std::size_t>(i) < rules->size()) return &(*rules)[i];
  }
  for (const auto& rule : *rules) {
    if (rule.is_object() && rule.value("id", std::string{}) == rule_id) return &rule;
  }
  return nullptr;
}

std::string string_at(const json& obj, std::string_view key) {
  if (!obj.is_object()) return {};
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

}  // namespace

NormalizedReport parse_sarif(std::string_view document, const RuleMap& rule_map,
                             const fs::path& target_root, const Taxonomy& taxonomy) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_report, std::string("SARIF is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("runs") || !doc.at("runs").is_array() ||
      doc.at("runs").empty()) {
    throw Error(ErrorKind::malformed_report, "SARIF document has no runs");
  }

  NormalizedReport report;
  report.target = target_root.empty() ? std::string{} : target_root.generic_string();
  report.produced_at = utc_timestamp();

  bool first_run = true;
  for (const auto& run : doc.at("runs")) {
    if (!run.is_object()) throw Error(ErrorKind::malformed_report, "SARIF run is not an object");
    ToolId tool;
    const json empty = json::object();
    const json& driver = run.contains("tool") && run.at("tool").is_object() &&
                                 run.at("tool").contains("driver")
                             ? run.at("tool").at("driver")
                             : empty;
    tool.name = string_at(driver, "name");
    if (tool.name.empty()) tool.name = "unknown";
    tool.version = string_at(driver, "version");
    if (tool.version.empty()) tool.version = string_at(driver, "semanticVersion");
    if (first_run) {
      report.tool = tool;
      first_run = false;
    }

    auto results_it = run.find("results");
    if (results_it == run.end() || !results_it->is_array()) continue;
    for (const auto& result : *results_it) {
      if (!result.is_object()) continue;
      std::string rule_id = string_at(result, "ruleId");
      if (rule_id.empty() && result.contains("rule")) rule_id = string_at(result.at("rule"), "id");
      const json* rule = find_rule(run, rule_id, result);
      if (rule_id.empty() && rule != nullptr) rule_id = string_at(*rule, "id");
      if (rule_id.empty()) rule_id = "unknown-rule";

      // Physical location with a start line, else skipped.
      const json* physical = nullptr;
      if (auto locs = result.find("locations"); locs != result.end() && locs->is_array() &&
                                                !locs->empty() && (*locs)[0].is_object()) {
        if (auto pl = (*locs)[0].find("physicalLocation");
            pl != (*locs)[0].end() && pl->is_object()) {
          physical = &*pl;
        }
      }
      if (physical == nullptr || !physical->contains("region") ||
          !physical->at("region").is_object() ||
          !physical->at("region").contains("startLine") ||
          !physical->at("region").at("startLine").is_number_integer() ||
          physical->at("region").at("startLine").get<long long>() < 1) {
        ++report.diagnostics.skipped_no_location;
        continue;
      }
      const auto& region = physical->at("region");
      std::string uri;
      if (physical->contains("artifactLocation")) uri = string_at(physical->at("artifactLocation"), "uri");
      auto rel = uri.empty() ? std::nullopt : relative_uri(uri, target_root);
      if (uri.empty()) {
        ++report.diagnostics.skipped_no_location;
        continue;
      }
      if (!rel) {
        ++report.diagnostics.skipped_outside_target;
        continue;
      }

      Finding f;
      f.tool = tool;
      f.rule_id = rule_id;
      int start = static_cast<int>(region.at("startLine").get<long long>());
      std::optional<int> end;
      if (region.contains("endLine") && region.at("endLine").is_number_integer()) {
        int e = static_cast<int>(region.at("endLine").get<long long>());
        if (e > start) end = e;
      }
      f.location = SourceLocation::make(*rel, start, end);
      if (result.contains("message")) f.message = string_at(result.at("message"), "text");

      std::string level = string_at(result, "level");
      if (level.empty() && rule != nullptr && rule->contains("defaultConfiguration")) {
        level = string_at(rule->at("defaultConfiguration"), "level");
      }
      f.severity = severity_from_level(level.empty() ? "warning" : level);
      if (rule != nullptr && rule->contains("properties")) {
        if (auto s = severity_from_score(rule->at("properties"))) f.severity = *s;
      }
      if (result.contains("properties")) {
        if (auto s = severity_from_score(result.at("properties"))) f.severity = *s;
      }

      f.cwe = map_rule(tool, rule_id, rule_map);
      if (!f.cwe && rule != nullptr && rule->contains("properties")) {
        f.cwe = cwe_from_tags(rule->at("properties"));
      }
      if (!f.cwe && result.contains("properties")) f.cwe = cwe_from_tags(result.at("properties"));

      if (!f.cwe) {
        ++report.unmapped_count;
        if (rule_map.default_action == UnmappedAction::drop) {
          ++report.diagnostics.dropped_unmapped;
          continue;
        }
        ++report.diagnostics.kept_unmapped;
      }
      report.findings.push_back(with_class(std::move(f), taxonomy));
    }
  }
  report.canonicalize();
  return report;
}

// --- Parser registry ---

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, NativeParser, std::less<>> parsers;

  Registry() {
    parsers["jsonl"] = [](std::string_view doc, const RuleMap&, const fs::path& target,
                          const Taxonomy& taxonomy) {
      auto report = report_from_jsonl(doc, taxonomy);
      report.target = target.empty() ? std::string{} : target.generic_string();
      return report;
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

std::string_view native_name(std::string_view format) {
  constexpr std::string_view kPrefix = "native:";
  if (format.substr(0, kPrefix.size()) == kPrefix) return format.substr(kPrefix.size());
  return format;
}

}  // namespace

void register_native_parser(const std::string& name, NativeParser parser) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.parsers[name] = std::move(parser);
}

bool is_known_format(std::string_view format) {
  if (format == "sarif") return true;
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.parsers.find(native_name(format)) != r.parsers.end();
}

NormalizedReport parse_report(std::string_view format, std::string_view document,
                              const RuleMap& rule_map, const fs::path& target_root,
                              const Taxonomy& taxonomy) {
  if (format == "sarif") return parse_sarif(document, rule_map, target_root, taxonomy);
  NativeParser parser;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.parsers.find(native_name(format));
    if (it == r.parsers.end()) {
      throw Error(ErrorKind::malformed_config, "unknown report format '" + std::string(format) + "'");
    }
    parser = it->second;
  }
  return parser(document, rule_map, target_root, taxonomy);
}

NormalizedReport load_report(const fs::path& path, std::string_view format,
                             const RuleMap& rule_map, const fs::path& target_root,
                             const Taxonomy& taxonomy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string fmt(format);
  if (fmt.empty()) fmt = path.extension() == ".jsonl" ? "jsonl" : "sarif";
  auto report = parse_report(fmt, ss.str(), rule_map, target_root, taxonomy);
  if (report.tool.name.empty()) report.tool.name = path.stem().string();
  return report;
}

// --- Analyzer execution ---

AnalyzerSpec AnalyzerSpec::from_json(const json& doc) {
  AnalyzerSpec spec;
  try {
    if (doc.at("tool").is_object()) {
      spec.tool.name = doc.at("tool").at("name").get<std::string>();
      spec.tool.version = doc.at("tool").value("version", std::string{});
    } else {
      spec.tool.name = doc.at("tool").get<std::string>();
      spec.tool.version = doc.value("version", std::string{});
    }
    spec.command = doc.at("command").get<std::vector<std::string>>();
    spec.output_format = doc.value("outputFormat", std::string{"sarif"});
    spec.timeout = std::chrono::seconds(doc.value("timeoutSeconds", 300));
    spec.rule_map = doc.value("ruleMap", std::string{});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_config, std::string("malformed analyzer spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json AnalyzerSpec::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool.name;
  j["version"] = tool.version;
  j["command"] = command;
  j["outputFormat"] = output_format;
  j["timeoutSeconds"] = timeout.count();
  if (!rule_map.empty()) j["ruleMap"] = rule_map;
  return j;
}

void AnalyzerSpec::validate() const {
  if (tool.name.empty()) throw Error(ErrorKind::malformed_config, "analyzer spec without tool name");
  if (command.empty() || command.front().empty()) {
    throw Error(ErrorKind::malformed_config, "analyzer " + tool.name + ": empty command");
  }
  if (timeout.count() <= 0) {
    throw Error(ErrorKind::malformed_config, "analyzer " + tool.name + ": timeout must be > 0");
  }
  if (!is_known_format(output_format)) {
    throw Error(ErrorKind::malformed_config,
                "analyzer " + tool.name + ": unknown output format '" + output_format + "'");
  }
}

std::vector<AnalyzerSpec> load_analyzer_specs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read analyzer config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_config, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::malformed_config, path.string() + ": expected array");
  std::vector<AnalyzerSpec> specs;
  for (const auto& item : doc) specs.push_back(AnalyzerSpec::from_json(item));
  return specs;
}

nlohmann::ordered_json ExecutionRecord::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool.name;
  j["toolVersion"] = tool.version;
  j["argv"] = argv;
  j["exitCode"] = exit_code;
  j["timedOut"] = timed_out;
  j["durationMs"] = duration_ms;
  j["degraded"] = degraded;
  j["outputPath"] = output_path;
  j["startedAt"] = started_at;
  j["stderrTail"] = stderr_tail;
  return j;
}

namespace {

std::string safe_file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_';
  }
  return out.empty() ? "tool" : out;
}

std::string substitute(std::string arg, const std::string& key, const std::string& value) {
  for (auto pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
    arg.replace(pos, key.size(), value);
  }
  return arg;
}

std::mutex& record_log_mutex() {
  static std::mutex mu;
  return mu;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
}

void persist_record(const fs::path& work_dir, const std::string& stem, const ExecutionRecord& rec) {
  write_text(work_dir / (stem + ".execution.json"), rec.to_json().dump(2) + "\n");
  std::string line = rec.to_json().dump() + "\n";
  std::lock_guard lock(record_log_mutex());
  int fd = ::open((work_dir / "executions.jsonl").c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC,
                  0644);
  if (fd < 0) throw Error(ErrorKind::io, "cannot open execution log in " + work_dir.string());
  ssize_t n = ::write(fd, line.data(), line.size());
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size())) {
    throw Error(ErrorKind::io, "short write to execution log in " + work_dir.string());
  }
}

}  // namespace

AnalyzerRun run_analyzer(const AnalyzerSpec& spec, const fs::path& target, const fs::path& work_dir,
                         const Taxonomy& taxonomy) {
  spec.validate();
  if (!fs::is_directory(target)) {
    throw Error(ErrorKind::io, "analyzer target is not a directory: " + target.string());
  }
  fs::create_directories(work_dir);
  const auto stem = safe_file_stem(spec.tool.name);
  const auto output = fs::absolute(work_dir / (stem + ".out"));
  fs::remove(output);

  ExecutionRecord rec;
  rec.tool = spec.tool;
  rec.output_path = output.string();
  rec.started_at = utc_timestamp();
  const auto abs_target = fs::absolute(target).lexically_normal().string();
  for (const auto& arg : spec.command) {
    rec.argv.push_back(substitute(substitute(arg, "{target}", abs_target), "{output}", output.string()));
  }

  ProcessResult proc;
  try {
    proc = run_process(rec.argv, std::chrono::duration_cast<std::chrono::milliseconds>(spec.timeout));
  } catch (const Error& e) {
    rec.exit_code = 127;
    rec.stderr_tail = e.what();
    persist_record(work_dir, stem, rec);
    throw AnalyzerError(ErrorKind::analyzer_failed, e.what(), rec);
  }
  rec.exit_code = proc.exit_code;
  rec.timed_out = proc.timed_out;
  rec.duration_ms = proc.duration.count();
  rec.stderr_tail = proc.stderr_tail.size() > 1024 ? proc.stderr_tail.substr(proc.stderr_tail.size() - 1024)
                                                   : proc.stderr_tail;

  if (proc.timed_out) {
    persist_record(work_dir, stem, rec);
    throw AnalyzerError(ErrorKind::analyzer_timeout,
                        spec.tool.name + " exceeded its " + std::to_string(spec.timeout.count()) +
                            "s timeout",
                        rec);
  }
  const bool have_output = fs::is_regular_file(output);
  if (proc.exit_code != 0 && !have_output) {
    persist_record(work_dir, stem, rec);
    throw AnalyzerError(ErrorKind::analyzer_failed,
                        spec.tool.name + " exited with code " + std::to_string(proc.exit_code) +
                            " and produced no output",
                        rec);
  }
  if (!have_output) {
    persist_record(work_dir, stem, rec);
    throw AnalyzerError(ErrorKind::malformed_report, spec.tool.name + " produced no output file",
                        rec);
  }
  rec.degraded = proc.exit_code != 0;

  std::ifstream in(output, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  RuleMap rule_map = spec.rule_map.empty() ? RuleMap{} : RuleMap::resolve(spec.rule_map);
  NormalizedReport report;
  try {
    report = parse_report(spec.output_format, ss.str(), rule_map, fs::absolute(target), taxonomy);
  } catch (const Error& e) {
    persist_record(work_dir, stem, rec);
    throw AnalyzerError(ErrorKind::malformed_report,
                        spec.tool.name + " output unparseable: " + e.what(), rec);
  }
  report.degraded = rec.degraded;
  if (report.tool.name.empty() || report.tool.name == "unknown") report.tool = spec.tool;

  write_text(work_dir / (stem + ".report.jsonl"), report_to_jsonl(report));
  persist_record(work_dir, stem, rec);
  return AnalyzerRun{std::move(report), std::move(rec)};
}

}  // namespace sastbench
