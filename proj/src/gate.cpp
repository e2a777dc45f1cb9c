#include "sastbench/gate.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "sastbench/archive.hpp"
#include "sastbench/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace sastbench {

// --- State machine ---

std::string_view to_string(SubmissionState state) {
  switch (state) {
    case SubmissionState::submitted: return "Submitted";
    case SubmissionState::scanning: return "Scanning";
    case SubmissionState::awaiting_review: return "AwaitingReview";
    case SubmissionState::published: return "Published";
    case SubmissionState::rejected: return "Rejected";
    case SubmissionState::failed: return "Failed";
  }
  return "Failed";
}

std::optional<SubmissionState> parse_submission_state(std::string_view text) {
  for (auto s : {SubmissionState::submitted, SubmissionState::scanning,
                 SubmissionState::awaiting_review, SubmissionState::published,
                 SubmissionState::rejected, SubmissionState::failed}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<SubmissionState> next_state(SubmissionState from, GateEvent event) {
  using S = SubmissionState;
  switch (event) {
    case GateEvent::start_scan:
      return from == S::submitted ? std::optional(S::scanning) : std::nullopt;
    case GateEvent::scan_succeeded:
      return from == S::scanning ? std::optional(S::awaiting_review) : std::nullopt;
    case GateEvent::scan_failed:
      return from == S::scanning ? std::optional(S::failed) : std::nullopt;
    case GateEvent::decide_pass:
      return from == S::awaiting_review ? std::optional(S::published) : std::nullopt;
    case GateEvent::decide_fail:
      return from == S::awaiting_review ? std::optional(S::rejected) : std::nullopt;
  }
  return std::nullopt;
}

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string iso_from_ms(std::int64_t ms) {
  std::time_t t = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
  return out;
}

std::string random_hex(std::size_t n) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += kHex[rng() & 0xf];
  return out;
}

std::string_view event_name(GateEvent e) {
  switch (e) {
    case GateEvent::start_scan: return "scan-started";
    case GateEvent::scan_succeeded: return "scan-completed";
    case GateEvent::scan_failed: return "scan-failed";
    case GateEvent::decide_pass:
    case GateEvent::decide_fail: return "decided";
  }
  return "";
}

}  // namespace

nlohmann::ordered_json Submission::to_json() const {
  ordered_json j;
  j["id"] = id;
  j["submitter"] = submitter;
  j["state"] = to_string(state);
  j["contentAddress"] = content_address;
  j["artifactPath"] = artifact_path;
  j["createdAt"] = iso_from_ms(created_ms);
  j["updatedAt"] = iso_from_ms(updated_ms);
  return j;
}

// --- Decisions ---

std::string_view to_string(Verdict v) { return v == Verdict::pass ? "pass" : "fail"; }

std::string_view to_string(TriageMark m) {
  switch (m) {
    case TriageMark::confirmed: return "confirmed";
    case TriageMark::false_positive: return "false-positive";
    case TriageMark::wont_fix: return "wont-fix";
  }
  return "confirmed";
}

Decision Decision::from_json(const json& doc, std::string submission_id) {
  auto bad = [](const std::string& why) { return Error(ErrorKind::invalid_decision, why); };
  if (!doc.is_object()) throw bad("decision must be a JSON object");
  Decision d;
  d.submission_id = std::move(submission_id);
  if (!doc.contains("moderator") || !doc.at("moderator").is_string()) throw bad("moderator is required");
  d.moderator = doc.at("moderator").get<std::string>();
  if (!doc.contains("verdict") || !doc.at("verdict").is_string()) throw bad("verdict is required");
  auto verdict = doc.at("verdict").get<std::string>();
  if (verdict == "pass") {
    d.verdict = Verdict::pass;
  } else if (verdict == "fail") {
    d.verdict = Verdict::fail;
  } else {
    throw bad("verdict must be 'pass' or 'fail'");
  }
  if (doc.contains("rationale") && doc.at("rationale").is_string()) {
    d.rationale = doc.at("rationale").get<std::string>();
  }
  if (doc.contains("triage")) {
    if (!doc.at("triage").is_object()) throw bad("triage must be an object");
    for (const auto& [key, mark] : doc.at("triage").items()) {
      auto m = mark.is_string() ? mark.get<std::string>() : std::string{};
      if (m == "confirmed") d.triage[key] = TriageMark::confirmed;
      else if (m == "false-positive") d.triage[key] = TriageMark::false_positive;
      else if (m == "wont-fix") d.triage[key] = TriageMark::wont_fix;
      else throw bad("unknown triage mark '" + m + "' for " + key);
    }
  }
  if (doc.contains("decidedAt") && doc.at("decidedAt").is_number_integer()) {
    d.decided_ms = doc.at("decidedAt").get<std::int64_t>();
  }
  return d;
}

nlohmann::ordered_json Decision::to_json() const {
  ordered_json j;
  j["submissionId"] = submission_id;
  j["moderator"] = moderator;
  j["verdict"] = to_string(verdict);
  j["rationale"] = rationale;
  j["triage"] = ordered_json::object();
  for (const auto& [k, m] : triage) j["triage"][k] = to_string(m);
  j["decidedAt"] = decided_ms;
  return j;
}

// --- Assessment reports ---

std::size_t AssessmentReport::finding_count() const {
  std::size_t n = 0;
  for (const auto& [label, findings] : groups) n += findings.size();
  return n;
}

std::map<std::string, std::size_t> AssessmentReport::per_class_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [label, findings] : groups) out[label] = findings.size();
  return out;
}

nlohmann::ordered_json AssessmentReport::to_json() const {
  ordered_json j;
  j["submissionId"] = submission_id;
  j["members"] = ordered_json::array();
  for (const auto& m : members) {
    ordered_json t;
    t["name"] = m.name;
    t["version"] = m.version;
    j["members"].push_back(std::move(t));
  }
  j["findingCount"] = finding_count();
  j["highestSeverity"] = highest_severity ? ordered_json(to_string(*highest_severity)) : ordered_json(nullptr);
  j["perClassCounts"] = ordered_json::object();
  for (const auto& [label, findings] : groups) j["perClassCounts"][label] = findings.size();
  j["perToolCounts"] = per_tool_counts;
  j["agreement"] = agreement;
  j["groups"] = ordered_json::array();
  for (const auto& [label, findings] : groups) {
    ordered_json g;
    g["class"] = label;
    g["findings"] = ordered_json::array();
    for (const auto& rf : findings) {
      auto f = ordered_json::parse(finding_to_jsonl_line(rf.finding));
      f["key"] = rf.key;
      f["tools"] = rf.tools;
      f["agreement"] = rf.tools.size();
      g["findings"].push_back(std::move(f));
    }
    j["groups"].push_back(std::move(g));
  }
  j["failures"] = ordered_json::array();
  for (const auto& fl : failures) {
    ordered_json f;
    f["tool"] = fl.tool;
    f["kind"] = fl.kind;
    f["message"] = fl.message;
    j["failures"].push_back(std::move(f));
  }
  j["runs"] = ordered_json::array();
  for (const auto& [tool, key] : runs) {
    ordered_json r;
    r["tool"] = tool;
    r["runKey"] = key;
    j["runs"].push_back(std::move(r));
  }
  j["generatedAt"] = generated_at;
  j["digest"] = digest;
  return j;
}

AssessmentReport AssessmentReport::from_json(const json& doc) {
  AssessmentReport r;
  try {
    r.submission_id = doc.at("submissionId").get<std::string>();
    for (const auto& m : doc.at("members")) {
      r.members.push_back(ToolId{m.at("name").get<std::string>(), m.value("version", std::string{})});
    }
    if (doc.contains("highestSeverity") && doc.at("highestSeverity").is_string()) {
      r.highest_severity = parse_severity(doc.at("highestSeverity").get<std::string>());
    }
    r.per_tool_counts = doc.at("perToolCounts").get<std::map<std::string, std::size_t>>();
    r.agreement = doc.at("agreement").get<std::map<std::string, std::size_t>>();
    const auto& taxonomy = Taxonomy::builtin("default");
    for (const auto& g : doc.at("groups")) {
      std::vector<ReportFinding> findings;
      for (const auto& f : g.at("findings")) {
        auto parsed = report_from_jsonl(f.dump(), taxonomy);
        if (parsed.findings.size() != 1) throw Error(ErrorKind::malformed_report, "bad finding");
        ReportFinding rf;
        rf.finding = parsed.findings.front();
        // Keep the persisted class label rather than re-deriving it.
        rf.finding.weakness_class.reset();
        if (f.contains("class")) rf.finding.weakness_class = f.at("class").get<std::string>();
        rf.key = f.at("key").get<std::string>();
        rf.tools = f.at("tools").get<std::vector<std::string>>();
        findings.push_back(std::move(rf));
      }
      r.groups.emplace_back(g.at("class").get<std::string>(), std::move(findings));
    }
    for (const auto& f : doc.value("failures", json::array())) {
      r.failures.push_back({f.at("tool").get<std::string>(), f.at("kind").get<std::string>(),
                            f.at("message").get<std::string>()});
    }
    for (const auto& run : doc.value("runs", json::array())) {
      r.runs.emplace_back(run.at("tool").get<std::string>(), run.at("runKey").get<std::string>());
    }
    r.generated_at = doc.value("generatedAt", std::string{});
    r.digest = doc.value("digest", std::string{});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_report, std::string("malformed assessment report: ") + e.what());
  }
  return r;
}

std::string AssessmentReport::compute_digest() const {
  auto j = to_json();
  j.erase("generatedAt");
  j.erase("digest");
  return sha256_hex(j.dump());
}

// --- Configuration ---

GateConfig GateConfig::from_json(const json& doc, const fs::path& base_dir) {
  GateConfig cfg;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    if (doc.contains("analyzers")) {
      for (const auto& a : doc.at("analyzers")) cfg.analyzers.push_back(AnalyzerSpec::from_json(a));
    }
    if (doc.contains("analyzersFile")) {
      auto more = load_analyzer_specs(resolve(doc.at("analyzersFile").get<std::string>()));
      cfg.analyzers.insert(cfg.analyzers.end(), more.begin(), more.end());
    }
    cfg.size_cap_bytes = doc.value("sizeCapBytes", cfg.size_cap_bytes);
    if (doc.contains("storageRoot")) cfg.storage_root = resolve(doc.at("storageRoot").get<std::string>());
    cfg.port = doc.value("port", cfg.port);
    cfg.host = doc.value("host", cfg.host);
    cfg.moderator_token = doc.value("moderatorToken", std::string{});
    cfg.taxonomy = doc.value("taxonomy", cfg.taxonomy);
    if (doc.contains("dedup")) {
      const auto& d = doc.at("dedup");
      DedupPolicy policy;
      policy.key_fields.clear();
      for (const auto& f : d.at("keyFields")) {
        auto name = f.get<std::string>();
        if (name == "tool") policy.key_fields.insert(KeyField::tool);
        else if (name == "ruleId") policy.key_fields.insert(KeyField::rule_id);
        else if (name == "cwe") policy.key_fields.insert(KeyField::cwe);
        else if (name == "weaknessClass") policy.key_fields.insert(KeyField::weakness_class);
        else if (name == "file") policy.key_fields.insert(KeyField::file);
        else if (name == "line") policy.key_fields.insert(KeyField::line);
        else throw Error(ErrorKind::malformed_config, "unknown dedup key field '" + name + "'");
      }
      policy.line_tolerance = d.value("lineTolerance", 0);
      cfg.policy = policy;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_config, std::string("malformed gate config: ") + e.what());
  }
  return cfg;
}

GateConfig GateConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read gate config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_config, path.string() + ": " + e.what());
  }
  auto cfg = from_json(doc, fs::absolute(path).parent_path());
  if (const char* port = std::getenv("SASTGATE_PORT"); port && *port) {
    try {
      cfg.port = std::stoi(port);
    } catch (const std::exception&) {
      throw Error(ErrorKind::malformed_config, std::string("SASTGATE_PORT is not a number: ") + port);
    }
  }
  if (const char* root = std::getenv("SASTGATE_STORAGE"); root && *root) cfg.storage_root = root;
  return cfg;
}

void GateConfig::validate() const {
  if (analyzers.empty()) throw Error(ErrorKind::malformed_config, "gate config lists no analyzers");
  std::set<std::string> names;
  for (const auto& a : analyzers) {
    a.validate();
    if (!names.insert(a.tool.name).second) {
      throw Error(ErrorKind::malformed_config, "duplicate analyzer " + a.tool.name);
    }
  }
  if (size_cap_bytes == 0) throw Error(ErrorKind::malformed_config, "sizeCapBytes must be > 0");
  if (port < 0 || port > 65535) throw Error(ErrorKind::malformed_config, "port out of range");
  if (storage_root.empty()) throw Error(ErrorKind::malformed_config, "storageRoot is required");
  Taxonomy::resolve(taxonomy);
  policy.validate();
}

// --- Directory storage ---

DirectoryStorage::DirectoryStorage(fs::path root) : root_(fs::absolute(std::move(root))) {
  fs::create_directories(root_ / "archives");
  fs::create_directories(root_ / "submissions");
  fs::create_directories(root_ / "runs");
  fs::create_directories(root_ / "workspaces");
}

void DirectoryStorage::append_event(const json& event) {
  std::string line = event.dump() + "\n";
  std::lock_guard lock(log_mu_);
  int fd = ::open((root_ / "events.jsonl").c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorKind::io, "cannot open event log under " + root_.string());
  // One write per record keeps each line whole under O_APPEND.
  ssize_t n = ::write(fd, line.data(), line.size());
  int sync_rc = ::fdatasync(fd);
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size()) || sync_rc != 0) {
    throw Error(ErrorKind::io, "failed to append to event log under " + root_.string());
  }
}

std::vector<json> DirectoryStorage::read_events() const {
  std::lock_guard lock(log_mu_);
  std::vector<json> events;
  std::ifstream in(root_ / "events.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      events.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      // A torn final record from a crash mid-append is ignored.
      if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::io, "corrupt event log record under " + root_.string());
      }
    }
  }
  return events;
}

fs::path DirectoryStorage::put_archive(std::string_view bytes, const std::string& digest) {
  auto path = root_ / "archives" / (digest + ".bin");
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return path;
}

std::string DirectoryStorage::read_file(const fs::path& path) const {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::not_found, "missing stored file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void DirectoryStorage::write_file_atomic(const fs::path& path, std::string_view data) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp-" + random_hex(8);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// --- Gate ---

Gate::Gate(GateConfig config, std::shared_ptr<GateStorage> storage)
    : config_(std::move(config)),
      storage_(std::move(storage)),
      taxonomy_(Taxonomy::resolve(config_.taxonomy)) {
  replay();
}

Gate::Gate(GateConfig config)
    : Gate(config, std::make_shared<DirectoryStorage>(config.storage_root)) {}

void Gate::replay() {
  for (const auto& ev : storage_->read_events()) {
    const auto type = ev.at("type").get<std::string>();
    const auto id = ev.at("id").get<std::string>();
    const auto at = ev.at("at").get<std::int64_t>();
    seq_ = std::max<std::uint64_t>(seq_, ev.value("seq", std::uint64_t{0}));
    if (type == "submitted") {
      Record rec;
      rec.submission.id = id;
      rec.submission.submitter = ev.at("submitter").get<std::string>();
      rec.submission.artifact_path = ev.at("artifactPath").get<std::string>();
      rec.submission.content_address = ev.at("contentAddress").get<std::string>();
      rec.submission.state = SubmissionState::submitted;
      rec.submission.created_ms = rec.submission.updated_ms = at;
      records_[id] = std::move(rec);
      continue;
    }
    auto it = records_.find(id);
    if (it == records_.end()) continue;
    auto& rec = it->second;
    rec.submission.updated_ms = std::max(rec.submission.updated_ms, at);
    if (type == "scan-started") {
      rec.submission.state = SubmissionState::scanning;
    } else if (type == "scan-completed") {
      rec.submission.state = SubmissionState::awaiting_review;
      rec.report_digest = ev.value("reportDigest", std::string{});
    } else if (type == "scan-failed") {
      rec.submission.state = SubmissionState::failed;
    } else if (type == "decided") {
      rec.decision = Decision::from_json(ev.at("decision"), id);
      rec.submission.state = rec.decision->verdict == Verdict::pass ? SubmissionState::published
                                                                    : SubmissionState::rejected;
    }
  }
}

std::shared_ptr<std::mutex> Gate::lock_for(const std::string& id) const {
  std::lock_guard lock(table_mu_);
  auto& mu = locks_[id];
  if (!mu) mu = std::make_shared<std::mutex>();
  return mu;
}

Gate::Record& Gate::record(const std::string& id) {
  std::lock_guard lock(table_mu_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorKind::not_found, "unknown submission " + id);
  return it->second;
}

const Gate::Record& Gate::record(const std::string& id) const {
  std::lock_guard lock(table_mu_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorKind::not_found, "unknown submission " + id);
  return it->second;
}

std::int64_t Gate::advance_clock(const Submission& s) const {
  return std::max(now_ms(), s.updated_ms);
}

void Gate::transition(Record& rec, GateEvent event, json payload) {
  auto& s = rec.submission;
  auto next = next_state(s.state, event);
  if (!next) {
    throw Error(ErrorKind::invalid_transition, "submission " + s.id + " is " +
                                                   std::string(to_string(s.state)) + "; cannot " +
                                                   std::string(event_name(event)));
  }
  const auto at = advance_clock(s);
  payload["seq"] = ++seq_;
  payload["at"] = at;
  payload["type"] = event_name(event);
  payload["id"] = s.id;
  payload["from"] = to_string(s.state);
  payload["to"] = to_string(*next);
  storage_->append_event(payload);  // commit point
  s.state = *next;
  s.updated_ms = at;
}

fs::path Gate::submission_dir(const std::string& id) const {
  return storage_->root() / "submissions" / id;
}

Submission Gate::submit(std::string_view archive, const std::string& submitter) {
  if (archive.empty()) throw Error(ErrorKind::rejected_input, "empty archive");
  if (archive.size() > config_.size_cap_bytes) {
    throw Error(ErrorKind::too_large, "archive of " + std::to_string(archive.size()) +
                                          " bytes exceeds the cap of " +
                                          std::to_string(config_.size_cap_bytes));
  }
  auto entries = read_archive(archive, std::max<std::uint64_t>(config_.size_cap_bytes * 16, 64ull << 20));
  if (entries.empty()) throw Error(ErrorKind::rejected_input, "archive contains no files");

  const auto digest = sha256_hex(archive);
  const auto path = storage_->put_archive(archive, digest);

  Record rec;
  rec.submission.id = "sub-" + random_hex(16);
  rec.submission.submitter = submitter.empty() ? "anonymous" : submitter;
  rec.submission.artifact_path = path.string();
  rec.submission.content_address = digest;
  rec.submission.state = SubmissionState::submitted;
  rec.submission.created_ms = rec.submission.updated_ms = now_ms();

  json ev;
  ev["seq"] = ++seq_;
  ev["at"] = rec.submission.created_ms;
  ev["type"] = "submitted";
  ev["id"] = rec.submission.id;
  ev["submitter"] = rec.submission.submitter;
  ev["artifactPath"] = rec.submission.artifact_path;
  ev["contentAddress"] = digest;
  ev["format"] = to_string(*detect_archive_format(archive));
  storage_->append_event(ev);

  std::lock_guard lock(table_mu_);
  auto [it, inserted] = records_.emplace(rec.submission.id, rec);
  return it->second.submission;
}

Submission Gate::begin_assess(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  auto& rec = record(id);
  if (rec.in_flight) {
    throw Error(ErrorKind::invalid_transition, "submission " + id + " is already being scanned");
  }
  if (rec.submission.state == SubmissionState::submitted) {
    transition(rec, GateEvent::start_scan, json::object());
  } else if (rec.submission.state != SubmissionState::scanning) {
    // Scanning without a live worker is a crashed scan and may be resumed.
    throw Error(ErrorKind::invalid_transition, "submission " + id + " is " +
                                                   std::string(to_string(rec.submission.state)) +
                                                   "; cannot assess");
  }
  rec.in_flight = true;
  return rec.submission;
}

fs::path Gate::ensure_workspace(const Submission& s) {
  std::lock_guard lock(workspace_mu_);
  auto dir = storage_->root() / "workspaces" / s.content_address;
  if (fs::is_directory(dir)) return dir;
  auto tmp = dir;
  tmp += ".tmp-" + random_hex(8);
  extract_archive(storage_->read_file(s.artifact_path), tmp,
                  std::max<std::uint64_t>(config_.size_cap_bytes * 16, 64ull << 20));
  fs::rename(tmp, dir);
  return dir;
}

std::string Gate::run_key(const Submission& s, const AnalyzerSpec& spec) const {
  return sha256_hex(s.content_address + "\n" + spec.to_json().dump() + "\n" + taxonomy_.name());
}

namespace {

struct ToolOutcome {
  std::optional<NormalizedReport> report;
  std::optional<AnalyzerFailure> failure;
  std::string run_key;
};

}  // namespace

AssessOutcome Gate::finish_assess(const std::string& id) {
  auto mu = lock_for(id);
  Submission sub;
  {
    std::lock_guard lock(*mu);
    sub = record(id).submission;
  }
  struct InFlightReset {
    Gate* gate;
    std::string id;
    std::shared_ptr<std::mutex> mu;
    ~InFlightReset() {
      std::lock_guard lock(*mu);
      gate->record(id).in_flight = false;
    }
  } reset{this, id, mu};

  const auto workspace = ensure_workspace(sub);

  std::vector<std::future<ToolOutcome>> jobs;
  for (const auto& spec : config_.analyzers) {
    jobs.push_back(std::async(std::launch::async, [&, spec]() {
      ToolOutcome out;
      out.run_key = run_key(sub, spec);
      const auto run_dir = storage_->root() / "runs" / out.run_key;
      try {
        if (fs::is_regular_file(run_dir / "report.jsonl")) {
          // Content-addressed: the same analyzer already ran on these bytes.
          auto report = report_from_jsonl(storage_->read_file(run_dir / "report.jsonl"), taxonomy_,
                                          spec.tool.name);
          report.tool = spec.tool;
          report.target = workspace.generic_string();
          out.report = std::move(report);
          return out;
        }
        auto tmp = run_dir;
        tmp += ".tmp-" + random_hex(8);
        auto run = run_analyzer(spec, workspace, tmp, taxonomy_);
        run.report.tool = spec.tool;
        storage_->write_file_atomic(tmp / "report.jsonl", report_to_jsonl(run.report));
        std::error_code ec;
        fs::rename(tmp, run_dir, ec);
        if (ec) fs::remove_all(tmp);  // a concurrent identical run won the race
        out.report = std::move(run.report);
      } catch (const Error& e) {
        out.failure = AnalyzerFailure{spec.tool.name, std::string(to_string(e.kind())), e.what()};
      } catch (const std::exception& e) {
        out.failure = AnalyzerFailure{spec.tool.name, "analyzer-failed", e.what()};
      }
      return out;
    }));
  }

  AssessOutcome outcome;
  std::vector<NormalizedReport> reports;
  std::vector<std::pair<std::string, std::string>> runs;
  std::map<std::string, std::size_t> per_tool;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto result = jobs[i].get();
    if (result.failure) {
      outcome.failures.push_back(*result.failure);
      continue;
    }
    per_tool[result.report->tool.name] = result.report->findings.size();
    runs.emplace_back(result.report->tool.name, result.run_key);
    reports.push_back(std::move(*result.report));
  }

  if (fault_hook_) fault_hook_("after-analyzers");

  std::lock_guard lock(*mu);
  auto& rec = record(id);
  if (reports.empty()) {
    json payload;
    payload["failures"] = json::array();
    for (const auto& f : outcome.failures) {
      payload["failures"].push_back({{"tool", f.tool}, {"kind", f.kind}, {"message", f.message}});
    }
    transition(rec, GateEvent::scan_failed, payload);
    outcome.submission = rec.submission;
    return outcome;
  }

  auto ens = merge(reports, config_.policy);
  AssessmentReport report;
  report.submission_id = id;
  report.members = ens.members;
  report.per_tool_counts = per_tool;
  report.failures = outcome.failures;
  report.runs = runs;
  std::map<std::string, std::vector<ReportFinding>> by_class;
  for (const auto& f : ens.merged.findings) {
    auto key = dedup_key(f, config_.policy);
    ReportFinding rf;
    rf.finding = f;
    rf.key = key.value;
    for (const auto& t : ens.attribution.at(key)) rf.tools.push_back(t.name);
    report.agreement[rf.key] = rf.tools.size();
    if (!report.highest_severity || f.severity > *report.highest_severity) {
      report.highest_severity = f.severity;
    }
    by_class[f.weakness_class.value_or(std::string(kUnclassified))].push_back(std::move(rf));
  }
  for (const auto& cls : taxonomy_.classes()) {
    if (auto it = by_class.find(cls.label); it != by_class.end()) {
      report.groups.emplace_back(cls.label, std::move(it->second));
    }
  }
  if (auto it = by_class.find(std::string(kUnclassified)); it != by_class.end()) {
    report.groups.emplace_back(std::string(kUnclassified), std::move(it->second));
  }
  report.digest = report.compute_digest();
  report.generated_at = utc_timestamp();

  const auto report_path = submission_dir(id) / "report.json";
  bool keep_existing = false;
  if (fs::is_regular_file(report_path)) {
    try {
      auto existing = json::parse(storage_->read_file(report_path));
      keep_existing = existing.value("digest", std::string{}) == report.digest;
      if (keep_existing) report = AssessmentReport::from_json(existing);
    } catch (const std::exception&) {
      keep_existing = false;
    }
  }
  if (!keep_existing) storage_->write_file_atomic(report_path, report.to_json().dump(2) + "\n");

  if (fault_hook_) fault_hook_("before-complete");

  transition(rec, GateEvent::scan_succeeded, json{{"reportDigest", report.digest}});
  rec.report_digest = report.digest;
  outcome.submission = rec.submission;
  outcome.report = std::move(report);
  return outcome;
}

AssessOutcome Gate::assess(const std::string& id) {
  begin_assess(id);
  return finish_assess(id);
}

Submission Gate::decide(const std::string& id, Decision decision) {
  auto trimmed = [](const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
  };
  if (trimmed(decision.rationale)) {
    throw Error(ErrorKind::invalid_decision, "a decision needs a non-empty rationale");
  }
  if (trimmed(decision.moderator)) {
    throw Error(ErrorKind::invalid_decision, "a decision needs a moderator");
  }
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  auto& rec = record(id);
  if (rec.decision) {
    throw Error(ErrorKind::already_decided,
                "submission " + id + " was already decided: " +
                    std::string(to_string(rec.decision->verdict)));
  }
  if (rec.submission.state != SubmissionState::awaiting_review) {
    throw Error(ErrorKind::invalid_transition, "submission " + id + " is " +
                                                   std::string(to_string(rec.submission.state)) +
                                                   "; cannot decide");
  }
  decision.submission_id = id;
  decision.decided_ms = advance_clock(rec.submission);
  storage_->write_file_atomic(submission_dir(id) / "decision.json",
                              decision.to_json().dump(2) + "\n");
  auto event = decision.verdict == Verdict::pass ? GateEvent::decide_pass : GateEvent::decide_fail;
  transition(rec, event, json{{"decision", json::parse(decision.to_json().dump())}});
  rec.decision = std::move(decision);
  return rec.submission;
}

Submission Gate::get(const std::string& id) const {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  return record(id).submission;
}

std::vector<Submission> Gate::list(std::optional<SubmissionState> state) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(table_mu_);
    for (const auto& [id, rec] : records_) ids.push_back(id);
  }
  std::vector<Submission> out;
  for (const auto& id : ids) {
    auto s = get(id);
    if (!state || s.state == *state) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Submission& a, const Submission& b) {
    return std::tie(a.created_ms, a.id) < std::tie(b.created_ms, b.id);
  });
  return out;
}

std::vector<QueueEntry> Gate::queue(std::optional<SubmissionState> state) const {
  std::vector<QueueEntry> out;
  for (auto& s : list(state)) {
    QueueEntry entry;
    entry.submission = s;
    const bool has_report = s.state == SubmissionState::awaiting_review ||
                            s.state == SubmissionState::published ||
                            s.state == SubmissionState::rejected;
    if (has_report) {
      try {
        auto report = get_report(s.id);
        entry.finding_count = report.finding_count();
        entry.per_class_counts = report.per_class_counts();
        entry.highest_severity = report.highest_severity;
      } catch (const Error&) {
        // Listing stays available even if one report is unreadable.
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string Gate::get_report_json(const std::string& id) const {
  auto s = get(id);
  switch (s.state) {
    case SubmissionState::submitted:
    case SubmissionState::scanning:
      throw Error(ErrorKind::not_ready, "submission " + id + " has not been assessed yet");
    case SubmissionState::failed:
      throw Error(ErrorKind::not_found, "submission " + id + " failed assessment; no report");
    default:
      break;
  }
  return storage_->read_file(submission_dir(id) / "report.json");
}

AssessmentReport Gate::get_report(const std::string& id) const {
  return AssessmentReport::from_json(json::parse(get_report_json(id)));
}

std::optional<Decision> Gate::get_decision(const std::string& id) const {
  auto mu = lock_for(id);
  std::lock_guard lock(*mu);
  return record(id).decision;
}

std::vector<std::string> Gate::audit_report(const std::string& id) const {
  auto report = get_report(id);
  std::vector<std::string> problems;
  std::vector<NormalizedReport> reports;
  for (const auto& [tool, key] : report.runs) {
    auto path = storage_->root() / "runs" / key / "report.jsonl";
    try {
      auto r = report_from_jsonl(storage_->read_file(path), taxonomy_, tool);
      r.tool.name = tool;
      reports.push_back(std::move(r));
    } catch (const Error& e) {
      problems.push_back("run " + key + " for " + tool + ": " + e.what());
    }
  }
  if (!problems.empty()) return problems;
  if (reports.empty()) return {"report lists no runs"};
  auto ens = merge(reports, config_.policy);

  std::vector<std::string> stored;
  for (const auto& [label, findings] : report.groups) {
    for (const auto& rf : findings) stored.push_back(finding_to_jsonl_line(rf.finding));
  }
  std::vector<std::string> recomputed;
  for (const auto& f : ens.merged.findings) recomputed.push_back(finding_to_jsonl_line(f));
  std::sort(stored.begin(), stored.end());
  std::sort(recomputed.begin(), recomputed.end());
  if (stored != recomputed) {
    problems.push_back("stored findings (" + std::to_string(stored.size()) +
                       ") differ from the recomputed merge (" + std::to_string(recomputed.size()) + ")");
  }
  if (report.compute_digest() != report.digest) problems.push_back("report digest mismatch");
  return problems;
}

}  // namespace sastbench
