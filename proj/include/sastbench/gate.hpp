#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/adapters.hpp"
#include "sastbench/ensemble.hpp"

namespace sastbench {

enum class SubmissionState { submitted, scanning, awaiting_review, published, rejected, failed };

std::string_view to_string(SubmissionState state);
std::optional<SubmissionState> parse_submission_state(std::string_view text);

enum class GateEvent { start_scan, scan_succeeded, scan_failed, decide_pass, decide_fail };

/// The gate's transition table; nullopt marks a forbidden transition.
std::optional<SubmissionState> next_state(SubmissionState from, GateEvent event);

struct Submission {
  std::string id;
  std::string submitter;
  std::string artifact_path;    // stored archive
  std::string content_address;  // sha256 of the archive bytes
  SubmissionState state = SubmissionState::submitted;
  std::int64_t created_ms = 0;  // unix epoch milliseconds
  std::int64_t updated_ms = 0;

  nlohmann::ordered_json to_json() const;
};

enum class Verdict { pass, fail };
enum class TriageMark { confirmed, false_positive, wont_fix };

std::string_view to_string(Verdict v);
std::string_view to_string(TriageMark m);

struct Decision {
  std::string submission_id;
  std::string moderator;
  Verdict verdict = Verdict::fail;
  std::string rationale;
  std::map<std::string, TriageMark> triage;  // finding key -> mark
  std::int64_t decided_ms = 0;

  /// Parses the HTTP body form; throws Error{invalid_decision}.
  static Decision from_json(const nlohmann::json& doc, std::string submission_id);
  nlohmann::ordered_json to_json() const;
};

struct ReportFinding {
  Finding finding;
  std::string key;                 // dedup key under the gate policy
  std::vector<std::string> tools;  // tools reporting this key
};

struct AnalyzerFailure {
  std::string tool;
  std::string kind;
  std::string message;
};

struct AssessmentReport {
  std::string submission_id;
  std::vector<ToolId> members;
  /// Class label -> findings, in taxonomy order; "Unclassified" last.
  std::vector<std::pair<std::string, std::vector<ReportFinding>>> groups;
  std::map<std::string, std::size_t> per_tool_counts;
  std::map<std::string, std::size_t> agreement;  // finding key -> #tools
  std::optional<Severity> highest_severity;
  std::vector<AnalyzerFailure> failures;
  std::vector<std::pair<std::string, std::string>> runs;  // tool -> run key
  std::string generated_at;
  std::string digest;  // sha256 over everything except generatedAt/digest

  std::size_t finding_count() const;
  std::map<std::string, std::size_t> per_class_counts() const;

  nlohmann::ordered_json to_json() const;
  static AssessmentReport from_json(const nlohmann::json& doc);
  /// Digest of the canonical content (generatedAt and digest excluded).
  std::string compute_digest() const;
};

struct GateConfig {
  std::vector<AnalyzerSpec> analyzers;
  std::uint64_t size_cap_bytes = 64ull << 20;
  std::filesystem::path storage_root = "gate-data";
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string moderator_token;  // empty disables the check
  std::string taxonomy = "default";
  DedupPolicy policy = DedupPolicy::ensemble_default();

  static GateConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  /// Reads the file and applies SASTGATE_PORT / SASTGATE_STORAGE overrides.
  static GateConfig load(const std::filesystem::path& path);
  void validate() const;
};

/// Persistence behind the gate. The directory implementation keeps an
/// append-only JSONL event log plus content-addressed archives and runs.
class GateStorage {
 public:
  virtual ~GateStorage() = default;

  virtual void append_event(const nlohmann::json& event) = 0;
  virtual std::vector<nlohmann::json> read_events() const = 0;
  /// Stores archive bytes under their digest; returns the stored path.
  virtual std::filesystem::path put_archive(std::string_view bytes, const std::string& digest) = 0;
  virtual std::string read_file(const std::filesystem::path& path) const = 0;
  /// Writes via a temporary file and rename.
  virtual void write_file_atomic(const std::filesystem::path& path, std::string_view data) = 0;
  virtual std::filesystem::path root() const = 0;
};

class DirectoryStorage : public GateStorage {
 public:
  explicit DirectoryStorage(std::filesystem::path root);

  void append_event(const nlohmann::json& event) override;
  std::vector<nlohmann::json> read_events() const override;
  std::filesystem::path put_archive(std::string_view bytes, const std::string& digest) override;
  std::string read_file(const std::filesystem::path& path) const override;
  void write_file_atomic(const std::filesystem::path& path, std::string_view data) override;
  std::filesystem::path root() const override { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex log_mu_;
};

struct AssessOutcome {
  Submission submission;
  std::optional<AssessmentReport> report;  // absent when every analyzer failed
  std::vector<AnalyzerFailure> failures;
};

struct QueueEntry {
  Submission submission;
  std::size_t finding_count = 0;
  std::map<std::string, std::size_t> per_class_counts;
  std::optional<Severity> highest_severity;
};

/// The security gate: submissions move Submitted -> Scanning ->
/// AwaitingReview -> Published/Rejected (or Scanning -> Failed). State is
/// rebuilt from the event log on construction, so a new instance over the
/// same storage resumes where a crashed one stopped.
class Gate {
 public:
  /// Test hook invoked at named points of assess ("before-complete").
  using FaultHook = std::function<void(std::string_view stage)>;

  Gate(GateConfig config, std::shared_ptr<GateStorage> storage);
  explicit Gate(GateConfig config);

  Submission submit(std::string_view archive, const std::string& submitter);

  /// Runs every configured analyzer and merges the results. A submission
  /// left in Scanning by a crashed process may be assessed again.
  AssessOutcome assess(const std::string& id);
  /// The two halves of assess, for callers that run the scan asynchronously.
  Submission begin_assess(const std::string& id);
  AssessOutcome finish_assess(const std::string& id);

  Submission decide(const std::string& id, Decision decision);

  Submission get(const std::string& id) const;
  std::vector<Submission> list(std::optional<SubmissionState> state = std::nullopt) const;
  std::vector<QueueEntry> queue(std::optional<SubmissionState> state) const;

  /// Persisted report bytes, verbatim.
  std::string get_report_json(const std::string& id) const;
  AssessmentReport get_report(const std::string& id) const;
  std::optional<Decision> get_decision(const std::string& id) const;

  /// Recomputes the merge from the persisted per-tool reports and compares
  /// it with the stored report; returns the mismatches (empty when clean).
  std::vector<std::string> audit_report(const std::string& id) const;

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }
  const GateConfig& config() const { return config_; }

 private:
  struct Record {
    Submission submission;
    std::optional<Decision> decision;
    std::string report_digest;
    bool in_flight = false;
  };

  void replay();
  std::shared_ptr<std::mutex> lock_for(const std::string& id) const;
  Record& record(const std::string& id);
  const Record& record(const std::string& id) const;
  std::int64_t advance_clock(const Submission& s) const;
  void transition(Record& rec, GateEvent event, nlohmann::json payload);
  std::filesystem::path submission_dir(const std::string& id) const;
  std::filesystem::path ensure_workspace(const Submission& s);
  std::string run_key(const Submission& s, const AnalyzerSpec& spec) const;

  GateConfig config_;
  std::shared_ptr<GateStorage> storage_;
  Taxonomy taxonomy_;
  FaultHook fault_hook_;

  mutable std::mutex table_mu_;  // guards records_ map structure and locks_
  std::map<std::string, Record> records_;
  mutable std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mutex workspace_mu_;
  std::atomic<std::uint64_t> seq_{0};
};

}  // namespace sastbench
