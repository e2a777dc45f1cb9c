#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/adapters.hpp"
#include "sastbench/corpus.hpp"

namespace sastbench {

struct MatchConfig {
  int line_window = 0;      // extra slack around each flaw span, <= 50
  bool class_strict = true;  // finding class must equal the case target class

  void validate() const;
};

enum class Label { tp, fp, extraneous };

std::string_view to_string(Label label);

struct MatchLabel {
  Label value = Label::extraneous;
  std::size_t finding_index = 0;  // index into the report's findings
  std::string case_id;
  std::optional<FlawSite> matched_flaw;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct MatchResult {
  std::string subject;  // tool name or ensemble id
  std::string manifest_ref;
  std::vector<MatchLabel> labels;  // one per attributed finding, report order
  std::map<std::string, Counts> per_case;
  Counts totals;
  std::map<std::string, Counts> per_class;  // every taxonomy class present
  std::vector<std::string> class_order;      // taxonomy order
  std::size_t detections = 0;                // non-extraneous findings
  std::size_t unattributed = 0;
};

/// True when the finding's class satisfies the case under `config`.
bool class_matches(const Finding& finding, const TestCase& tc, const Taxonomy& taxonomy,
                   const MatchConfig& config);

/// Labels a finding located in one of the case's files.
MatchLabel label_finding(const Finding& finding, const TestCase& tc, const Taxonomy& taxonomy,
                         const MatchConfig& config);

/// Judges a report against a manifest. Cases targeting an unclassified CWE
/// are not scored; their findings are labeled extraneous.
MatchResult match_report(const NormalizedReport& report, const GroundTruthManifest& manifest,
                         const MatchConfig& config = {});

/// Findings whose file belongs to no case, in canonical order.
std::vector<Finding> unattributed_findings(const NormalizedReport& report,
                                           const GroundTruthManifest& manifest);

/// Totals, per-class table in taxonomy order and the labels array.
nlohmann::ordered_json match_result_to_json(const MatchResult& result,
                                            const NormalizedReport& report);

/// Stable identity of a manifest, used to check that results are comparable.
std::string manifest_ref(const GroundTruthManifest& manifest);

}  // namespace sastbench
