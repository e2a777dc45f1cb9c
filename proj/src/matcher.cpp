#include "sastbench/matcher.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "sastbench/error.hpp"

namespace fs = std::filesystem;

namespace sastbench {

void MatchConfig::validate() const {
  if (line_window < 0 || line_window > 50) {
    throw Error(ErrorKind::invariant_violation,
                "lineWindow must be within [0, 50], got " + std::to_string(line_window));
  }
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::tp: return "TP";
    case Label::fp: return "FP";
    case Label::extraneous: return "extraneous";
  }
  return "extraneous";
}

namespace {

bool in_flaw_window(int line, const FlawSite& flaw, int window) {
  return line >= flaw.location.line - window && line <= flaw.location.last_line() + window;
}

bool in_region(int line, const GoodRegion& good) {
  return line >= good.location.line && line <= good.location.last_line();
}

bool is_scored(const TestCase& tc, const Taxonomy& taxonomy) {
  return tc.target_class != kUnclassified && taxonomy.has_label(tc.target_class);
}

}  // namespace

bool class_matches(const Finding& finding, const TestCase& tc, const Taxonomy& taxonomy,
                   const MatchConfig& config) {
  if (!config.class_strict) return true;
  if (!finding.cwe) return false;
  const auto* cls = taxonomy.classify(*finding.cwe);
  return cls != nullptr && cls->label == tc.target_class;
}

MatchLabel label_finding(const Finding& finding, const TestCase& tc, const Taxonomy& taxonomy,
                         const MatchConfig& config) {
  MatchLabel label;
  label.case_id = tc.case_id;
  if (!class_matches(finding, tc, taxonomy, config)) return label;
  const auto& loc = finding.location;
  for (const auto& flaw : tc.flaws) {
    if (flaw.location.file == loc.file && in_flaw_window(loc.line, flaw, config.line_window)) {
      label.value = Label::tp;
      label.matched_flaw = flaw;
      return label;
    }
  }
  for (const auto& good : tc.goods) {
    if (good.location.file == loc.file && in_region(loc.line, good)) {
      label.value = Label::fp;
      return label;
    }
  }
  return label;
}

std::string manifest_ref(const GroundTruthManifest& manifest) {
  return manifest.suite_name + "@" + manifest.suite_version + ":" +
         manifest.corpus_root.generic_string() + "#" + std::to_string(manifest.cases.size());
}

namespace {

std::unordered_map<std::string, std::size_t> file_index(const GroundTruthManifest& manifest) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
    for (const auto& f : manifest.cases[i].files) index.emplace(f, i);
  }
  return index;
}

void check_target(const NormalizedReport& report, const GroundTruthManifest& manifest) {
  if (report.target.empty()) return;
  fs::path target(report.target);
  if (target.is_relative()) target = fs::absolute(target);
  target = target.lexically_normal();
  if (!target.has_filename() && target.has_parent_path()) target = target.parent_path();
  if (target.generic_string() != manifest.corpus_root.generic_string()) {
    throw Error(ErrorKind::target_mismatch, "report target " + report.target +
                                                " does not match corpus root " +
                                                manifest.corpus_root.string());
  }
}

}  // namespace

MatchResult match_report(const NormalizedReport& report, const GroundTruthManifest& manifest,
                         const MatchConfig& config) {
  config.validate();
  check_target(report, manifest);
  const auto& taxonomy = manifest.taxonomy;
  const auto index = file_index(manifest);

  MatchResult result;
  result.subject = report.tool.name;
  result.manifest_ref = manifest_ref(manifest);

  // Per case: which flaw sites and good regions were hit.
  std::vector<std::vector<bool>> flaw_hit(manifest.cases.size());
  std::vector<std::vector<bool>> good_hit(manifest.cases.size());
  for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
    flaw_hit[i].assign(manifest.cases[i].flaws.size(), false);
    good_hit[i].assign(manifest.cases[i].goods.size(), false);
  }

  for (std::size_t fi = 0; fi < report.findings.size(); ++fi) {
    const auto& finding = report.findings[fi];
    auto it = index.find(finding.location.file);
    if (it == index.end()) {
      ++result.unattributed;
      continue;
    }
    const auto ci = it->second;
    const auto& tc = manifest.cases[ci];
    MatchLabel label;
    if (is_scored(tc, taxonomy)) {
      label = label_finding(finding, tc, taxonomy, config);
    } else {
      label.case_id = tc.case_id;
    }
    label.finding_index = fi;

    if (label.value == Label::tp) {
      // Every flaw site whose window holds the finding is credited.
      for (std::size_t k = 0; k < tc.flaws.size(); ++k) {
        if (tc.flaws[k].location.file == finding.location.file &&
            in_flaw_window(finding.location.line, tc.flaws[k], config.line_window)) {
          flaw_hit[ci][k] = true;
        }
      }
    } else if (label.value == Label::fp) {
      for (std::size_t k = 0; k < tc.goods.size(); ++k) {
        if (tc.goods[k].location.file == finding.location.file &&
            in_region(finding.location.line, tc.goods[k])) {
          good_hit[ci][k] = true;
        }
      }
    }
    if (label.value != Label::extraneous) ++result.detections;
    result.labels.push_back(std::move(label));
  }

  for (const auto& cls : taxonomy.classes()) {
    result.class_order.push_back(cls.label);
    result.per_class[cls.label] = Counts{};
  }
  for (std::size_t ci = 0; ci < manifest.cases.size(); ++ci) {
    const auto& tc = manifest.cases[ci];
    if (!is_scored(tc, taxonomy)) continue;
    Counts c;
    c.tp = static_cast<std::size_t>(std::count(flaw_hit[ci].begin(), flaw_hit[ci].end(), true));
    c.fn = tc.flaws.size() - c.tp;
    c.fp = static_cast<std::size_t>(std::count(good_hit[ci].begin(), good_hit[ci].end(), true));
    c.tn = tc.goods.size() - c.fp;
    result.per_case[tc.case_id] = c;
    result.per_class[tc.target_class] += c;
    result.totals += c;
  }
  return result;
}

std::vector<Finding> unattributed_findings(const NormalizedReport& report,
                                           const GroundTruthManifest& manifest) {
  const auto index = file_index(manifest);
  std::vector<Finding> out;
  for (const auto& f : report.findings) {
    if (!index.contains(f.location.file)) out.push_back(f);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

namespace {

nlohmann::ordered_json counts_json(const Counts& c) {
  nlohmann::ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  return j;
}

}  // namespace

nlohmann::ordered_json match_result_to_json(const MatchResult& result,
                                            const NormalizedReport& report) {
  nlohmann::ordered_json j;
  j["subject"] = result.subject;
  j["manifest"] = result.manifest_ref;
  j["totals"] = counts_json(result.totals);
  j["detections"] = result.detections;
  j["unattributed"] = result.unattributed;
  j["perClass"] = nlohmann::ordered_json::array();
  for (const auto& label : result.class_order) {
    auto row = counts_json(result.per_class.at(label));
    nlohmann::ordered_json entry;
    entry["class"] = label;
    for (auto& [k, v] : row.items()) entry[k] = v;
    j["perClass"].push_back(std::move(entry));
  }
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& label : result.labels) {
    const auto& f = report.findings.at(label.finding_index);
    nlohmann::ordered_json l;
    l["tool"] = f.tool.name;
    l["ruleId"] = f.rule_id;
    l["file"] = f.location.file;
    l["line"] = f.location.line;
    l["caseId"] = label.case_id;
    l["label"] = to_string(label.value);
    if (label.matched_flaw) {
      nlohmann::ordered_json m;
      m["file"] = label.matched_flaw->location.file;
      m["line"] = label.matched_flaw->location.line;
      m["endLine"] = label.matched_flaw->location.last_line();
      l["matchedFlaw"] = std::move(m);
    } else {
      l["matchedFlaw"] = nullptr;
    }
    j["labels"].push_back(std::move(l));
  }
  return j;
}

}  // namespace sastbench
