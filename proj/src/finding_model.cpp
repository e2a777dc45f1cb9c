#include "sastbench/finding_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "builtin_data.hpp"
#include "sastbench/error.hpp"

namespace sastbench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io-error";
    case ErrorKind::malformed_manifest: return "malformed-manifest";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::missing_files: return "missing-files";
    case ErrorKind::empty_corpus: return "empty-corpus";
    case ErrorKind::malformed_report: return "malformed-report";
    case ErrorKind::malformed_config: return "malformed-config";
    case ErrorKind::analyzer_failed: return "analyzer-failed";
    case ErrorKind::analyzer_timeout: return "analyzer-timeout";
    case ErrorKind::target_mismatch: return "target-mismatch";
    case ErrorKind::manifest_mismatch: return "manifest-mismatch";
    case ErrorKind::missing_member: return "missing-member";
    case ErrorKind::too_many_tools: return "too-many-tools";
    case ErrorKind::rejected_input: return "rejected-input";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::invalid_transition: return "invalid-transition";
    case ErrorKind::already_decided: return "already-decided";
    case ErrorKind::invalid_decision: return "invalid-decision";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::not_ready: return "not-ready";
  }
  return "unknown";
}

CweId::CweId(int id) : id_(id) {
  if (id < 1) {
    throw Error(ErrorKind::invariant_violation,
                "CWE id must be >= 1, got " + std::to_string(id));
  }
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
    case Severity::critical: return "critical";
  }
  return "medium";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (auto s : {Severity::info, Severity::low, Severity::medium, Severity::high,
                 Severity::critical}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

// --- Taxonomy ---

std::vector<std::string> Taxonomy::validate(const std::vector<WeaknessClass>& classes) {
  std::vector<std::string> violations;
  std::set<std::string> ids;
  std::set<std::string> labels;
  std::map<int, std::string> owner;
  for (const auto& cls : classes) {
    if (cls.class_id.empty()) violations.push_back("class with empty classId");
    if (cls.label.empty()) violations.push_back("class " + cls.class_id + " has empty label");
    if (cls.label == kUnclassified) {
      violations.push_back("label '" + cls.label + "' is reserved");
    }
    if (!ids.insert(cls.class_id).second) {
      violations.push_back("duplicate classId " + cls.class_id);
    }
    if (!labels.insert(cls.label).second) {
      violations.push_back("duplicate label " + cls.label);
    }
    for (const auto& cwe : cls.member_cwes) {
      auto [it, inserted] = owner.emplace(cwe.value(), cls.label);
      if (!inserted) {
        violations.push_back(cwe.str() + " belongs to both '" + it->second + "' and '" +
                             cls.label + "'");
      }
    }
  }
  return violations;
}

Taxonomy::Taxonomy(std::string name, std::vector<WeaknessClass> classes)
    : name_(std::move(name)), classes_(std::move(classes)) {
  auto violations = validate(classes_);
  if (!violations.empty()) {
    std::string msg = "invalid taxonomy '" + name_ + "':";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(ErrorKind::invariant_violation, msg);
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    for (const auto& cwe : classes_[i].member_cwes) by_cwe_.emplace(cwe.value(), i);
  }
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc) {
  try {
    std::vector<WeaknessClass> classes;
    for (const auto& c : doc.at("classes")) {
      WeaknessClass cls;
      cls.class_id = c.at("classId").get<std::string>();
      cls.label = c.at("label").get<std::string>();
      for (const auto& id : c.value("cwes", nlohmann::json::array())) {
        cls.member_cwes.insert(CweId(id.get<int>()));
      }
      classes.push_back(std::move(cls));
    }
    return Taxonomy(doc.value("name", std::string{}), std::move(classes));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::malformed_config, std::string("malformed taxonomy: ") + e.what());
  }
}

Taxonomy Taxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read taxonomy file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::malformed_config, path + ": " + e.what());
  }
  return from_json(doc);
}

const Taxonomy& Taxonomy::builtin(std::string_view name) {
  static const Taxonomy kDefault = from_json(nlohmann::json::parse(detail::kDefaultTaxonomyJson));
  static const Taxonomy kScorecard =
      from_json(nlohmann::json::parse(detail::kScorecardTaxonomyJson));
  if (name == "default") return kDefault;
  if (name == "scorecard") return kScorecard;
  throw Error(ErrorKind::not_found, "no built-in taxonomy named '" + std::string(name) + "'");
}

std::vector<std::string> Taxonomy::builtin_names() { return {"default", "scorecard"}; }

Taxonomy Taxonomy::resolve(const std::string& name_or_path) {
  auto names = builtin_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return builtin(name_or_path);
  }
  return load(name_or_path);
}

nlohmann::ordered_json Taxonomy::to_json() const {
  nlohmann::ordered_json out;
  out["name"] = name_;
  out["classes"] = nlohmann::ordered_json::array();
  for (const auto& cls : classes_) {
    nlohmann::ordered_json c;
    c["classId"] = cls.class_id;
    c["label"] = cls.label;
    c["cwes"] = nlohmann::ordered_json::array();
    for (const auto& cwe : cls.member_cwes) c["cwes"].push_back(cwe.value());
    out["classes"].push_back(std::move(c));
  }
  return out;
}

const WeaknessClass* Taxonomy::classify(CweId cwe) const {
  auto it = by_cwe_.find(cwe.value());
  return it == by_cwe_.end() ? nullptr : &classes_[it->second];
}

const WeaknessClass* Taxonomy::find_label(std::string_view label) const {
  for (const auto& cls : classes_) {
    if (cls.label == label) return &cls;
  }
  return nullptr;
}

const WeaknessClass* classify_cwe(CweId cwe, const Taxonomy& taxonomy) {
  return taxonomy.classify(cwe);
}

// --- Locations and findings ---

std::string normalize_relative_path(std::string_view path) {
  std::string p(path);
  std::replace(p.begin(), p.end(), '\\', '/');
  std::vector<std::string> parts;
  std::stringstream ss(p);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (parts.empty()) {
        throw Error(ErrorKind::invariant_violation,
                    "path escapes its root: " + std::string(path));
      }
      parts.pop_back();
      continue;
    }
    parts.push_back(seg);
  }
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += '/';
    out += part;
  }
  if (out.empty()) {
    throw Error(ErrorKind::invariant_violation, "empty path: '" + std::string(path) + "'");
  }
  return out;
}

SourceLocation SourceLocation::make(std::string_view file, int line,
                                    std::optional<int> end_line) {
  if (line < 1) {
    throw Error(ErrorKind::invariant_violation,
                "line must be >= 1 in " + std::string(file));
  }
  if (end_line && *end_line < line) {
    throw Error(ErrorKind::invariant_violation,
                "endLine precedes line in " + std::string(file));
  }
  return SourceLocation{normalize_relative_path(file), line, end_line};
}

void validate_finding(const Finding& finding, const Taxonomy* taxonomy) {
  if (finding.rule_id.empty()) {
    throw Error(ErrorKind::invariant_violation, "finding with empty ruleId");
  }
  if (finding.tool.name.empty()) {
    throw Error(ErrorKind::invariant_violation, "finding with empty tool name");
  }
  if (finding.weakness_class) {
    if (!finding.cwe) {
      throw Error(ErrorKind::invariant_violation,
                  "finding " + finding.rule_id + " has a class but no CWE");
    }
    if (taxonomy) {
      const auto* cls = taxonomy->classify(*finding.cwe);
      if (cls == nullptr || cls->label != *finding.weakness_class) {
        throw Error(ErrorKind::invariant_violation,
                    finding.cwe->str() + " is not a member of '" + *finding.weakness_class +
                        "'");
      }
    }
  }
}

Finding with_class(Finding finding, const Taxonomy& taxonomy) {
  finding.weakness_class.reset();
  if (finding.cwe) {
    if (const auto* cls = taxonomy.classify(*finding.cwe)) finding.weakness_class = cls->label;
  }
  return finding;
}

bool canonical_less(const Finding& a, const Finding& b) {
  const int cwe_a = a.cwe ? a.cwe->value() : 0;
  const int cwe_b = b.cwe ? b.cwe->value() : 0;
  const int end_a = a.location.end_line.value_or(0);
  const int end_b = b.location.end_line.value_or(0);
  return std::tie(a.location.file, a.location.line, a.rule_id, a.tool.name, a.tool.version,
                  end_a, cwe_a, a.severity, a.message) <
         std::tie(b.location.file, b.location.line, b.rule_id, b.tool.name, b.tool.version,
                  end_b, cwe_b, b.severity, b.message);
}

// --- Deduplication ---

DedupPolicy DedupPolicy::ensemble_default() {
  return DedupPolicy{{KeyField::weakness_class, KeyField::file, KeyField::line}, 0};
}

void DedupPolicy::validate() const {
  if (!key_fields.contains(KeyField::file)) {
    throw Error(ErrorKind::invariant_violation, "dedup policy must key on file");
  }
  if (line_tolerance < 0) {
    throw Error(ErrorKind::invariant_violation, "dedup lineTolerance must be >= 0");
  }
  if (line_tolerance > 0 && !key_fields.contains(KeyField::line)) {
    throw Error(ErrorKind::invariant_violation,
                "dedup lineTolerance requires line in the key");
  }
}

DedupKey dedup_key(const Finding& finding, const DedupPolicy& policy) {
  constexpr std::string_view kUnmapped = "unmapped";
  std::string key;
  auto append = [&key](std::string_view name, std::string_view value) {
    if (!key.empty()) key += '|';
    key += name;
    key += '=';
    key += value;
  };
  // Fixed field order keeps the key independent of set iteration details.
  for (auto field : {KeyField::tool, KeyField::rule_id, KeyField::cwe, KeyField::weakness_class,
                     KeyField::file, KeyField::line}) {
    if (!policy.key_fields.contains(field)) continue;
    switch (field) {
      case KeyField::tool:
        append("tool", finding.tool.name);
        break;
      case KeyField::rule_id:
        append("rule", finding.rule_id);
        break;
      case KeyField::cwe:
        append("cwe", finding.cwe ? std::to_string(finding.cwe->value()) : kUnmapped);
        break;
      case KeyField::weakness_class:
        append("class", finding.weakness_class ? *finding.weakness_class : kUnmapped);
        break;
      case KeyField::file:
        append("file", finding.location.file);
        break;
      case KeyField::line:
        append("line", std::to_string(finding.location.line / (policy.line_tolerance + 1)));
        break;
    }
  }
  return DedupKey{std::move(key)};
}

}  // namespace sastbench
