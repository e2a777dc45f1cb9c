#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sastbench {

struct ToolId {
  std::string name;
  std::string version;

  auto operator<=>(const ToolId&) const = default;
};

// A CWE number; construction rejects ids below 1.
class CweId {
 public:
  explicit CweId(int id);

  int value() const noexcept { return id_; }
  std::string str() const { return "CWE-" + std::to_string(id_); }

  auto operator<=>(const CweId&) const = default;

 private:
  int id_;
};

enum class Severity { info, low, medium, high, critical };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view text);

struct WeaknessClass {
  std::string class_id;
  std::string label;
  std::set<CweId> member_cwes;

  bool operator==(const WeaknessClass&) const = default;
};

/// An ordered list of weakness classes with a CWE -> class index.
///
/// Construction validates the invariants (unique ids and labels, disjoint
/// membership) and throws Error{invariant_violation} listing every breach.
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(std::string name, std::vector<WeaknessClass> classes);

  static Taxonomy from_json(const nlohmann::json& doc);
  static Taxonomy load(const std::string& path);
  /// Built-in taxonomies: "default" (twelve classes incl. Buffer Handling and
  /// Injection) and "scorecard" (Initialization and Shutdown, X-Injection).
  static const Taxonomy& builtin(std::string_view name);
  static std::vector<std::string> builtin_names();

  /// Accepts a built-in name or a path to a taxonomy JSON file.
  static Taxonomy resolve(const std::string& name_or_path);

  /// Returns the breaches for a candidate class list; empty when valid.
  static std::vector<std::string> validate(const std::vector<WeaknessClass>& classes);

  nlohmann::ordered_json to_json() const;

  const std::string& name() const noexcept { return name_; }
  const std::vector<WeaknessClass>& classes() const noexcept { return classes_; }

  const WeaknessClass* classify(CweId cwe) const;
  const WeaknessClass* find_label(std::string_view label) const;
  bool has_label(std::string_view label) const { return find_label(label) != nullptr; }

  bool operator==(const Taxonomy& other) const {
    return name_ == other.name_ && classes_ == other.classes_;
  }

 private:
  std::string name_;
  std::vector<WeaknessClass> classes_;
  std::map<int, std::size_t> by_cwe_;
};

/// Returns the unique class containing `cwe`, or nullptr when unclassified.
const WeaknessClass* classify_cwe(CweId cwe, const Taxonomy& taxonomy);

/// Label used for corpus cases whose CWE has no class in the taxonomy.
inline constexpr std::string_view kUnclassified = "Unclassified";

/// Normalizes a relative path: forward slashes, no "." segments, ".." folded.
/// Throws Error{invariant_violation} when the path escapes its root.
std::string normalize_relative_path(std::string_view path);

struct SourceLocation {
  std::string file;
  int line = 1;
  std::optional<int> end_line;

  /// Builds a location with a normalized path and checked line numbers.
  static SourceLocation make(std::string_view file, int line,
                             std::optional<int> end_line = std::nullopt);

  int last_line() const { return end_line.value_or(line); }

  auto operator<=>(const SourceLocation&) const = default;
};

struct Finding {
  ToolId tool;
  std::string rule_id;
  std::optional<CweId> cwe;
  std::optional<std::string> weakness_class;
  SourceLocation location;
  std::string message;
  Severity severity = Severity::medium;

  bool operator==(const Finding&) const = default;
};

/// Throws Error{invariant_violation} when the finding breaks its invariants.
void validate_finding(const Finding& finding, const Taxonomy* taxonomy = nullptr);

/// Sets weakness_class from cwe (or clears it when unclassified).
Finding with_class(Finding finding, const Taxonomy& taxonomy);

/// Canonical report order: file, line, ruleId, then the remaining fields.
bool canonical_less(const Finding& a, const Finding& b);

enum class KeyField { tool, rule_id, cwe, weakness_class, file, line };

struct DedupPolicy {
  std::set<KeyField> key_fields{KeyField::file, KeyField::line};
  int line_tolerance = 0;

  /// Ensemble default: {weaknessClass, file, line}, tolerance 0.
  static DedupPolicy ensemble_default();

  void validate() const;
};

struct DedupKey {
  std::string value;

  auto operator<=>(const DedupKey&) const = default;
};

/// Fields absent on the finding contribute an "unmapped" segment.
DedupKey dedup_key(const Finding& finding, const DedupPolicy& policy);

}  // namespace sastbench
