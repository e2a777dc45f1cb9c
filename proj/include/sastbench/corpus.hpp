#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/finding_model.hpp"

namespace sastbench {

enum class Language { c, cpp, java, other };

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view text);

struct FlawSite {
  SourceLocation location;
  CweId target_cwe;

  bool operator==(const FlawSite&) const = default;
};

struct GoodRegion {
  SourceLocation location;  // end_line always present
  std::string description;

  bool operator==(const GoodRegion&) const = default;
};

struct TestCase {
  std::string case_id;
  Language language = Language::other;
  std::string target_class;
  std::vector<std::string> files;
  std::vector<FlawSite> flaws;
  std::vector<GoodRegion> goods;

  bool operator==(const TestCase&) const = default;
};

struct GroundTruthManifest {
  std::filesystem::path corpus_root;  // absolute, lexically normal
  std::string suite_name;
  std::string suite_version;
  std::vector<TestCase> cases;
  Taxonomy taxonomy = Taxonomy::builtin("default");
  // Built-in taxonomy name when the manifest refers to one; empty when inline.
  std::string taxonomy_ref = "default";

  bool operator==(const GroundTruthManifest&) const = default;

  std::size_t flaw_count() const;
  std::size_t good_count() const;
  /// Case whose file set contains `file`, or nullptr.
  const TestCase* case_for_file(std::string_view file) const;
};

struct ManifestViolation {
  std::string case_id;
  std::string rule;
  std::string detail;
};

/// Checks every manifest invariant. File existence is only checked when
/// `check_files` is set, since it depends on the filesystem.
std::vector<ManifestViolation> validate_manifest(const GroundTruthManifest& manifest,
                                                 bool check_files = true);

/// Reads and validates a manifest; relative corpusRoot values resolve against
/// the manifest file's directory.
GroundTruthManifest load_manifest(const std::filesystem::path& path);
GroundTruthManifest manifest_from_json(const nlohmann::json& doc,
                                       const std::filesystem::path& base_dir);

/// `base_dir` is where the JSON will live; corpusRoot is written relative to
/// it so the file does not embed machine-specific absolute paths.
nlohmann::ordered_json manifest_to_json(const GroundTruthManifest& manifest,
                                        const std::filesystem::path& base_dir);
std::string manifest_to_string(const GroundTruthManifest& manifest,
                               const std::filesystem::path& base_dir);
void write_manifest(const GroundTruthManifest& manifest, const std::filesystem::path& path);

/// A function definition found in C, C++ or Java source.
struct FunctionSpan {
  std::string name;
  int first_line = 0;  // line of the function name
  int last_line = 0;   // line of the closing brace
};

/// Lightweight brace-matching extraction of function bodies. Comments,
/// string/char literals and preprocessor lines are ignored. CRLF and a
/// trailing fragment without newline are handled like LF lines.
std::vector<FunctionSpan> find_functions(std::string_view source);

/// Case id of a Juliet file name ("CWE121_..._54a.c" -> "CWE121_..._54"),
/// or nullopt when the name does not start with "CWE<digits>_".
std::optional<std::string> juliet_case_id(std::string_view file_name);

struct ScanWarning {
  std::string path;  // corpus-relative file or case id
  std::string message;
};

struct JulietScan {
  GroundTruthManifest manifest;
  std::vector<ScanWarning> warnings;
};

/// Builds a manifest from a Juliet-style tree: bad* functions become flaw
/// sites, good* functions good regions. An empty `languages` set means all.
JulietScan scan_juliet_layout(const std::filesystem::path& root,
                              const std::set<Language>& languages, const Taxonomy& taxonomy,
                              std::string suite_name = "Juliet",
                              std::string suite_version = "1.3");

}  // namespace sastbench
