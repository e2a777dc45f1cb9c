#include "sastbench/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "sastbench/error.hpp"

namespace fs = std::filesystem;

namespace sastbench {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::c: return "c";
    case Language::cpp: return "cpp";
    case Language::java: return "java";
    case Language::other: return "other";
  }
  return "other";
}

std::optional<Language> parse_language(std::string_view text) {
  for (auto lang : {Language::c, Language::cpp, Language::java, Language::other}) {
    if (to_string(lang) == text) return lang;
  }
  return std::nullopt;
}

std::size_t GroundTruthManifest::flaw_count() const {
  std::size_t n = 0;
  for (const auto& tc : cases) n += tc.flaws.size();
  return n;
}

std::size_t GroundTruthManifest::good_count() const {
  std::size_t n = 0;
  for (const auto& tc : cases) n += tc.goods.size();
  return n;
}

const TestCase* GroundTruthManifest::case_for_file(std::string_view file) const {
  for (const auto& tc : cases) {
    if (std::find(tc.files.begin(), tc.files.end(), file) != tc.files.end()) return &tc;
  }
  return nullptr;
}

namespace {

bool spans_overlap(const SourceLocation& a, const SourceLocation& b) {
  return a.file == b.file && a.line <= b.last_line() && b.line <= a.last_line();
}

fs::path normal_absolute(const fs::path& p) {
  auto out = fs::absolute(p).lexically_normal();
  // "dir/" normalizes to "dir/" with an empty filename; drop it.
  if (!out.has_filename() && out.has_parent_path() && out != out.root_path()) {
    out = out.parent_path();
  }
  return out;
}

}  // namespace

std::vector<ManifestViolation> validate_manifest(const GroundTruthManifest& manifest,
                                                 bool check_files) {
  std::vector<ManifestViolation> out;
  std::set<std::string> seen_ids;
  std::map<std::string, std::string> file_owner;
  const auto& taxonomy = manifest.taxonomy;

  for (const auto& tc : manifest.cases) {
    auto report = [&](std::string rule, std::string detail) {
      out.push_back({tc.case_id, std::move(rule), std::move(detail)});
    };
    if (tc.case_id.empty()) report("empty-case-id", "caseId must be non-empty");
    if (!seen_ids.insert(tc.case_id).second) {
      report("duplicate-case-id", "caseId appears more than once");
    }
    if (tc.flaws.empty()) report("no-flaws", "a test case needs at least one flaw site");

    const bool unclassified = tc.target_class == kUnclassified;
    if (!unclassified && !taxonomy.has_label(tc.target_class)) {
      report("unknown-class", "targetClass '" + tc.target_class + "' is not in taxonomy '" +
                                  taxonomy.name() + "'");
    }

    std::set<std::string> files(tc.files.begin(), tc.files.end());
    for (const auto& f : tc.files) {
      auto [it, inserted] = file_owner.emplace(f, tc.case_id);
      if (!inserted && it->second != tc.case_id) {
        report("shared-file", f + " also belongs to case " + it->second);
      }
      if (check_files && !fs::is_regular_file(manifest.corpus_root / f)) {
        report("missing-file", f);
      }
    }

    for (const auto& flaw : tc.flaws) {
      if (!files.contains(flaw.location.file)) {
        report("flaw-outside-case", flaw.location.file + " is not in the case file list");
      }
      const auto* cls = taxonomy.classify(flaw.target_cwe);
      if (unclassified ? cls != nullptr : (cls == nullptr || cls->label != tc.target_class)) {
        report("cwe-outside-class", flaw.target_cwe.str() + " does not classify into '" +
                                        tc.target_class + "'");
      }
    }
    for (const auto& good : tc.goods) {
      if (!files.contains(good.location.file)) {
        report("good-outside-case", good.location.file + " is not in the case file list");
      }
      if (!good.location.end_line) {
        report("good-without-end", good.location.file + ":" +
                                       std::to_string(good.location.line) +
                                       " has no endLine");
      }
      for (const auto& flaw : tc.flaws) {
        if (spans_overlap(good.location, flaw.location)) {
          report("good-overlaps-flaw",
                 good.location.file + ":" + std::to_string(good.location.line) + "-" +
                     std::to_string(good.location.last_line()) + " overlaps flaw at line " +
                     std::to_string(flaw.location.line));
        }
      }
    }
  }
  return out;
}

// --- JSON ---

GroundTruthManifest manifest_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  GroundTruthManifest m;
  try {
    m.suite_name = doc.value("suiteName", std::string{});
    m.suite_version = doc.value("suiteVersion", std::string{});
    fs::path root = doc.value("corpusRoot", std::string{"."});
    m.corpus_root = normal_absolute(root.is_absolute() ? root : base_dir / root);

    if (!doc.contains("taxonomy")) {
      m.taxonomy = Taxonomy::builtin("default");
      m.taxonomy_ref = "default";
    } else if (doc.at("taxonomy").is_string()) {
      m.taxonomy_ref = doc.at("taxonomy").get<std::string>();
      m.taxonomy = Taxonomy::builtin(m.taxonomy_ref);
    } else {
      m.taxonomy = Taxonomy::from_json(doc.at("taxonomy"));
      m.taxonomy_ref.clear();
    }

    for (const auto& c : doc.at("cases")) {
      TestCase tc;
      tc.case_id = c.at("caseId").get<std::string>();
      auto lang = c.value("language", std::string{"other"});
      auto parsed = parse_language(lang);
      if (!parsed) {
        throw Error(ErrorKind::malformed_manifest,
                    "case " + tc.case_id + ": unknown language '" + lang + "'");
      }
      tc.language = *parsed;
      tc.target_class = c.at("targetClass").get<std::string>();
      for (const auto& f : c.at("files")) {
        tc.files.push_back(normalize_relative_path(f.get<std::string>()));
      }
      for (const auto& f : c.value("flaws", nlohmann::json::array())) {
        std::optional<int> end;
        if (f.contains("endLine") && !f.at("endLine").is_null()) end = f.at("endLine").get<int>();
        tc.flaws.push_back(FlawSite{
            SourceLocation::make(f.at("file").get<std::string>(), f.at("line").get<int>(), end),
            CweId(f.at("cwe").get<int>())});
      }
      for (const auto& g : c.value("goods", nlohmann::json::array())) {
        std::optional<int> end;
        if (g.contains("endLine") && !g.at("endLine").is_null()) end = g.at("endLine").get<int>();
        tc.goods.push_back(GoodRegion{
            SourceLocation::make(g.at("file").get<std::string>(), g.at("line").get<int>(), end),
            g.value("description", std::string{})});
      }
      m.cases.push_back(std::move(tc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::malformed_manifest, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::malformed_manifest) throw;
    throw Error(ErrorKind::malformed_manifest, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

GroundTruthManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::malformed_manifest, path.string() + ": " + e.what());
  }
  auto manifest = manifest_from_json(doc, normal_absolute(path).parent_path());

  auto violations = validate_manifest(manifest, /*check_files=*/true);
  if (violations.empty()) return manifest;

  std::vector<std::string> missing;
  std::string msg;
  for (const auto& v : violations) {
    if (v.rule == "missing-file") {
      missing.push_back(v.detail);
    } else {
      msg += "\n  case " + v.case_id + ": " + v.rule + " (" + v.detail + ")";
    }
  }
  if (!msg.empty()) {
    throw Error(ErrorKind::invariant_violation, path.string() + ": invalid manifest:" + msg);
  }
  std::string list;
  for (const auto& f : missing) list += "\n  " + f;
  throw Error(ErrorKind::missing_files,
              path.string() + ": files absent under " + manifest.corpus_root.string() + ":" + list);
}

nlohmann::ordered_json manifest_to_json(const GroundTruthManifest& manifest,
                                        const fs::path& base_dir) {
  nlohmann::ordered_json out;
  out["suiteName"] = manifest.suite_name;
  out["suiteVersion"] = manifest.suite_version;
  auto rel = manifest.corpus_root.lexically_relative(normal_absolute(base_dir));
  out["corpusRoot"] = rel.empty() ? manifest.corpus_root.generic_string() : rel.generic_string();
  if (!manifest.taxonomy_ref.empty()) {
    out["taxonomy"] = manifest.taxonomy_ref;
  } else {
    out["taxonomy"] = manifest.taxonomy.to_json();
  }
  out["cases"] = nlohmann::ordered_json::array();
  for (const auto& tc : manifest.cases) {
    nlohmann::ordered_json c;
    c["caseId"] = tc.case_id;
    c["language"] = to_string(tc.language);
    c["targetClass"] = tc.target_class;
    c["files"] = tc.files;
    c["flaws"] = nlohmann::ordered_json::array();
    for (const auto& f : tc.flaws) {
      nlohmann::ordered_json j;
      j["file"] = f.location.file;
      j["line"] = f.location.line;
      if (f.location.end_line) j["endLine"] = *f.location.end_line;
      j["cwe"] = f.target_cwe.value();
      c["flaws"].push_back(std::move(j));
    }
    c["goods"] = nlohmann::ordered_json::array();
    for (const auto& g : tc.goods) {
      nlohmann::ordered_json j;
      j["file"] = g.location.file;
      j["line"] = g.location.line;
      if (g.location.end_line) j["endLine"] = *g.location.end_line;
      j["description"] = g.description;
      c["goods"].push_back(std::move(j));
    }
    out["cases"].push_back(std::move(c));
  }
  return out;
}

std::string manifest_to_string(const GroundTruthManifest& manifest, const fs::path& base_dir) {
  return manifest_to_json(manifest, base_dir).dump(2) + "\n";
}

void write_manifest(const GroundTruthManifest& manifest, const fs::path& path) {
  const auto dir = normal_absolute(path).parent_path();
  auto text = manifest_to_string(manifest, dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "failed writing manifest " + path.string());
}

// --- Function extents ---

namespace {

// Replaces comments, literals and preprocessor lines with spaces, keeping
// newlines so that offsets map to the same line numbers.
std::string strip_noncode(std::string_view src) {
  std::string out(src);
  enum class State { code, line_comment, block_comment, string, chr, preproc } st = State::code;
  bool line_start = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    char c = out[i];
    char next = i + 1 < out.size() ? out[i + 1] : '\0';
    switch (st) {
      case State::code:
        if (c == '/' && next == '/') {
          st = State::line_comment;
          out[i] = ' ';
        } else if (c == '/' && next == '*') {
          st = State::block_comment;
          out[i] = ' ';
          out[++i] = ' ';
        } else if (c == '"') {
          st = State::string;
          out[i] = ' ';
        } else if (c == '\'') {
          st = State::chr;
          out[i] = ' ';
        } else if (c == '#' && line_start) {
          st = State::preproc;
          out[i] = ' ';
        }
        break;
      case State::line_comment:
        if (c == '\n') st = State::code; else out[i] = ' ';
        break;
      case State::block_comment:
        if (c == '*' && next == '/') {
          out[i] = ' ';
          out[++i] = ' ';
          st = State::code;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
      case State::string:
      case State::chr:
        if (c == '\\' && next != '\0') {
          out[i] = ' ';
          if (next != '\n') out[++i] = ' ';
        } else if ((st == State::string && c == '"') || (st == State::chr && c == '\'')) {
          out[i] = ' ';
          st = State::code;
        } else if (c == '\n') {
          st = State::code;  // unterminated literal; resync at line end
        } else {
          out[i] = ' ';
        }
        break;
      case State::preproc:
        if (c == '\\' && next == '\n') {
          out[i] = ' ';
          ++i;
        } else if (c == '\n') {
          st = State::code;
        } else {
          out[i] = ' ';
        }
        break;
    }
    if (c == '\n') {
      line_start = true;
    } else if (c != ' ' && c != '\t' && c != '\r' && st != State::preproc) {
      line_start = false;
    }
  }
  return out;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

const std::set<std::string>& control_keywords() {
  static const std::set<std::string> kw = {"if",    "for",    "while",        "switch",
                                           "catch", "return", "synchronized", "sizeof",
                                           "do",    "else",   "try",          "new"};
  return kw;
}

// If the '{' at `brace` opens a function body, returns the function name and
// the offset of that name.
std::optional<std::pair<std::string, std::size_t>> function_before(const std::string& code,
                                                                   std::size_t brace) {
  std::size_t i = brace;
  // Skip trailing qualifiers: const, noexcept, override, throws A, B.C, etc.
  while (i > 0) {
    char c = code[i - 1];
    if (is_space(c) || is_ident_char(c) || c == ',' || c == '.' || c == ':') {
      --i;
      continue;
    }
    break;
  }
  if (i == 0 || code[i - 1] != ')') return std::nullopt;
  // A qualifier run containing "::"/":" right after ')' is a C++ init list or
  // similar; it is rare in the corpus and tolerated.
  std::size_t close = i - 1;
  int depth = 0;
  std::size_t j = close + 1;
  while (j > 0) {
    --j;
    if (code[j] == ')') ++depth;
    else if (code[j] == '(' && --depth == 0) break;
  }
  if (depth != 0) return std::nullopt;
  std::size_t k = j;
  while (k > 0 && is_space(code[k - 1])) --k;
  std::size_t name_end = k;
  while (k > 0 && is_ident_char(code[k - 1])) --k;
  if (k == name_end) return std::nullopt;
  std::string name = code.substr(k, name_end - k);
  if (control_keywords().contains(name) || std::isdigit(static_cast<unsigned char>(name[0]))) {
    return std::nullopt;
  }
  // "new Foo() {" is an anonymous class body, not a function.
  std::size_t p = k;
  while (p > 0 && is_space(code[p - 1])) --p;
  std::size_t word_end = p;
  while (p > 0 && is_ident_char(code[p - 1])) --p;
  if (code.compare(p, word_end - p, "new") == 0 && word_end - p == 3) return std::nullopt;
  return std::make_pair(name, k);
}

}  // namespace

std::vector<FunctionSpan> find_functions(std::string_view source) {
  const std::string code = strip_noncode(source);
  std::vector<int> line_at(code.size() + 1, 1);
  int line = 1;
  for (std::size_t i = 0; i < code.size(); ++i) {
    line_at[i] = line;
    if (code[i] == '\n') ++line;
  }
  line_at[code.size()] = line;

  struct Open {
    std::optional<FunctionSpan> fn;
  };
  std::vector<Open> stack;
  std::vector<FunctionSpan> out;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] == '{') {
      Open open;
      if (auto fn = function_before(code, i)) {
        open.fn = FunctionSpan{fn->first, line_at[fn->second], 0};
      }
      stack.push_back(std::move(open));
    } else if (code[i] == '}') {
      if (stack.empty()) continue;
      auto open = std::move(stack.back());
      stack.pop_back();
      if (open.fn) {
        open.fn->last_line = line_at[i];
        out.push_back(std::move(*open.fn));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const FunctionSpan& a, const FunctionSpan& b) {
    return std::tie(a.first_line, a.last_line, a.name) < std::tie(b.first_line, b.last_line, b.name);
  });
  return out;
}

// --- Juliet layout ---

std::optional<std::string> juliet_case_id(std::string_view file_name) {
  static const std::regex kPrefix(R"(^CWE[0-9]+_)");
  static const std::regex kVariant(R"(^(.*[0-9])(?:_?[a-z]|_(?:bad|good[A-Za-z0-9]*))$)");
  std::string name(file_name);
  if (!std::regex_search(name, kPrefix)) return std::nullopt;
  auto dot = name.find_last_of('.');
  std::string stem = dot == std::string::npos ? name : name.substr(0, dot);
  std::smatch m;
  if (std::regex_match(stem, m, kVariant)) return m[1].str();
  return stem;
}

namespace {

std::optional<std::string> source_kind(const fs::path& p) {
  static const std::map<std::string, std::string> kKinds = {
      {".c", "c"}, {".cpp", "cpp"}, {".cc", "cpp"}, {".cxx", "cpp"},
      {".h", "header"}, {".hpp", "header"}, {".java", "java"}};
  auto it = kKinds.find(p.extension().string());
  if (it == kKinds.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

}  // namespace

JulietScan scan_juliet_layout(const fs::path& root, const std::set<Language>& languages,
                              const Taxonomy& taxonomy, std::string suite_name,
                              std::string suite_version) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::io, "corpus root is not a directory: " + root.string());
  }
  const auto abs_root = normal_absolute(root);

  // caseId -> corpus-relative file paths
  std::map<std::string, std::vector<std::string>> groups;
  for (auto it = fs::recursive_directory_iterator(abs_root, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_directory()) continue;
    const auto& path = it->path();
    if (!source_kind(path)) continue;
    auto id = juliet_case_id(path.filename().string());
    if (!id) continue;
    groups[*id].push_back(path.lexically_relative(abs_root).generic_string());
  }
  if (ec) throw Error(ErrorKind::io, "error walking " + root.string() + ": " + ec.message());

  JulietScan scan;
  auto& m = scan.manifest;
  m.corpus_root = abs_root;
  m.suite_name = std::move(suite_name);
  m.suite_version = std::move(suite_version);
  m.taxonomy = taxonomy;
  m.taxonomy_ref.clear();
  for (const auto& name : Taxonomy::builtin_names()) {
    if (Taxonomy::builtin(name) == taxonomy) m.taxonomy_ref = name;
  }

  static const std::regex kCwe(R"(^CWE([0-9]+)_)");
  for (auto& [case_id, files] : groups) {
    std::sort(files.begin(), files.end());
    std::smatch cm;
    std::regex_search(case_id, cm, kCwe);
    int cwe_number = std::stoi(cm[1].str());
    if (cwe_number < 1) {
      scan.warnings.push_back({case_id, "CWE number must be >= 1; case dropped"});
      continue;
    }
    CweId cwe(cwe_number);

    std::set<std::string> kinds;
    for (const auto& f : files) kinds.insert(*source_kind(f));
    Language lang = kinds.contains("java") ? Language::java
                    : kinds.contains("cpp") ? Language::cpp
                    : kinds.contains("c")   ? Language::c
                                            : Language::other;
    if (!languages.empty() && !languages.contains(lang)) continue;

    TestCase tc;
    tc.case_id = case_id;
    tc.language = lang;
    const auto* cls = taxonomy.classify(cwe);
    tc.target_class = cls ? cls->label : std::string(kUnclassified);

    for (const auto& f : files) {
      auto text = read_file(abs_root / f);
      if (!text) {
        scan.warnings.push_back({f, "unreadable file skipped"});
        continue;
      }
      tc.files.push_back(f);
      for (const auto& fn : find_functions(*text)) {
        if (fn.name.find("bad") != std::string::npos) {
          tc.flaws.push_back(
              FlawSite{SourceLocation::make(f, fn.first_line, fn.last_line), cwe});
        } else if (fn.name.find("good") != std::string::npos) {
          tc.goods.push_back(
              GoodRegion{SourceLocation::make(f, fn.first_line, fn.last_line), fn.name});
        }
      }
    }

    std::vector<GoodRegion> goods;
    for (auto& g : tc.goods) {
      bool overlaps = std::any_of(tc.flaws.begin(), tc.flaws.end(), [&](const FlawSite& fl) {
        return spans_overlap(g.location, fl.location);
      });
      if (overlaps) {
        scan.warnings.push_back({g.location.file, "good region " + g.description +
                                                      " overlaps a flaw site; dropped"});
      } else {
        goods.push_back(std::move(g));
      }
    }
    tc.goods = std::move(goods);

    if (tc.flaws.empty()) {
      scan.warnings.push_back({case_id, "no bad function found; case dropped"});
      continue;
    }
    m.cases.push_back(std::move(tc));
  }

  if (m.cases.empty()) {
    throw Error(ErrorKind::empty_corpus, "no Juliet test cases found under " + root.string());
  }
  return scan;
}

}  // namespace sastbench
