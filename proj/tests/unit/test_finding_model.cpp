#include <doctest.h>

#include <algorithm>
#include <random>

#include "sastbench/error.hpp"
#include "sastbench/finding_model.hpp"

using namespace sastbench;

namespace {

Finding make(std::string tool, std::string file, int line, std::optional<int> cwe,
             std::string rule = "R1") {
  Finding f;
  f.tool = {std::move(tool), "1"};
  f.rule_id = std::move(rule);
  if (cwe) f.cwe = CweId(*cwe);
  f.location = SourceLocation::make(file, line);
  return with_class(std::move(f), Taxonomy::builtin("default"));
}

}  // namespace

TEST_SUITE("finding_model") {

TEST_CASE("default taxonomy classifies the listed CWEs") {
  const auto& tax = Taxonomy::builtin("default");
  CHECK(tax.classes().size() == 12);
  CHECK(classify_cwe(CweId(89), tax)->label == "Injection");
  CHECK(classify_cwe(CweId(564), tax)->label == "Injection");
  CHECK(classify_cwe(CweId(561), tax)->label == "Code Quality");
  CHECK(classify_cwe(CweId(369), tax)->label == "Number Handling");
  CHECK(classify_cwe(CweId(476), tax)->label == "Pointer and Reference Handling");
  CHECK(classify_cwe(CweId(120), tax)->label == "Buffer Handling (C/C++ only)");
  CHECK(classify_cwe(CweId(99999), tax) == nullptr);
}

TEST_CASE("class ids and labels follow the published class list") {
  const auto& tax = Taxonomy::builtin("default");
  const std::vector<std::pair<std::string, int>> expected = {
      {"W321", 285}, {"W322", 120}, {"W323", 561}, {"W324", 705},  {"W325", 328},  {"W326", 755},
      {"W327", 23},  {"W328", 534}, {"W329", 564}, {"W3210", 506}, {"W3211", 369}, {"W3212", 476}};
  REQUIRE(tax.classes().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(tax.classes()[i].class_id == expected[i].first);
    CHECK(tax.classes()[i].member_cwes.count(CweId(expected[i].second)) == 1);
  }
}

TEST_CASE("scorecard taxonomy carries the per-class table rows") {
  const auto& tax = Taxonomy::builtin("scorecard");
  std::vector<std::string> labels;
  for (const auto& c : tax.classes()) labels.push_back(c.label);
  CHECK(labels == std::vector<std::string>{
                      "Authentication and Access Control", "Code Quality", "Control Flow Management",
                      "Encryption and Randomness", "Error Handling", "File Handling",
                      "Information Leaks", "Initialization and Shutdown", "X-Injection",
                      "Malicious Logic", "Number Handling", "Pointer and Reference Handling"});
  CHECK(classify_cwe(CweId(89), tax)->label == "X-Injection");
  CHECK(classify_cwe(CweId(401), tax)->label == "Initialization and Shutdown");
}

TEST_CASE("every built-in taxonomy has disjoint membership") {
  for (const auto& name : Taxonomy::builtin_names()) {
    const auto& tax = Taxonomy::builtin(name);
    std::map<int, int> seen;
    for (const auto& c : tax.classes()) {
      for (const auto& cwe : c.member_cwes) ++seen[cwe.value()];
    }
    for (const auto& [cwe, n] : seen) CHECK_MESSAGE(n == 1, name << " CWE-" << cwe);
    CHECK(Taxonomy::validate(tax.classes()).empty());
  }
}

TEST_CASE("taxonomy construction rejects overlapping classes") {
  std::vector<WeaknessClass> classes = {{"A", "Alpha", {CweId(1), CweId(2)}},
                                        {"B", "Beta", {CweId(2)}}};
  CHECK_FALSE(Taxonomy::validate(classes).empty());
  CHECK_THROWS_AS(Taxonomy("bad", classes), Error);
  try {
    Taxonomy("bad", classes);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invariant_violation);
  }
  CHECK_THROWS_AS(Taxonomy("bad", {{"A", "Unclassified", {CweId(1)}}}), Error);
  CHECK_THROWS_AS(Taxonomy("bad", {{"A", "X", {CweId(1)}}, {"A", "Y", {CweId(3)}}}), Error);
}

TEST_CASE("taxonomy round-trips through JSON") {
  const auto& tax = Taxonomy::builtin("scorecard");
  auto back = Taxonomy::from_json(nlohmann::json::parse(tax.to_json().dump()));
  CHECK(back == tax);
}

TEST_CASE("CWE ids must be positive") {
  CHECK_THROWS_AS(CweId(0), Error);
  CHECK_THROWS_AS(CweId(-4), Error);
  CHECK(CweId(79).str() == "CWE-79");
}

TEST_CASE("relative paths are normalized and may not escape") {
  CHECK(normalize_relative_path("./a//b/../c.c") == "a/c.c");
  CHECK(normalize_relative_path("a\\b\\c.java") == "a/b/c.java");
  CHECK_THROWS_AS(normalize_relative_path("../x.c"), Error);
  CHECK_THROWS_AS(normalize_relative_path("a/../../x.c"), Error);
  CHECK_THROWS_AS(normalize_relative_path(""), Error);
}

TEST_CASE("source locations reject bad line numbers") {
  CHECK_THROWS_AS(SourceLocation::make("a.c", 0), Error);
  CHECK_THROWS_AS(SourceLocation::make("a.c", 5, 4), Error);
  auto loc = SourceLocation::make("a.c", 5, 9);
  CHECK(loc.last_line() == 9);
}

TEST_CASE("with_class attaches or clears the class") {
  CHECK(make("T", "a.c", 1, 89).weakness_class == std::optional<std::string>("Injection"));
  CHECK_FALSE(make("T", "a.c", 1, 99999).weakness_class.has_value());
  CHECK_FALSE(make("T", "a.c", 1, std::nullopt).weakness_class.has_value());
}

TEST_CASE("validate_finding catches a class that disagrees with the CWE") {
  auto f = make("T", "a.c", 1, 89);
  CHECK_NOTHROW(validate_finding(f, &Taxonomy::builtin("default")));
  f.weakness_class = "Code Quality";
  CHECK_THROWS_AS(validate_finding(f, &Taxonomy::builtin("default")), Error);
  f.rule_id.clear();
  CHECK_THROWS_AS(validate_finding(f), Error);
}

TEST_CASE("dedup keys on file and line") {
  DedupPolicy policy;  // {file, line}
  auto a = make("A", "x.c", 10, 89);
  auto b = make("B", "x.c", 10, 476);
  auto c = make("A", "x.c", 11, 89);
  CHECK(dedup_key(a, policy) == dedup_key(b, policy));  // tool and class not in the key
  CHECK(dedup_key(a, policy) != dedup_key(c, policy));
  policy.line_tolerance = 1;
  CHECK(dedup_key(make("A", "x.c", 10, 89), policy) == dedup_key(make("A", "x.c", 11, 89), policy));
}

TEST_CASE("ensemble default keys on class, file and line") {
  auto policy = DedupPolicy::ensemble_default();
  CHECK(policy.key_fields ==
        std::set<KeyField>{KeyField::weakness_class, KeyField::file, KeyField::line});
  CHECK(policy.line_tolerance == 0);
  CHECK(dedup_key(make("A", "x.c", 10, 89), policy) == dedup_key(make("B", "x.c", 10, 564), policy));
  CHECK(dedup_key(make("A", "x.c", 10, 89), policy) != dedup_key(make("B", "x.c", 10, 476), policy));
  // Unclassified findings share an "unmapped" class segment.
  CHECK(dedup_key(make("A", "x.c", 10, std::nullopt), policy) ==
        dedup_key(make("B", "x.c", 10, 99999), policy));
}

TEST_CASE("dedup policy validation") {
  DedupPolicy p;
  p.key_fields.clear();
  CHECK_THROWS_AS(p.validate(), Error);
  p.key_fields = {KeyField::file};
  p.line_tolerance = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("canonical order is a strict weak order independent of input order") {
  std::vector<Finding> v = {make("B", "b.c", 3, 89), make("A", "a.c", 9, 89),
                            make("A", "a.c", 2, 476, "R2"), make("A", "a.c", 2, 476, "R1"),
                            make("C", "a.c", 2, 476, "R1")};
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end(), canonical_less);
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::sort(shuffled.begin(), shuffled.end(), canonical_less);
    CHECK(shuffled == sorted);
  }
  CHECK(sorted.front().location.file == "a.c");
  CHECK(sorted.front().rule_id == "R1");
  CHECK(sorted.front().tool.name == "A");
  for (const auto& f : sorted) CHECK_FALSE(canonical_less(f, f));
}

TEST_CASE("error kinds have stable names") {
  CHECK(to_string(ErrorKind::target_mismatch) == "target-mismatch");
  CHECK(to_string(ErrorKind::invalid_transition) == "invalid-transition");
  CHECK(to_string(ErrorKind::analyzer_timeout) == "analyzer-timeout");
}

}  // TEST_SUITE
