// Thin pybind11 layer. Structured results cross the boundary as JSON text;
// the Python package decodes them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "sastbench/adapters.hpp"
#include "sastbench/corpus.hpp"
#include "sastbench/ensemble.hpp"
#include "sastbench/error.hpp"
#include "sastbench/matcher.hpp"
#include "sastbench/metrics.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace sastbench;

namespace {

RuleMap rule_map_for(const std::string& name) { return name.empty() ? RuleMap{} : RuleMap::resolve(name); }

std::vector<NormalizedReport> load_all(const std::vector<std::string>& paths, const GroundTruthManifest& m,
                                       const std::string& rule_map) {
  const auto rules = rule_map_for(rule_map);
  std::vector<NormalizedReport> out;
  for (const auto& p : paths) {
    auto r = load_report(p, "", rules, m.corpus_root, m.taxonomy);
    if (r.target.empty()) r.target = m.corpus_root.generic_string();
    out.push_back(std::move(r));
  }
  return out;
}

MatchConfig match_config(int window, bool lenient) {
  MatchConfig c;
  c.line_window = window;
  c.class_strict = !lenient;
  c.validate();
  return c;
}

RankKey rank_key(const std::string& name) {
  auto key = parse_rank_key(name);
  if (!key) throw Error(ErrorKind::malformed_config, "unknown metric '" + name + "'");
  return *key;
}

}  // namespace

PYBIND11_MODULE(_sastbench, m) {
  m.doc() = "SAST benchmarking core";

  static py::exception<Error> error(m, "SastbenchError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(to_string(e.kind())), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("score_counts", [](std::size_t tp, std::size_t fp, std::size_t fn) {
    return to_json(score(Counts{tp, fp, 0, fn})).dump();
  }, py::arg("tp"), py::arg("fp"), py::arg("fn"));

  m.def("load_manifest", [](const fs::path& path) {
    auto manifest = load_manifest(path);
    return manifest_to_json(manifest, fs::absolute(path).parent_path()).dump();
  }, py::arg("path"));

  m.def("scan_corpus", [](const fs::path& root, const std::string& taxonomy) {
    py::gil_scoped_release release;
    auto scan = scan_juliet_layout(root, {}, Taxonomy::resolve(taxonomy));
    nlohmann::ordered_json out;
    out["manifest"] = manifest_to_json(scan.manifest, fs::absolute(root).parent_path());
    out["warnings"] = nlohmann::ordered_json::array();
    for (const auto& w : scan.warnings) out["warnings"].push_back({{"path", w.path}, {"message", w.message}});
    return out.dump();
  }, py::arg("root"), py::arg("taxonomy") = "default");

  m.def("normalize_sarif", [](const std::string& document, const std::string& rule_map, const fs::path& target_root) {
    return report_to_jsonl(parse_sarif(document, rule_map_for(rule_map), target_root));
  }, py::arg("document"), py::arg("rule_map") = "", py::arg("target_root") = ".");

  m.def("score", [](const fs::path& manifest_path, const std::vector<std::string>& reports, int window,
                    bool lenient, const std::string& rule_map, const std::string& rank_by) {
    py::gil_scoped_release release;
    auto manifest = load_manifest(manifest_path);
    const auto cfg = match_config(window, lenient);
    std::vector<MatchResult> results;
    for (const auto& r : load_all(reports, manifest, rule_map)) results.push_back(match_report(r, manifest, cfg));
    auto out = to_json(scorecard_table(results, rank_key(rank_by)));
    out["perClass"] = class_table_json(results);
    return out.dump();
  }, py::arg("manifest"), py::arg("reports"), py::arg("window") = 0, py::arg("lenient") = false,
     py::arg("rule_map") = "", py::arg("rank_by") = "f1");

  m.def("combine", [](const fs::path& manifest_path, const std::vector<std::string>& reports,
                      const std::string& strategy, const std::string& metric, int window, std::size_t top) {
    py::gil_scoped_release release;
    auto manifest = load_manifest(manifest_path);
    ReportSet set;
    std::vector<std::string> tools;
    for (auto& r : load_all(reports, manifest, "")) {
      tools.push_back(r.tool.name);
      if (!set.emplace(r.tool.name, std::move(r)).second) {
        throw Error(ErrorKind::malformed_config, "duplicate tool " + tools.back());
      }
    }
    const auto cfg = match_config(window, false);
    const auto policy = DedupPolicy::ensemble_default();
    const auto key = rank_key(metric);
    if (strategy == "exhaustive") {
      return ranking_to_json(search_exhaustive(tools, set, manifest, cfg, policy, key), top).dump();
    }
    if (strategy != "greedy") throw Error(ErrorKind::malformed_config, "unknown strategy '" + strategy + "'");
    auto greedy = search_greedy_reduction(tools, set, manifest, cfg, policy, key);
    if (tools.size() <= kMaxExhaustiveTools) {
      flag_optimality(greedy, search_exhaustive(tools, set, manifest, cfg, policy, key));
    }
    return ranking_to_json(greedy, top).dump();
  }, py::arg("manifest"), py::arg("reports"), py::arg("strategy") = "exhaustive", py::arg("metric") = "f1",
     py::arg("window") = 0, py::arg("top") = 0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> full = {"sastbench"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc;
    {
      py::gil_scoped_release release;
      rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(rc, out.str(), err.str());
  }, py::arg("args"));
}
