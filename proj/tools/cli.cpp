#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "sastbench/adapters.hpp"
#include "sastbench/corpus.hpp"
#include "sastbench/ensemble.hpp"
#include "sastbench/error.hpp"
#include "sastbench/gate.hpp"
#include "sastbench/gate_http.hpp"
#include "sastbench/matcher.hpp"
#include "sastbench/metrics.hpp"

namespace fs = std::filesystem;

namespace sastbench::cli {

namespace {

// Usage problems detected after CLI11 parsing still exit with 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatchFlags {
  int window = 0;
  bool lenient = false;
  std::string report_format;
  std::string rule_map;

  MatchConfig config() const {
    MatchConfig c;
    c.line_window = window;
    c.class_strict = !lenient;
    c.validate();
    return c;
  }
};

void add_match_flags(CLI::App* cmd, MatchFlags& flags) {
  cmd->add_option("--window", flags.window, "Extra lines of slack around each flaw")
      ->check(CLI::Range(0, 50));
  cmd->add_flag("--lenient", flags.lenient, "Do not require the finding class to match the case");
  cmd->add_option("--report-format", flags.report_format,
                  "Parser for every report (default: by extension, .jsonl or SARIF)");
  cmd->add_option("--rule-map", flags.rule_map, "Rule map name or file used for SARIF reports");
}

RuleMap rule_map_for(const std::string& name) {
  return name.empty() ? RuleMap{} : RuleMap::resolve(name);
}

std::vector<NormalizedReport> load_reports(const std::vector<std::string>& paths,
                                           const GroundTruthManifest& manifest,
                                           const MatchFlags& flags) {
  if (!flags.report_format.empty() && !is_known_format(flags.report_format)) {
    throw UsageError("unknown report format '" + flags.report_format + "'");
  }
  const auto rules = rule_map_for(flags.rule_map);
  std::vector<NormalizedReport> reports;
  for (const auto& p : paths) {
    if (!fs::is_regular_file(p)) throw Error(ErrorKind::io, "cannot read report " + p);
    auto report = load_report(p, flags.report_format, rules, manifest.corpus_root, manifest.taxonomy);
    if (report.target.empty()) report.target = manifest.corpus_root.generic_string();
    reports.push_back(std::move(report));
  }
  return reports;
}

GroundTruthManifest read_manifest(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorKind::io, "cannot read manifest " + path);
  return load_manifest(path);
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
    return;
  }
  std::ofstream f(output, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(ErrorKind::io, "cannot write " + output);
}

// --- score ---

struct ScoreArgs {
  std::string manifest;
  std::vector<std::string> reports;
  MatchFlags flags;
  std::string format = "text";
  bool json = false;
  bool per_class = false;
  std::string rank_by = "f1";
  std::string output;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  auto key = parse_rank_key(a.rank_by);
  if (!key) throw UsageError("unknown ranking key '" + a.rank_by + "'");
  auto manifest = read_manifest(a.manifest);
  auto reports = load_reports(a.reports, manifest, a.flags);
  const auto config = a.flags.config();
  std::vector<MatchResult> results;
  for (const auto& r : reports) {
    results.push_back(match_report(r, manifest, config));
    if (results.back().unattributed > 0) {
      err << r.tool.name << ": " << results.back().unattributed
          << " finding(s) outside every test case ignored\n";
    }
  }
  auto table = scorecard_table(results, *key);
  const auto format = a.json ? std::string("json") : a.format;
  std::string text;
  if (format == "json") {
    nlohmann::ordered_json j;
    j["manifest"] = manifest_ref(manifest);
    j["scorecard"] = to_json(table);
    if (a.per_class) j["perClass"] = class_table_json(results);
    text = j.dump(2) + "\n";
  } else if (format == "csv") {
    text = render_csv(table);
  } else {
    text = render_text(table);
    if (a.per_class) text += "\n" + render_class_table(results);
  }
  emit(text, a.output, out);
  return 0;
}

// --- combine ---

struct CombineArgs {
  std::string manifest;
  std::vector<std::string> reports;
  MatchFlags flags;
  std::string strategy = "exhaustive";
  std::string metric = "f1";
  std::size_t top = 10;
  bool json = false;
  bool check_optimal = false;
  int tolerance = 0;
  std::string output;
};

int cmd_combine(const CombineArgs& a, std::ostream& out, std::ostream& err) {
  auto metric = parse_rank_key(a.metric);
  if (!metric) throw UsageError("unknown metric '" + a.metric + "'");
  auto manifest = read_manifest(a.manifest);
  auto loaded = load_reports(a.reports, manifest, a.flags);
  ReportSet reports;
  std::vector<std::string> tools;
  for (auto& r : loaded) {
    auto name = r.tool.name;
    if (reports.count(name)) throw Error(ErrorKind::malformed_report, "two reports name tool " + name);
    tools.push_back(name);
    reports.emplace(name, std::move(r));
  }
  if (tools.size() == 1) err << "only one report given; the ranking is a single row\n";
  auto policy = DedupPolicy::ensemble_default();
  policy.line_tolerance = a.tolerance;
  policy.validate();
  const auto config = a.flags.config();

  CombinationRanking ranking;
  if (a.strategy == "exhaustive") {
    if (tools.size() > kMaxExhaustiveTools) {
      throw Error(ErrorKind::too_many_tools,
                  std::to_string(tools.size()) + " tools exceed the exhaustive limit of " +
                      std::to_string(kMaxExhaustiveTools) + "; use --strategy greedy");
    }
    ranking = search_exhaustive(tools, reports, manifest, config, policy, *metric);
  } else {
    ranking = search_greedy_reduction(tools, reports, manifest, config, policy, *metric);
    if (a.check_optimal) {
      if (tools.size() > kMaxExhaustiveTools) {
        throw Error(ErrorKind::too_many_tools, "--check-optimal needs at most " +
                                                   std::to_string(kMaxExhaustiveTools) + " tools");
      }
      flag_optimality(ranking,
                      search_exhaustive(tools, reports, manifest, config, policy, *metric));
    }
  }
  std::string text = a.json ? ranking_to_json(ranking, a.top).dump(2) + "\n"
                            : render_ranking_text(ranking, a.top);
  emit(text, a.output, out);
  return 0;
}

// --- normalize ---

struct NormalizeArgs {
  std::string input;
  std::string format = "sarif";
  std::string rule_map;
  std::string corpus_root;
  std::string taxonomy = "default";
  std::string output;
};

int cmd_normalize(const NormalizeArgs& a, std::ostream& out, std::ostream& err) {
  if (!is_known_format(a.format)) throw UsageError("unknown report format '" + a.format + "'");
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read report " + a.input);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto taxonomy = Taxonomy::resolve(a.taxonomy);
  fs::path root = a.corpus_root.empty() ? fs::current_path() : fs::path(a.corpus_root);
  auto report = parse_report(a.format, ss.str(), rule_map_for(a.rule_map), root, taxonomy);
  emit(report_to_jsonl(report), a.output, out);
  const auto& d = report.diagnostics;
  err << report.tool.name << ": " << report.findings.size() << " findings, "
      << report.unmapped_count << " unmapped (" << d.dropped_unmapped << " dropped), "
      << d.skipped_no_location << " without location, " << d.skipped_outside_target
      << " outside the corpus root\n";
  return 0;
}

// --- scan-corpus ---

struct ScanArgs {
  std::string root;
  std::vector<std::string> languages;
  std::string taxonomy = "default";
  std::string output;
  std::string suite = "Juliet";
  std::string suite_version = "1.3";
};

int cmd_scan_corpus(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  std::set<Language> langs;
  for (const auto& item : a.languages) {
    std::stringstream parts(item);
    std::string token;
    while (std::getline(parts, token, ',')) {
      if (token.empty()) continue;
      auto lang = parse_language(token);
      if (!lang || *lang == Language::other) throw UsageError("unknown language '" + token + "'");
      langs.insert(*lang);
    }
  }
  if (!fs::is_directory(a.root)) throw Error(ErrorKind::io, "corpus root is not a directory: " + a.root);
  auto taxonomy = Taxonomy::resolve(a.taxonomy);
  auto scan = scan_juliet_layout(a.root, langs, taxonomy, a.suite, a.suite_version);
  if (Taxonomy::builtin_names().end() !=
      std::find(Taxonomy::builtin_names().begin(), Taxonomy::builtin_names().end(), a.taxonomy)) {
    scan.manifest.taxonomy_ref = a.taxonomy;
  } else {
    scan.manifest.taxonomy_ref.clear();
  }
  for (const auto& w : scan.warnings) err << "warning: " << w.path << ": " << w.message << "\n";
  if (a.output.empty() || a.output == "-") {
    out << manifest_to_string(scan.manifest, fs::current_path());
  } else {
    write_manifest(scan.manifest, a.output);
  }
  err << scan.manifest.cases.size() << " cases, " << scan.manifest.flaw_count() << " flaw sites, "
      << scan.manifest.good_count() << " good regions\n";
  return 0;
}

// --- serve ---

struct ServeArgs {
  std::string config;
  int port = -1;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  std::string path = a.config;
  if (path.empty()) {
    if (const char* env = std::getenv("SASTGATE_CONFIG")) path = env;
  }
  if (path.empty()) throw UsageError("serve needs --config or SASTGATE_CONFIG");
  auto config = GateConfig::load(path);
  if (a.port >= 0) config.port = a.port;
  config.validate();

  // Signals are taken synchronously by a dedicated thread, so every server
  // thread must inherit the blocked mask.
  sigset_t sigs, previous;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGTERM);
  sigaddset(&sigs, SIGINT);
  pthread_sigmask(SIG_BLOCK, &sigs, &previous);
  struct MaskRestore {
    sigset_t mask;
    ~MaskRestore() { pthread_sigmask(SIG_SETMASK, &mask, nullptr); }
  } restore{previous};

  auto gate = std::make_shared<Gate>(config);
  GateServer server(gate);
  const int port = server.bind(config.host, config.port);
  out << "listening on " << config.host << ":" << port << std::endl;

  std::atomic<bool> stopping{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&sigs, &sig);
    stopping = true;
    server.stop();
  });
  server.listen();
  if (!stopping) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  server.drain();
  err << "gate stopped\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Benchmark static analyzers against labeled corpora and run the security gate",
               "sastbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sastbench 0.1.0");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score reports against a corpus manifest");
  score->add_option("manifest", score_args.manifest, "Corpus manifest")->required();
  score->add_option("reports", score_args.reports, "Normalized (.jsonl) or SARIF reports")->required();
  add_match_flags(score, score_args.flags);
  score->add_option("--format", score_args.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  score->add_flag("--json", score_args.json, "Same as --format json");
  score->add_flag("--per-class", score_args.per_class, "Add the per-class F1 table");
  score->add_option("--rank-by", score_args.rank_by, "f1, precision, recall or detections");
  score->add_option("-o,--output", score_args.output, "Write to a file instead of stdout");

  CombineArgs combine_args;
  auto* combine = app.add_subcommand("combine", "Rank tool combinations by a metric");
  combine->add_option("manifest", combine_args.manifest, "Corpus manifest")->required();
  combine->add_option("reports", combine_args.reports, "One report per tool")->required();
  add_match_flags(combine, combine_args.flags);
  combine->add_option("--strategy", combine_args.strategy, "exhaustive or greedy")
      ->check(CLI::IsMember({"exhaustive", "greedy"}));
  combine->add_option("--metric", combine_args.metric, "f1, precision, recall or detections")
      ->check(CLI::IsMember({"f1", "precision", "recall", "detections"}));
  combine->add_option("--top", combine_args.top, "Rows to print (0 for all)");
  combine->add_option("--line-tolerance", combine_args.tolerance, "Dedup line tolerance")
      ->check(CLI::Range(0, 1000));
  combine->add_flag("--check-optimal", combine_args.check_optimal,
                    "With greedy, compare the endpoint with the exhaustive optimum");
  combine->add_flag("--json", combine_args.json, "Machine-readable output");
  combine->add_option("-o,--output", combine_args.output, "Write to a file instead of stdout");

  NormalizeArgs norm_args;
  auto* normalize = app.add_subcommand("normalize", "Convert an analyzer report to JSONL");
  normalize->add_option("input", norm_args.input, "Report file")->required();
  normalize->add_option("--format", norm_args.format, "sarif or a registered native format");
  normalize->add_option("--rule-map", norm_args.rule_map, "Rule map name or file");
  normalize->add_option("--corpus-root", norm_args.corpus_root,
                        "Root that report paths are made relative to (default: cwd)");
  normalize->add_option("--taxonomy", norm_args.taxonomy, "Taxonomy name or file");
  normalize->add_option("-o,--output", norm_args.output, "Write to a file instead of stdout");

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan-corpus", "Build a manifest from a Juliet-style tree");
  scan->add_option("root", scan_args.root, "Corpus root")->required();
  scan->add_option("--languages", scan_args.languages, "Comma-separated: c,cpp,java")->delimiter(',');
  scan->add_option("--taxonomy", scan_args.taxonomy, "Taxonomy name or file");
  scan->add_option("-o,--output", scan_args.output, "Manifest path (default: stdout)");
  scan->add_option("--suite", scan_args.suite, "Suite name");
  scan->add_option("--suite-version", scan_args.suite_version, "Suite version");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the security gate HTTP service");
  serve->add_option("--config", serve_args.config, "Gate config (or SASTGATE_CONFIG)");
  serve->add_option("--port", serve_args.port, "Port override (0 picks a free port)")
      ->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*score) return cmd_score(score_args, out, err);
    if (*combine) return cmd_combine(combine_args, out, err);
    if (*normalize) return cmd_normalize(norm_args, out, err);
    if (*scan) return cmd_scan_corpus(scan_args, out, err);
    if (*serve) return cmd_serve(serve_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sastbench::cli
