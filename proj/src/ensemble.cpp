#include "sastbench/ensemble.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "sastbench/error.hpp"

namespace sastbench {

std::size_t Ensemble::agreement(const DedupKey& key) const {
  auto it = attribution.find(key);
  return it == attribution.end() ? 0 : it->second.size();
}

std::string ensemble_id(const std::vector<std::string>& members) {
  std::string id;
  for (const auto& m : members) {
    if (!id.empty()) id += '+';
    id += m;
  }
  return id;
}

Ensemble merge(const std::vector<NormalizedReport>& reports, const DedupPolicy& policy) {
  if (reports.empty()) {
    throw Error(ErrorKind::invariant_violation, "merge needs at least one report");
  }
  policy.validate();

  std::string target;
  for (const auto& r : reports) {
    if (r.target.empty()) continue;
    if (target.empty()) {
      target = r.target;
    } else if (target != r.target) {
      throw Error(ErrorKind::target_mismatch,
                  "cannot merge reports for " + target + " and " + r.target);
    }
  }

  Ensemble ens;
  ens.policy = policy;
  std::set<ToolId> members;
  for (const auto& r : reports) members.insert(r.tool);
  ens.members.assign(members.begin(), members.end());

  std::map<DedupKey, Finding> chosen;
  for (const auto& r : reports) {
    for (const auto& f : r.findings) {
      auto key = dedup_key(f, policy);
      auto& tools = ens.attribution[key];
      auto pos = std::lower_bound(tools.begin(), tools.end(), f.tool,
                                  [](const ToolId& a, const ToolId& b) { return a.name < b.name; });
      if (pos == tools.end() || pos->name != f.tool.name) tools.insert(pos, f.tool);

      auto [it, inserted] = chosen.emplace(key, f);
      if (!inserted) {
        const auto& kept = it->second;
        bool replace = std::tie(f.tool.name, f.tool.version) <
                           std::tie(kept.tool.name, kept.tool.version) ||
                       (f.tool == kept.tool && canonical_less(f, kept));
        if (replace) it->second = f;
      }
    }
  }

  std::vector<std::string> names;
  for (const auto& m : ens.members) names.push_back(m.name);
  ens.merged.tool = ToolId{ensemble_id(names), ""};
  ens.merged.target = target;
  ens.merged.produced_at = utc_timestamp();
  for (const auto& r : reports) {
    ens.merged.unmapped_count += r.unmapped_count;
    ens.merged.degraded = ens.merged.degraded || r.degraded;
  }
  ens.merged.findings.reserve(chosen.size());
  for (auto& [key, f] : chosen) ens.merged.findings.push_back(std::move(f));
  ens.merged.canonicalize();
  return ens;
}

SubsetEvaluation evaluate_subset_detailed(const std::set<std::string>& members,
                                          const ReportSet& reports,
                                          const GroundTruthManifest& manifest,
                                          const MatchConfig& config, const DedupPolicy& policy) {
  if (members.empty()) {
    throw Error(ErrorKind::invariant_violation, "subset must have at least one member");
  }
  std::vector<NormalizedReport> selected;
  for (const auto& m : members) {
    auto it = reports.find(m);
    if (it == reports.end()) {
      throw Error(ErrorKind::missing_member, "no report for ensemble member " + m);
    }
    selected.push_back(it->second);
  }
  auto ens = merge(selected, policy);
  auto result = match_report(ens.merged, manifest, config);
  SubsetEvaluation eval;
  eval.members.assign(members.begin(), members.end());
  eval.card = score(result.totals);
  eval.detections = result.detections;
  return eval;
}

ScoreCard evaluate_subset(const std::set<std::string>& members, const ReportSet& reports,
                          const GroundTruthManifest& manifest, const MatchConfig& config,
                          const DedupPolicy& policy) {
  return evaluate_subset_detailed(members, reports, manifest, config, policy).card;
}

double objective_value(const SubsetEvaluation& eval, RankKey objective) {
  switch (objective) {
    case RankKey::f1: return eval.card.f1;
    case RankKey::precision: return eval.card.precision;
    case RankKey::recall: return eval.card.recall;
    case RankKey::detections: return static_cast<double>(eval.detections);
  }
  return 0.0;
}

bool ranks_before(const SubsetEvaluation& a, const SubsetEvaluation& b, RankKey objective) {
  double va = objective_value(a, objective);
  double vb = objective_value(b, objective);
  if (va != vb) return va > vb;
  if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
  return a.members < b.members;
}

std::string_view to_string(SearchStrategy s) {
  return s == SearchStrategy::exhaustive ? "exhaustive" : "greedy-reduction";
}

namespace {

std::vector<std::string> unique_tools(const std::vector<std::string>& tools) {
  std::set<std::string> set(tools.begin(), tools.end());
  return {set.begin(), set.end()};
}

void sort_rows(std::vector<SubsetEvaluation>& rows, RankKey objective) {
  std::sort(rows.begin(), rows.end(), [objective](const auto& a, const auto& b) {
    return ranks_before(a, b, objective);
  });
}

}  // namespace

CombinationRanking search_exhaustive(const std::vector<std::string>& tool_list,
                                     const ReportSet& reports,
                                     const GroundTruthManifest& manifest,
                                     const MatchConfig& config, const DedupPolicy& policy,
                                     RankKey objective) {
  const auto tools = unique_tools(tool_list);
  if (tools.empty()) throw Error(ErrorKind::invariant_violation, "no tools to combine");
  if (tools.size() > kMaxExhaustiveTools) {
    throw Error(ErrorKind::too_many_tools,
                std::to_string(tools.size()) + " tools exceed the exhaustive limit of " +
                    std::to_string(kMaxExhaustiveTools) + "; use the greedy strategy");
  }
  for (const auto& t : tools) {
    if (!reports.contains(t)) throw Error(ErrorKind::missing_member, "no report for tool " + t);
  }

  const std::size_t n_subsets = (std::size_t{1} << tools.size()) - 1;
  std::vector<SubsetEvaluation> rows(n_subsets);
  auto eval_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t mask = i + 1;
      std::set<std::string> members;
      for (std::size_t b = 0; b < tools.size(); ++b) {
        if (mask & (std::size_t{1} << b)) members.insert(tools[b]);
      }
      rows[i] = evaluate_subset_detailed(members, reports, manifest, config, policy);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n_subsets);
  const std::size_t chunk = (n_subsets + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < n_subsets; begin += chunk) {
    jobs.push_back(std::async(std::launch::async, eval_range, begin, std::min(n_subsets, begin + chunk)));
  }
  for (auto& j : jobs) j.get();

  CombinationRanking ranking;
  ranking.objective = objective;
  ranking.strategy = SearchStrategy::exhaustive;
  ranking.rows = std::move(rows);
  sort_rows(ranking.rows, objective);
  ranking.optimal = true;
  return ranking;
}

CombinationRanking search_greedy_reduction(const std::vector<std::string>& tool_list,
                                           const ReportSet& reports,
                                           const GroundTruthManifest& manifest,
                                           const MatchConfig& config, const DedupPolicy& policy,
                                           RankKey objective) {
  const auto tools = unique_tools(tool_list);
  if (tools.empty()) throw Error(ErrorKind::invariant_violation, "no tools to combine");

  CombinationRanking ranking;
  ranking.objective = objective;
  ranking.strategy = SearchStrategy::greedy_reduction;
  ranking.heuristic = true;

  std::map<std::vector<std::string>, SubsetEvaluation> seen;
  auto evaluate = [&](const std::set<std::string>& members) {
    std::vector<std::string> key(members.begin(), members.end());
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, evaluate_subset_detailed(members, reports, manifest, config, policy)).first;
    }
    return it->second;
  };

  std::set<std::string> current(tools.begin(), tools.end());
  auto current_eval = evaluate(current);
  ranking.path.push_back(current_eval);
  while (current.size() > 1) {
    std::optional<SubsetEvaluation> best;
    for (const auto& t : current) {
      auto candidate = current;
      candidate.erase(t);
      auto eval = evaluate(candidate);
      if (!best || ranks_before(eval, *best, objective)) best = eval;
    }
    if (objective_value(*best, objective) <= objective_value(current_eval, objective)) break;
    current = std::set<std::string>(best->members.begin(), best->members.end());
    current_eval = *best;
    ranking.path.push_back(current_eval);
  }

  for (auto& [key, eval] : seen) ranking.rows.push_back(eval);
  sort_rows(ranking.rows, objective);
  return ranking;
}

void flag_optimality(CombinationRanking& greedy, const CombinationRanking& exhaustive) {
  greedy.optimal = objective_value(greedy.endpoint(), greedy.objective) >=
                   objective_value(exhaustive.best(), greedy.objective);
}

std::vector<std::string> best_type_labels(const std::vector<SubsetEvaluation>& rows,
                                          const SubsetEvaluation& row) {
  static const std::vector<std::pair<RankKey, std::string>> kTypes = {
      {RankKey::f1, "Best F-Score"},
      {RankKey::precision, "Best Precision"},
      {RankKey::recall, "Best Recall"},
      {RankKey::detections, "Largest amount of outputs"}};
  std::vector<std::string> labels;
  if (rows.empty()) return labels;
  for (const auto& [key, label] : kTypes) {
    const auto* best = &rows.front();
    for (const auto& r : rows) {
      if (ranks_before(r, *best, key)) best = &r;
    }
    if (best->members == row.members) labels.push_back(label);
  }
  return labels;
}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace

std::string render_ranking_text(const CombinationRanking& ranking, std::size_t top_k) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"members", "tp", "fp", "fn", "recall", "precision", "f1", "detections", "type"});
  auto add = [&](const SubsetEvaluation& e) {
    table.push_back({join(e.members, " + "), std::to_string(e.card.counts.tp),
                     std::to_string(e.card.counts.fp), std::to_string(e.card.counts.fn),
                     format_fixed(e.card.recall, 2), format_fixed(e.card.precision, 2),
                     format_fixed(e.card.f1, 2), std::to_string(e.detections),
                     join(best_type_labels(ranking.rows, e), "; ")});
  };
  const std::size_t n = top_k == 0 ? ranking.rows.size() : std::min(top_k, ranking.rows.size());
  for (std::size_t i = 0; i < n; ++i) add(ranking.rows[i]);

  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out = "objective: " + std::string(to_string(ranking.objective)) +
                    ", strategy: " + std::string(to_string(ranking.strategy)) + ", " +
                    std::to_string(ranking.rows.size()) + " subsets evaluated\n";
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      bool left = i == 0 || i + 1 == row.size();
      std::string pad(width[i] - row[i].size(), ' ');
      if (i > 0) line += "  ";
      line += left ? row[i] + pad : pad + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  if (ranking.strategy == SearchStrategy::greedy_reduction) {
    out += "greedy path:";
    for (const auto& step : ranking.path) {
      out += " [" + join(step.members, "+") + " " +
             format_fixed(objective_value(step, ranking.objective), 4) + "]";
    }
    out += "\n";
    if (ranking.optimal) {
      out += *ranking.optimal ? "greedy endpoint matches the exhaustive optimum\n"
                              : "greedy endpoint is NOT optimal (exhaustive search found better)\n";
    } else {
      out += "heuristic result (optimality not checked)\n";
    }
  }
  return out;
}

nlohmann::ordered_json ranking_to_json(const CombinationRanking& ranking, std::size_t top_k) {
  auto row_json = [&](const SubsetEvaluation& e) {
    nlohmann::ordered_json j;
    j["members"] = e.members;
    const auto card = to_json(e.card);
    for (const auto& [k, v] : card.items()) j[k] = v;
    j["detections"] = e.detections;
    j["objectiveValue"] = objective_value(e, ranking.objective);
    j["type"] = best_type_labels(ranking.rows, e);
    return j;
  };
  nlohmann::ordered_json out;
  out["objective"] = to_string(ranking.objective);
  out["strategy"] = to_string(ranking.strategy);
  out["heuristic"] = ranking.heuristic;
  out["optimal"] = ranking.optimal ? nlohmann::ordered_json(*ranking.optimal) : nlohmann::ordered_json(nullptr);
  out["evaluated"] = ranking.rows.size();
  out["rows"] = nlohmann::ordered_json::array();
  const std::size_t n = top_k == 0 ? ranking.rows.size() : std::min(top_k, ranking.rows.size());
  for (std::size_t i = 0; i < n; ++i) out["rows"].push_back(row_json(ranking.rows[i]));
  if (ranking.strategy == SearchStrategy::greedy_reduction) {
    out["path"] = nlohmann::ordered_json::array();
    for (const auto& step : ranking.path) out["path"].push_back(row_json(step));
  }
  return out;
}

}  // namespace sastbench
