#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/adapters.hpp"
#include "sastbench/corpus.hpp"
#include "sastbench/matcher.hpp"
#include "sastbench/metrics.hpp"

namespace sastbench {

struct Ensemble {
  std::vector<ToolId> members;  // sorted, unique
  NormalizedReport merged;      // one finding per dedup key, canonical order
  DedupPolicy policy;
  /// Distinct tools whose findings collapsed onto each key, sorted by name.
  std::map<DedupKey, std::vector<ToolId>> attribution;

  std::size_t agreement(const DedupKey& key) const;
};

/// Union of findings deduplicated by `policy`. On collision the finding from
/// the alphabetically-first tool is kept. Throws Error{target_mismatch} when
/// reports disagree on their (non-empty) targets.
Ensemble merge(const std::vector<NormalizedReport>& reports,
               const DedupPolicy& policy = DedupPolicy::ensemble_default());

/// "A+B+C" for sorted member names.
std::string ensemble_id(const std::vector<std::string>& members);

using ReportSet = std::map<std::string, NormalizedReport>;  // tool name -> report

struct SubsetEvaluation {
  std::vector<std::string> members;  // sorted
  ScoreCard card;
  std::size_t detections = 0;
};

/// score(match_report(merge(member reports))). Throws Error{missing_member}.
ScoreCard evaluate_subset(const std::set<std::string>& members, const ReportSet& reports,
                          const GroundTruthManifest& manifest, const MatchConfig& config = {},
                          const DedupPolicy& policy = DedupPolicy::ensemble_default());

SubsetEvaluation evaluate_subset_detailed(const std::set<std::string>& members,
                                          const ReportSet& reports,
                                          const GroundTruthManifest& manifest,
                                          const MatchConfig& config = {},
                                          const DedupPolicy& policy = DedupPolicy::ensemble_default());

double objective_value(const SubsetEvaluation& eval, RankKey objective);

/// Ranking order: objective descending, then fewer members, then member names.
bool ranks_before(const SubsetEvaluation& a, const SubsetEvaluation& b, RankKey objective);

enum class SearchStrategy { exhaustive, greedy_reduction };

std::string_view to_string(SearchStrategy s);

struct CombinationRanking {
  RankKey objective = RankKey::f1;
  SearchStrategy strategy = SearchStrategy::exhaustive;
  std::vector<SubsetEvaluation> rows;  // every evaluated subset, best first
  std::vector<SubsetEvaluation> path;  // greedy: accepted subsets in visit order
  bool heuristic = false;
  std::optional<bool> optimal;  // set by flag_optimality

  const SubsetEvaluation& best() const { return rows.front(); }
  /// Greedy endpoint (last accepted subset); the best row for exhaustive.
  const SubsetEvaluation& endpoint() const { return path.empty() ? rows.front() : path.back(); }
};

inline constexpr std::size_t kMaxExhaustiveTools = 16;

/// Evaluates all 2^n - 1 non-empty subsets; n is capped at 16.
CombinationRanking search_exhaustive(const std::vector<std::string>& tools,
                                     const ReportSet& reports,
                                     const GroundTruthManifest& manifest,
                                     const MatchConfig& config, const DedupPolicy& policy,
                                     RankKey objective);

/// Starts from the full set and repeatedly drops the member whose removal
/// improves the objective most; stops when no removal improves it.
CombinationRanking search_greedy_reduction(const std::vector<std::string>& tools,
                                           const ReportSet& reports,
                                           const GroundTruthManifest& manifest,
                                           const MatchConfig& config, const DedupPolicy& policy,
                                           RankKey objective);

/// Marks `greedy.optimal` by comparing its endpoint with the exhaustive best.
void flag_optimality(CombinationRanking& greedy, const CombinationRanking& exhaustive);

/// "Best F-Score" etc. for rows that are best under some objective.
std::vector<std::string> best_type_labels(const std::vector<SubsetEvaluation>& rows,
                                          const SubsetEvaluation& row);

std::string render_ranking_text(const CombinationRanking& ranking, std::size_t top_k = 10);
nlohmann::ordered_json ranking_to_json(const CombinationRanking& ranking, std::size_t top_k = 0);

}  // namespace sastbench
