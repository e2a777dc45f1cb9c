#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sastbench/matcher.hpp"

namespace sastbench {

enum class Degenerate { no_positives_reported, no_flaws_in_scope };

std::string_view to_string(Degenerate flag);

struct ScoreCard {
  Counts counts;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  std::set<Degenerate> degenerate;
};

/// Recall, precision and F1 from counts. A zero denominator reports the
/// affected metric as 0 and raises the matching flag; TN never enters.
ScoreCard score(const Counts& counts);

/// One card per taxonomy class, in taxonomy order.
std::vector<std::pair<std::string, ScoreCard>> score_by_class(const MatchResult& result);

enum class RankKey { f1, precision, recall, detections };

std::string_view to_string(RankKey key);
std::optional<RankKey> parse_rank_key(std::string_view text);

struct ScorecardRow {
  std::string tool;
  std::size_t detections = 0;
  ScoreCard card;
};

struct ScorecardTable {
  RankKey key = RankKey::f1;
  std::vector<ScorecardRow> rows;  // best first
};

/// Ranks results that share one manifest; ties break on tool name.
/// Throws Error{manifest_mismatch} for mixed manifests.
ScorecardTable scorecard_table(const std::vector<MatchResult>& results, RankKey key = RankKey::f1);

std::string render_text(const ScorecardTable& table);
std::string render_csv(const ScorecardTable& table);
nlohmann::ordered_json to_json(const ScoreCard& card);
nlohmann::ordered_json to_json(const ScorecardTable& table);

/// Class x tool F1 grid.
std::string render_class_table(const std::vector<MatchResult>& results);
nlohmann::ordered_json class_table_json(const std::vector<MatchResult>& results);

/// Fixed-point formatting used by the text renderers.
std::string format_fixed(double value, int decimals);

}  // namespace sastbench
