#include "sastbench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sastbench/error.hpp"

namespace sastbench {

std::string_view to_string(Degenerate flag) {
  switch (flag) {
    case Degenerate::no_positives_reported: return "no-positives-reported";
    case Degenerate::no_flaws_in_scope: return "no-flaws-in-scope";
  }
  return "";
}

ScoreCard score(const Counts& counts) {
  ScoreCard card;
  card.counts = counts;
  const double tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fn > 0) {
    card.recall = tp / static_cast<double>(counts.tp + counts.fn);
  } else {
    card.degenerate.insert(Degenerate::no_flaws_in_scope);
  }
  if (counts.tp + counts.fp > 0) {
    card.precision = tp / static_cast<double>(counts.tp + counts.fp);
  } else {
    card.degenerate.insert(Degenerate::no_positives_reported);
  }
  if (card.recall + card.precision > 0.0) {
    card.f1 = 2.0 * card.recall * card.precision / (card.recall + card.precision);
  }
  return card;
}

std::vector<std::pair<std::string, ScoreCard>> score_by_class(const MatchResult& result) {
  std::vector<std::pair<std::string, ScoreCard>> out;
  out.reserve(result.class_order.size());
  for (const auto& label : result.class_order) {
    auto it = result.per_class.find(label);
    out.emplace_back(label, score(it == result.per_class.end() ? Counts{} : it->second));
  }
  return out;
}

std::string_view to_string(RankKey key) {
  switch (key) {
    case RankKey::f1: return "f1";
    case RankKey::precision: return "precision";
    case RankKey::recall: return "recall";
    case RankKey::detections: return "detections";
  }
  return "f1";
}

std::optional<RankKey> parse_rank_key(std::string_view text) {
  for (auto k : {RankKey::f1, RankKey::precision, RankKey::recall, RankKey::detections}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

double key_value(const ScorecardRow& row, RankKey key) {
  switch (key) {
    case RankKey::f1: return row.card.f1;
    case RankKey::precision: return row.card.precision;
    case RankKey::recall: return row.card.recall;
    case RankKey::detections: return static_cast<double>(row.detections);
  }
  return 0.0;
}

}  // namespace

ScorecardTable scorecard_table(const std::vector<MatchResult>& results, RankKey key) {
  ScorecardTable table;
  table.key = key;
  for (const auto& r : results) {
    if (r.manifest_ref != results.front().manifest_ref) {
      throw Error(ErrorKind::manifest_mismatch,
                  "results for " + r.subject + " and " + results.front().subject +
                      " were scored against different manifests");
    }
    table.rows.push_back(ScorecardRow{r.subject, r.detections, score(r.totals)});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [key](const ScorecardRow& a, const ScorecardRow& b) {
              double va = key_value(a, key);
              double vb = key_value(b, key);
              if (va != vb) return va > vb;
              return a.tool < b.tool;
            });
  return table;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

namespace {

std::string render_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      // First column left-aligned, numbers right-aligned.
      if (i == 0) {
        line += row[i] + std::string(width[i] - row[i].size(), ' ');
      } else {
        line += "  " + std::string(width[i] - row[i].size(), ' ') + row[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

std::string render_text(const ScorecardTable& table) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"tool", "detections", "tp", "fp", "fn", "recall", "precision", "f1"});
  for (const auto& r : table.rows) {
    rows.push_back({r.tool, std::to_string(r.detections), std::to_string(r.card.counts.tp),
                    std::to_string(r.card.counts.fp), std::to_string(r.card.counts.fn),
                    format_fixed(r.card.recall, 2), format_fixed(r.card.precision, 2),
                    format_fixed(r.card.f1, 2)});
  }
  return render_columns(rows);
}

std::string render_csv(const ScorecardTable& table) {
  std::ostringstream out;
  out << "tool,detections,tp,fp,fn,recall,precision,f1\n";
  for (const auto& r : table.rows) {
    std::string tool = r.tool;
    if (tool.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : tool) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      tool = quoted + "\"";
    }
    out << tool << ',' << r.detections << ',' << r.card.counts.tp << ',' << r.card.counts.fp
        << ',' << r.card.counts.fn << ',' << format_fixed(r.card.recall, 4) << ','
        << format_fixed(r.card.precision, 4) << ',' << format_fixed(r.card.f1, 4) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json to_json(const ScoreCard& card) {
  nlohmann::ordered_json j;
  j["tp"] = card.counts.tp;
  j["fp"] = card.counts.fp;
  j["tn"] = card.counts.tn;
  j["fn"] = card.counts.fn;
  j["recall"] = card.recall;
  j["precision"] = card.precision;
  j["f1"] = card.f1;
  j["degenerate"] = nlohmann::ordered_json::array();
  for (auto flag : card.degenerate) j["degenerate"].push_back(to_string(flag));
  return j;
}

nlohmann::ordered_json to_json(const ScorecardTable& table) {
  nlohmann::ordered_json j;
  j["rankedBy"] = to_string(table.key);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json row;
    row["tool"] = r.tool;
    row["detections"] = r.detections;
    const auto card = to_json(r.card);
    for (const auto& [k, v] : card.items()) row[k] = v;
    j["rows"].push_back(std::move(row));
  }
  return j;
}

std::string render_class_table(const std::vector<MatchResult>& results) {
  if (results.empty()) return {};
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"class"};
  for (const auto& r : results) header.push_back(r.subject);
  rows.push_back(std::move(header));
  const auto& order = results.front().class_order;
  for (const auto& label : order) {
    std::vector<std::string> row{label};
    for (const auto& r : results) {
      auto it = r.per_class.find(label);
      auto card = score(it == r.per_class.end() ? Counts{} : it->second);
      row.push_back(card.degenerate.contains(Degenerate::no_flaws_in_scope)
                        ? "-"
                        : format_fixed(card.f1, 2));
    }
    rows.push_back(std::move(row));
  }
  return render_columns(rows);
}

nlohmann::ordered_json class_table_json(const std::vector<MatchResult>& results) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  if (results.empty()) return j;
  for (const auto& label : results.front().class_order) {
    nlohmann::ordered_json row;
    row["class"] = label;
    row["tools"] = nlohmann::ordered_json::object();
    for (const auto& r : results) {
      auto it = r.per_class.find(label);
      row["tools"][r.subject] = to_json(score(it == r.per_class.end() ? Counts{} : it->second));
    }
    j.push_back(std::move(row));
  }
  return j;
}

}  // namespace sastbench
