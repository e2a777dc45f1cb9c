#pragma once

namespace sastbench::detail {

extern const char* const kDefaultTaxonomyJson;
extern const char* const kScorecardTaxonomyJson;
extern const char* const kSonarqubeRuleMapJson;
extern const char* const kPmdRuleMapJson;
extern const char* const kSpotbugsRuleMapJson;

}  // namespace sastbench::detail
