// SPDX-License-Identifier: Apache-2.0
//
// Preference-trend re-ranking of candidate decision paths:
// final = alpha * preference + beta * trend, with (alpha, beta) adapted to
// how closely the user's history tracks active trends.

#pragma once

#include <vector>

#include "stepo/reasoning.hpp"
#include "stepo/retrieval.hpp"

namespace stepo {

struct RerankWeights {
    double alpha = 0.7;
    double beta = 0.3;
};

struct RerankConfig {
    double clamp_lo = 0.1;
    double clamp_hi = 0.9;
    double cold_start_alpha = 0.7;
};

struct ScoredCandidate {
    DecisionPath path;
    double preference = 0.0;
    double trend = 0.0;
    double final_score = 0.0;
};

// Mean attr_freq over the path's attribute descriptors; attributes the
// profile has never seen count as 0.
double preference_score(const DecisionPath& path, const PreferenceProfile& profile);

// Each path attribute contributes the max weight among trends whose
// signature contains it; total divided by the attribute count.
double trend_score(const DecisionPath& path, const std::vector<TrendEntry>& trends);

// beta = clamp(trend_match_rate, clamp_lo, clamp_hi), alpha = 1 - beta;
// cold-start users get (cold_start_alpha, 1 - cold_start_alpha).
RerankWeights adapt_weights(const PreferenceProfile& profile, const RerankConfig& config);

// Descending final score; ties keep the incoming (tree-search) order, then
// lexicographic attribute sets.
std::vector<ScoredCandidate> rerank(const std::vector<DecisionPath>& paths,
                                    const PreferenceProfile& profile,
                                    const std::vector<TrendEntry>& trends,
                                    const RerankConfig& config);

}  // namespace stepo
