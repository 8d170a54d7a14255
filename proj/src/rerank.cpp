// SPDX-License-Identifier: Apache-2.0

#include "stepo/rerank.hpp"

#include <algorithm>

namespace stepo {

double preference_score(const DecisionPath& path, const PreferenceProfile& profile) {
    if (path.attributes.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& attr : path.attributes) {
        auto it = profile.attr_freq.find(attr);
        if (it != profile.attr_freq.end()) sum += it->second;
    }
    return sum / static_cast<double>(path.attributes.size());
}

double trend_score(const DecisionPath& path, const std::vector<TrendEntry>& trends) {
    if (path.attributes.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& attr : path.attributes) {
        double best = 0.0;
        for (const auto& t : trends)
            if (t.attribute_signature.count(attr)) best = std::max(best, t.weight);
        sum += best;
    }
    return sum / static_cast<double>(path.attributes.size());
}

RerankWeights adapt_weights(const PreferenceProfile& profile, const RerankConfig& config) {
    RerankWeights w;
    if (profile.cold_start()) {
        w.alpha = config.cold_start_alpha;
        w.beta = 1.0 - config.cold_start_alpha;
        return w;
    }
    w.beta = std::clamp(profile.trend_match_rate, config.clamp_lo, config.clamp_hi);
    w.alpha = 1.0 - w.beta;
    return w;
}

std::vector<ScoredCandidate> rerank(const std::vector<DecisionPath>& paths,
                                    const PreferenceProfile& profile,
                                    const std::vector<TrendEntry>& trends,
                                    const RerankConfig& config) {
    RerankWeights w = adapt_weights(profile, config);
    std::vector<ScoredCandidate> out;
    out.reserve(paths.size());
    for (const auto& p : paths) {
        ScoredCandidate c;
        c.path = p;
        c.preference = preference_score(p, profile);
        c.trend = trend_score(p, trends);
        c.final_score = w.alpha * c.preference + w.beta * c.trend;
        out.push_back(std::move(c));
    }
    // stable_sort keeps the incoming path order on ties.
    std::stable_sort(out.begin(), out.end(), [](const ScoredCandidate& a,
                                                const ScoredCandidate& b) {
        return a.final_score > b.final_score;
    });
    return out;
}

}  // namespace stepo
