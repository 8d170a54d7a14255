// SPDX-License-Identifier: Apache-2.0
//
// End-to-end orchestration: knowledge gathering, tree search, re-ranking,
// candidate materialization and explanation replay for one request.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stepo/explain.hpp"
#include "stepo/kb.hpp"
#include "stepo/reasoning.hpp"
#include "stepo/rerank.hpp"
#include "stepo/retrieval.hpp"

namespace stepo {

struct PipelineOptions {
    SearchConfig search;
    RerankConfig rerank;
    bool use_retrieval = true;
    bool use_rerank = true;
    std::size_t case_k = 5;
    std::size_t materialize_n = 20;
    Fuser external_fuser;  // optional; deterministic fusion otherwise
};

struct RecommendationResult {
    SearchResult search;
    FusedKnowledge fused;
    std::vector<ScoredCandidate> ranked;
    RerankWeights weights;
    std::vector<std::pair<std::string, double>> items;  // materialized for the top path
    ExplanationReport report;
};

// Retrieval fan-out for one anchor: typical outfits, scene/style rules for
// every scenario, pairing rules, preference and trend items, fused. The
// anchor's embedding reference is rebound to the KB store by id when absent.
FusedKnowledge gather_knowledge(const GarmentEntity& anchor, const PreferenceProfile& profile,
                                const KnowledgeBase& kb, const PipelineOptions& opts);

// Re-derives each winning-path node's context and policy scores so the
// explanation shows the alternatives as the search saw them.
std::vector<NodeExplanation> replay_path(const DecisionPath& path, const StylingRequest& request,
                                         DecisionPolicy& policy, const KnowledgeBase& kb,
                                         const SearchConfig& config);

RecommendationResult recommend(const KnowledgeBase& kb, const GarmentEntity& anchor,
                               const PreferenceProfile& profile, DecisionPolicy& policy,
                               const PipelineOptions& opts);

// Builds a preference profile for --user from an optional dataset directory;
// unknown or absent history yields a cold-start profile.
PreferenceProfile profile_for_user(const std::string& user_id,
                                   const std::optional<std::filesystem::path>& dataset_dir,
                                   const KnowledgeBase& kb);

}  // namespace stepo
