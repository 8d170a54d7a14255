// SPDX-License-Identifier: Apache-2.0
//
// Hybrid knowledge retrieval: typical outfits by embedding similarity,
// scene/style constraint sets, color and silhouette pairing rules, user
// preference statistics, and fusion of all bundles into one deduplicated,
// conflict-resolved list.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stepo/kb.hpp"
#include "stepo/types.hpp"

namespace stepo {

enum class KnowledgeSource { Case, SceneStyle, ColorRule, SilhouetteRule, Preference, Trend };

std::string to_string(KnowledgeSource s);
KnowledgeSource knowledge_source_from_string(const std::string& s);

// Conflict-resolution priority, lower wins ties.
int source_priority(KnowledgeSource s);

struct KnowledgeItem {
    KnowledgeSource source = KnowledgeSource::Case;
    std::string ref_id;
    json payload;
    double relevance = 0.0;

    bool same_key(const KnowledgeItem& o) const {
        return source == o.source && ref_id == o.ref_id;
    }
};

struct KnowledgeConflict {
    std::string kept_source;
    std::string kept_ref;
    KnowledgeItem dropped;  // full copy; the loser is removed from items
    std::string reason;
};

struct FusedKnowledge {
    std::vector<KnowledgeItem> items;
    std::vector<KnowledgeConflict> conflicts;
    bool fuser_fallback = false;  // external fuser failed, deterministic result
};

struct PreferenceProfile {
    std::string user_id;
    std::map<std::string, double> attr_freq;
    std::map<std::string, double> style_freq;
    double trend_match_rate = 0.0;
    std::size_t history_size = 0;

    bool cold_start() const { return history_size == 0; }
};

struct CaseRetrieval {
    std::vector<KnowledgeItem> items;
    bool missing_embedding = false;  // anchor had no embedding; items empty
};

// Nearest cases to the anchor's embedding, wrapped as knowledge items with
// relevance = (cosine+1)/2. An anchor without an embedding yields an empty
// list with the warning flag set so structured retrieval still proceeds.
CaseRetrieval retrieve_typical_outfits(const GarmentEntity& anchor, const KnowledgeBase& kb,
                                       std::size_t k);

// Constraint sets for styles whose matrix compatibility with the scenario
// clears the threshold; relevance = matrix value. `candidates` narrows the
// styles considered (empty = every matrix column). Throws StepoError on an
// unknown scenario.
std::vector<KnowledgeItem> retrieve_scene_style(const std::string& scenario,
                                                const std::vector<std::string>& candidates,
                                                const KnowledgeBase& kb,
                                                double threshold = 0.6);

// Color items per harmony scheme around the anchor's color (the neutral
// scheme appears only for near-achromatic anchors) and silhouette items per
// candidate shape weighted by the shape compatibility grid. Families with no
// global rule in the KB are skipped entirely.
std::vector<KnowledgeItem> retrieve_pairing_rules(const GarmentEntity& anchor,
                                                  const KnowledgeBase& kb);

// Per-attribute and per-style occurrence fractions over the history, plus
// the fraction of outfits touching any trend signature.
PreferenceProfile user_preference_stats(const std::string& user_id,
                                        const std::vector<std::vector<GarmentEntity>>& history,
                                        const KnowledgeBase& kb);

// Preference items derived from a profile (top attribute frequencies), so
// preferences ride the same fusion path as the other sources.
std::vector<KnowledgeItem> preference_items(const PreferenceProfile& profile,
                                            std::size_t top_n = 8);

// Trend items for the KB's trend entries, relevance = trend weight.
std::vector<KnowledgeItem> trend_items(const KnowledgeBase& kb);

// External fuser hook: returns the fused result or nullopt/throws to decline,
// in which case the deterministic fuser runs and the fallback flag is set.
using Fuser = std::function<std::optional<FusedKnowledge>(const std::vector<KnowledgeItem>&)>;

// Deterministic fusion: deduplicate by (source, ref_id) keeping max
// relevance; two items constraining the same attribute to disjoint values
// conflict, dropping the lower relevance (priority order on ties). Output
// sorted by relevance desc, then source priority, then ref_id.
FusedKnowledge fuse_knowledge(const std::vector<std::vector<KnowledgeItem>>& bundles,
                              const Fuser& external = nullptr);

}  // namespace stepo
