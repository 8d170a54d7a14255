// SPDX-License-Identifier: Apache-2.0
//
// Multi-step recommendation tree search. Each level of the search decides
// one typed attribute of the complementary garment (scenario, style, color
// scheme, ...). A pluggable policy scores the candidate actions at every
// node from a dynamically built context; beam search keeps the best partial
// paths and returns ranked complete attribute sets.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stepo/kb.hpp"
#include "stepo/retrieval.hpp"
#include "stepo/types.hpp"

namespace stepo {

inline const std::vector<std::string> kDefaultTypeSequence = {
    "scenario", "style", "color_scheme", "silhouette_pairing",
    "category", "color_value", "fit",    "length"};

struct SearchConfig {
    std::size_t beam_width = 3;
    std::size_t branching_cap = 8;
    std::vector<std::string> type_sequence = kDefaultTypeSequence;
    double scene_style_threshold = 0.6;
};

struct ActionSpace {
    std::string dtype;
    std::vector<std::string> actions;  // unique, ordered by descending prior
};

struct DecisionNode {
    std::string id;      // path-indexed: "n0", "n0.2", "n0.2.1", ...
    std::string dtype;   // empty for the root
    std::vector<std::pair<std::string, std::string>> state;  // decisions up to and incl. this one
    std::string chosen;
    std::vector<std::string> children;
    std::vector<RuleAttribute> edge_constraints;  // imposed on later levels by this choice
    double score = 1.0;  // normalized policy score of `chosen`
};

DecisionNode make_root_node();

struct Context {
    std::vector<std::pair<std::string, std::string>> path_prefix;  // ancestor (dtype, choice)
    FusedKnowledge knowledge;            // filtered to the node type's sources
    std::map<std::string, double> preferences;  // profile slice for the node type
    json anchor_features;
    std::vector<RuleAttribute> edge_constraints;  // accumulated along the path
    std::optional<ActionSpace> actions;  // filled after enumeration; transition validates against it
};

struct DecisionPath {
    std::vector<DecisionNode> nodes;   // one per decision type, in sequence order
    std::set<std::string> attributes;  // V*: descriptor form of every choice
    double path_score = 0.0;           // geometric mean of per-step scores
};

struct StylingRequest {
    PreferenceProfile user;
    GarmentEntity anchor;
    FusedKnowledge knowledge;
    SearchConfig config;
};

struct PruneEvent {
    std::string node_id;
    std::string dtype;
    std::string reason;
};

struct SearchResult {
    std::vector<DecisionPath> paths;  // descending path_score
    std::vector<PruneEvent> pruned;
    std::vector<std::string> policy_fallbacks;
};

// Raised when every branch of the search dies; carries the pruning trace.
class NoFeasibleOutfitError : public StepoError {
public:
    NoFeasibleOutfitError(const std::string& msg, std::vector<PruneEvent> pruned)
        : StepoError(msg), pruned_(std::move(pruned)) {}
    const std::vector<PruneEvent>& pruned() const { return pruned_; }

private:
    std::vector<PruneEvent> pruned_;
};

// Normalized-distribution source for one decision node. Implementations live
// in policy.hpp; anything conforming can drive the search.
class DecisionPolicy {
public:
    virtual ~DecisionPolicy() = default;
    virtual std::map<std::string, double> score(const Context& context, const ActionSpace& actions,
                                                const std::string& session_id,
                                                const std::string& node_id) = 0;
    // Fallback events accumulated so far (external adapters only).
    virtual std::vector<std::string> fallback_events() const { return {}; }
};

// Descriptor form of one decision, e.g. ("fit","loose") -> "loose fit".
// These strings are the elements of V* and match effective_descriptors.
std::string decision_descriptor(const std::string& dtype, const std::string& value);

// Dtype family of a preference descriptor; used to slice profiles per node.
std::map<std::string, double> preference_slice(const std::string& dtype,
                                               const PreferenceProfile& profile);

// JSON summary of the anchor consumed by policies (including external ones).
json anchor_features_json(const GarmentEntity& anchor);

// Context for deciding `node.dtype` at `node`: ancestor decisions, knowledge
// filtered to the sources relevant for the type, preference slice, anchor
// summary, and the edge constraints accumulated along the path.
Context build_context(const DecisionNode& node, const StylingRequest& request);

// Candidate actions for a decision type, ordered by descending prior
// relevance and capped at config.branching_cap. Throws StepoError when the
// KB yields no action (a knowledge gap).
ActionSpace enumerate_actions(const std::string& dtype, const Context& context,
                              const KnowledgeBase& kb, const SearchConfig& config);

// Constraints a choice imposes on later levels (a color scheme bounds the
// hue difference of the color value, a style attaches its rule set).
std::vector<RuleAttribute> edge_constraints_for(const std::string& dtype,
                                                const std::string& choice,
                                                const KnowledgeBase& kb);

// Child node for `choice`: state extends the parent by exactly this
// decision. Throws StepoError when choice is not in context.actions.
DecisionNode transition(const DecisionNode& parent, const std::string& choice,
                        const Context& context, const KnowledgeBase& kb);

// Raw (pre-normalization) policy score: principle * support * preference.
double combine_policy_factors(double principle, double case_support, double preference);

// True when the item's ref or payload mentions the action, bare or in
// descriptor form. Drives the policy's case-support factor and evidence
// selection in explanations.
bool knowledge_endorses(const KnowledgeItem& item, const std::string& dtype,
                        const std::string& action);

// Default policy: principle compliance x case support x preference factor,
// epsilon-floored and normalized to a distribution.
class DeterministicPolicy : public DecisionPolicy {
public:
    explicit DeterministicPolicy(const KnowledgeBase& kb) : kb_(kb) {}
    std::map<std::string, double> score(const Context& context, const ActionSpace& actions,
                                        const std::string& session_id,
                                        const std::string& node_id) override;

private:
    const KnowledgeBase& kb_;
};

// Beam search over the configured type sequence. Partial paths are ranked by
// the geometric mean of their per-step scores; ties by lexicographic
// attribute set. Branches with empty action spaces are pruned; when all die,
// NoFeasibleOutfitError carries the pruning trace.
SearchResult run_tree_search(const StylingRequest& request, DecisionPolicy& policy,
                             const KnowledgeBase& kb);

}  // namespace stepo
