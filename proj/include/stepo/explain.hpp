// SPDX-License-Identifier: Apache-2.0
//
// Decision-path explanations: deterministic template renders per node plus a
// report with forward (decision -> evidence) and backward (evidence ->
// decisions) trace indices. Rationales cite only evidence attached to the
// node, so hallucination-freedom is testable.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "stepo/reasoning.hpp"
#include "stepo/retrieval.hpp"

namespace stepo {

struct NodeExplanation {
    std::string node_id;
    std::string dtype;
    std::string chosen;
    std::vector<std::pair<std::string, double>> alternatives;  // score-descending
    std::vector<std::string> evidence;  // refs of the form "source:ref_id"
    std::string preference_note;
    std::string rationale_text;
};

struct ExplanationReport {
    json request_summary;
    std::vector<NodeExplanation> node_explanations;
    std::vector<std::string> related_cases;
    json profile_summary;
    std::map<std::string, std::vector<std::string>> index_forward;   // node -> evidence
    std::map<std::string, std::vector<std::string>> index_backward;  // evidence -> nodes
};

// Stable "source:ref_id" key for an item.
std::string evidence_ref(const KnowledgeItem& item);

// Template render for one finalized node: cites at most the top 3 endorsing
// items by relevance and the preference slice; no evidence yields a
// "principle-only" rationale.
NodeExplanation explain_node(const DecisionNode& node, const Context& context,
                             const std::map<std::string, double>& scores);

// Report over ordered node explanations with both trace indices built.
ExplanationReport assemble_report(const std::vector<NodeExplanation>& explanations,
                                  const std::vector<std::string>& related_cases,
                                  const PreferenceProfile& profile,
                                  const json& request_summary = json::object());

// node id -> its evidence refs; evidence ref -> all node ids citing it.
// Throws StepoError when the query is in neither index.
std::vector<std::string> trace_query(const ExplanationReport& report, const std::string& query);

json report_to_json(const ExplanationReport& report);
ExplanationReport report_from_json(const json& j);
std::string report_to_text(const ExplanationReport& report);

}  // namespace stepo
