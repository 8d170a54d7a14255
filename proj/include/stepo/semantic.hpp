// SPDX-License-Identifier: Apache-2.0
//
// Semantic layer: the style-rule bipartite graph, the outfit case library,
// style inference from principle activations, and nearest-case lookup over
// the embedding store.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stepo/types.hpp"

namespace stepo {

// Raised when an inference query touches no positively weighted evidence.
class NoEvidenceError : public StepoError {
public:
    using StepoError::StepoError;
};

struct StyleRuleGraph {
    std::vector<std::string> style_vertices;
    std::vector<std::string> principle_vertices;
    std::map<std::pair<std::string, std::string>, double> edges;  // (style, principle) -> w
    double lambda = 0.5;
    double activation_threshold = 0.5;

    // Raw per-(style,principle) constraint strengths, normalized by the
    // global max during build. Kept so the graph can be rebuilt and cached
    // edges revalidated.
    std::map<std::pair<std::string, std::string>, double> strengths;
};

struct Case {
    std::string id;
    std::optional<std::size_t> embedding_ref;
    std::string text;
    std::map<std::string, double> style_vector;      // style id -> [0,1]
    std::map<std::string, double> principle_vector;  // principle id -> [0,1]
    std::vector<std::string> item_ids;
};

struct CaseLibrary {
    std::vector<Case> cases;

    const Case* find(const std::string& id) const;
};

// w = lambda*freq + (1-lambda)*strength. Throws StepoError when any input
// leaves [0,1].
double edge_weight(double freq, double strength, double lambda);

// freq(style, principle) = fraction of cases with style_vector[style] >=
// activation_threshold whose principle_vector[principle] also clears it.
// Strengths are normalized by their global maximum. A pair with only one
// component present uses that component alone; a pair with neither is
// omitted, as are zero-weight edges.
StyleRuleGraph build_graph(const CaseLibrary& cases,
                           const std::map<std::pair<std::string, std::string>, double>& strengths,
                           double lambda, double activation_threshold = 0.5);

// P(s|p) = sum_j w(s,p_j)*p[j] / sum_s' sum_j w(s',p_j)*p[j]. Output sums to
// 1 within 1e-9. Throws NoEvidenceError on a zero denominator.
std::map<std::string, double> infer_styles(const StyleRuleGraph& graph,
                                           const std::map<std::string, double>& p_vec);

// Top-k cases by cosine similarity against the query, descending, ties by
// ascending case id. Cases without an embedding are skipped; zero-norm
// vectors score 0. Throws StepoError on dimension mismatch or an empty
// library.
std::vector<std::pair<std::string, double>> nearest_cases(std::span<const float> query,
                                                          const CaseLibrary& lib,
                                                          const EmbeddingStore& store,
                                                          std::size_t k);

// Single-threaded reference for the parallel scan inside nearest_cases.
std::vector<std::pair<std::string, double>> nearest_cases_serial(std::span<const float> query,
                                                                 const CaseLibrary& lib,
                                                                 const EmbeddingStore& store,
                                                                 std::size_t k);

// Cosine of two equal-length vectors; 0 when either norm is 0.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace stepo
