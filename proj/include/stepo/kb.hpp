// SPDX-License-Identifier: Apache-2.0
//
// Knowledge base container and its on-disk directory format.
//
// A KB directory holds:
//   entities.json              array of garment records
//   semantics.json             array of style/scenario entities
//   rules.json                 array of coordination constraints
//   principle_params.json      scoring parameters (see principles.hpp)
//   graph.json                 style-rule graph inputs (+ optional cached edges)
//   cases.jsonl                one outfit case per line
//   trends.json                array of trend entries
//   scenario_style_matrix.json compatibility grid
//   embeddings.meta.json       {dim, count, ids}
//   embeddings.bin             row-major little-endian float32, count x dim
//
// load_kb parses and validates; the returned KnowledgeBase is treated as
// immutable and is safe to share across threads.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stepo/principles.hpp"
#include "stepo/semantic.hpp"
#include "stepo/types.hpp"

namespace stepo {

struct KnowledgeBase {
    std::vector<GarmentEntity> entities;
    std::vector<SemanticEntity> semantics;
    std::vector<RuleAttribute> rules;
    PrincipleParams principle_params;
    StyleRuleGraph graph;
    CaseLibrary cases;
    std::vector<TrendEntry> trends;
    ScenarioStyleMatrix matrix;
    EmbeddingStore embeddings;

    // Edges as read from graph.json, when that file carried a cache. The
    // live graph.edges are always rebuilt; validation compares the two.
    std::optional<std::map<std::pair<std::string, std::string>, double>> cached_edges;

    const GarmentEntity* find_entity(const std::string& id) const;
    const SemanticEntity* find_semantic(const std::string& id) const;
};

struct ValidationFinding {
    std::string locus;    // "file#record" or entity id
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }
};

struct LoadOptions {
    // Derive Lab from HCL (L, C*cos h, C*sin h) when a record has no "lab".
    bool derive_lab = true;
};

// Parse every file without cross-record validation. Malformed JSON or a
// record missing required fields still throws KbError with a file#record
// locus; out-of-range values and dangling references are left for
// validate_kb so they can be reported in bulk.
KnowledgeBase load_kb_unchecked(const std::filesystem::path& root,
                                const LoadOptions& opts = {});

// One finding per violated invariant: value ranges, unique ids, dangling
// references, weight sums, matrix shape, embedding shape.
ValidationReport validate_kb(const KnowledgeBase& kb);

// load_kb_unchecked + validate_kb; throws KbError listing the first finding
// (and the total count) if validation fails. Also rebuilds graph edges and
// verifies any cached ones.
KnowledgeBase load_kb(const std::filesystem::path& root, const LoadOptions& opts = {});

// Write the KB back out in canonical form (sorted keys, 2-space indent,
// trailing newline). serialize_kb followed by load_kb is byte-stable.
void serialize_kb(const KnowledgeBase& kb, const std::filesystem::path& root);

// Semantic entities whose attribute signature is fully contained in the
// entity's effective descriptors. Throws StepoError if the entity is unknown.
std::vector<SemanticEntity> project(const GarmentEntity& entity, const KnowledgeBase& kb);

// Single-record garment forms, shared with dataset ingestion and generators.
// Lab coordinates and temperature are derived when absent (see LoadOptions).
GarmentEntity entity_from_json(const json& j, bool derive_lab = true);
json entity_to_json(const GarmentEntity& e);

}  // namespace stepo
