// SPDX-License-Identifier: Apache-2.0
//
// Offline evaluation: dataset ingestion with per-user deterministic splits,
// attribute-to-item candidate materialization, Recall@K and MAP (standard
// and literal variants), and ablation benchmark runs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stepo/kb.hpp"
#include "stepo/reasoning.hpp"
#include "stepo/rerank.hpp"

namespace stepo {

struct OutfitRecord {
    std::string outfit_id;
    std::vector<std::string> item_ids;
};

struct DatasetUser {
    std::string user_id;
    std::vector<OutfitRecord> train;
    std::vector<OutfitRecord> test;
};

struct Dataset {
    std::vector<DatasetUser> users;
    std::vector<GarmentEntity> item_pool;
    std::uint64_t split_seed = 0;

    const GarmentEntity* find_item(const std::string& id) const;
};

struct IngestOptions {
    std::size_t min_outfits = 10;  // desk scale; the reference setting is 250
    double split_ratio = 0.8;
    std::uint64_t seed = 0;
};

// Layout: items.json (garment array) + users/<id>/outfits.json (array of
// {outfit_id, item_ids}). Keeps outfits with >= 2 items, >= 1 top and
// exactly 1 bottom, all resolvable; drops users below min_outfits; shuffles
// per user with a seed-derived generator and splits at split_ratio.
Dataset ingest_dataset(const std::filesystem::path& root, const IngestOptions& opts);

struct RankedList {
    std::vector<std::string> ranked_ids;
    std::set<std::string> truth_ids;
};

// Pool items ranked by |item descriptors ∩ attributes| / |attributes|,
// ties by id, top n. Throws StepoError on an empty pool.
std::vector<std::pair<std::string, double>> materialize_candidates(
    const std::set<std::string>& attributes, const std::vector<GarmentEntity>& pool,
    std::size_t n);

// Fraction of lists with any truth in the top k.
double recall_at_k(const std::vector<RankedList>& lists, std::size_t k);

enum class MapMode { Standard, PaperLiteral };

// Standard: AP = (1/n_i) sum P@k over relevant ranks. The literal variant
// divides each term by k as well (the printed formula differs from standard
// AP; both are available, standard is the default elsewhere). Lists with no
// truths are excluded.
double mean_average_precision(const std::vector<RankedList>& lists, MapMode mode);

enum class PipelineConfig { Full, NoRetrieval, NoRerank, ReasoningOnly };

std::string to_string(PipelineConfig c);
PipelineConfig pipeline_config_from_string(const std::string& s);

struct EvalReport {
    std::string config;
    std::size_t n_samples = 0;
    std::map<std::size_t, double> recall;
    double map_standard = 0.0;
    double map_paper_literal = 0.0;
    std::size_t failures = 0;
};

json eval_report_to_json(const EvalReport& r);

struct BenchmarkOptions {
    std::vector<PipelineConfig> configs = {PipelineConfig::Full};
    std::vector<std::size_t> ks = {1, 3, 5, 10};
    SearchConfig search;
    RerankConfig rerank;
    std::size_t case_k = 5;          // typical outfits fetched per anchor
    std::size_t materialize_n = 20;  // candidate list depth
};

// One report per config. Sample = (anchor top, ground-truth bottom) from
// each held-out outfit; candidates come from the ranked paths' attribute
// sets materialized over the complementary-role slice of the item pool.
// Per-sample failures are excluded from metrics and counted.
std::vector<EvalReport> run_benchmark(const Dataset& dataset, const KnowledgeBase& kb,
                                      const BenchmarkOptions& opts);

// Pluggable pair-compatibility hook. The default is the mean of the
// silhouette and color pair totals, zeroed when any gate set fails.
using CompatibilityHook = std::function<double(const GarmentEntity&, const GarmentEntity&)>;

double default_compatibility(const GarmentEntity& top, const GarmentEntity& bottom,
                             const PrincipleParams& params,
                             const std::vector<StyleConstraintSet>& gates = {});

}  // namespace stepo
