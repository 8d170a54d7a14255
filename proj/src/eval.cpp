// SPDX-License-Identifier: Apache-2.0

#include "stepo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

#include "stepo/pipeline.hpp"
#include "stepo/principles.hpp"

namespace stepo {

namespace fs = std::filesystem;

const GarmentEntity* Dataset::find_item(const std::string& id) const {
    for (const auto& e : item_pool)
        if (e.id == id) return &e;
    return nullptr;
}

namespace {

// FNV-1a, so per-user split streams are stable across platforms.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StepoError("missing dataset file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw StepoError(path.filename().string() + ": malformed JSON: " + e.what());
    }
}

bool outfit_usable(const OutfitRecord& o,
                   const std::unordered_map<std::string, const GarmentEntity*>& pool) {
    if (o.item_ids.size() < 2) return false;
    std::size_t tops = 0, bottoms = 0;
    for (const auto& id : o.item_ids) {
        auto it = pool.find(id);
        if (it == pool.end()) return false;
        if (it->second->role == Role::Top) ++tops;
        if (it->second->role == Role::Bottom) ++bottoms;
    }
    return tops >= 1 && bottoms == 1;
}

}  // namespace

Dataset ingest_dataset(const fs::path& root, const IngestOptions& opts) {
    if (opts.split_ratio <= 0.0 || opts.split_ratio >= 1.0)
        throw StepoError("split_ratio must lie in (0, 1)");
    Dataset ds;
    ds.split_seed = opts.seed;

    json items = read_json(root / "items.json");
    if (!items.is_array()) throw StepoError("items.json: expected a top-level array");
    for (std::size_t i = 0; i < items.size(); ++i) {
        try {
            ds.item_pool.push_back(entity_from_json(items[i]));
        } catch (const std::exception& e) {
            throw StepoError("items.json#" + std::to_string(i) + ": " + e.what());
        }
    }
    std::unordered_map<std::string, const GarmentEntity*> pool;
    for (const auto& e : ds.item_pool) pool[e.id] = &e;

    fs::path users_dir = root / "users";
    if (!fs::is_directory(users_dir)) throw StepoError("missing dataset directory: users/");
    std::vector<std::string> user_ids;
    for (const auto& entry : fs::directory_iterator(users_dir))
        if (entry.is_directory()) user_ids.push_back(entry.path().filename().string());
    std::sort(user_ids.begin(), user_ids.end());

    for (const auto& uid : user_ids) {
        json arr = read_json(users_dir / uid / "outfits.json");
        if (!arr.is_array())
            throw StepoError("users/" + uid + "/outfits.json: expected a top-level array");
        std::vector<OutfitRecord> kept;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& j = arr[i];
            OutfitRecord rec;
            try {
                rec.outfit_id = j.at("outfit_id").get<std::string>();
                for (const auto& id : j.at("item_ids")) rec.item_ids.push_back(id.get<std::string>());
            } catch (const std::exception& e) {
                throw StepoError("users/" + uid + "/outfits.json#" + std::to_string(i) + ": " +
                                 e.what());
            }
            if (outfit_usable(rec, pool)) kept.push_back(std::move(rec));
        }
        if (kept.size() < opts.min_outfits) continue;

        std::mt19937_64 rng(opts.seed ^ fnv1a(uid));
        std::shuffle(kept.begin(), kept.end(), rng);
        auto train_n = static_cast<std::size_t>(std::llround(opts.split_ratio * double(kept.size())));
        train_n = std::clamp<std::size_t>(train_n, 1, kept.size() - 1);
        DatasetUser user;
        user.user_id = uid;
        user.train.assign(kept.begin(), kept.begin() + long(train_n));
        user.test.assign(kept.begin() + long(train_n), kept.end());
        ds.users.push_back(std::move(user));
    }
    if (ds.users.empty())
        throw StepoError("dataset has no user with at least " + std::to_string(opts.min_outfits) +
                         " usable outfits");
    return ds;
}

std::vector<std::pair<std::string, double>> materialize_candidates(
    const std::set<std::string>& attributes, const std::vector<GarmentEntity>& pool,
    std::size_t n) {
    if (pool.empty()) throw StepoError("cannot materialize candidates from an empty pool");
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(pool.size());
    for (const auto& e : pool) {
        std::set<std::string> desc = effective_descriptors(e);
        std::size_t hits = 0;
        for (const auto& a : attributes)
            if (desc.count(a)) ++hits;
        double match = attributes.empty() ? 0.0 : double(hits) / double(attributes.size());
        scored.emplace_back(e.id, match);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

double recall_at_k(const std::vector<RankedList>& lists, std::size_t k) {
    if (lists.empty()) throw StepoError("recall_at_k over zero lists");
    std::size_t hit = 0;
    for (const auto& l : lists) {
        std::size_t upto = std::min(k, l.ranked_ids.size());
        for (std::size_t i = 0; i < upto; ++i)
            if (l.truth_ids.count(l.ranked_ids[i])) {
                ++hit;
                break;
            }
    }
    return double(hit) / double(lists.size());
}

double mean_average_precision(const std::vector<RankedList>& lists, MapMode mode) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& l : lists) {
        if (l.truth_ids.empty()) continue;  // undefined AP, excluded
        double ap = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < l.ranked_ids.size(); ++i) {
            if (!l.truth_ids.count(l.ranked_ids[i])) continue;
            ++hits;
            double p_at_k = double(hits) / double(i + 1);
            ap += mode == MapMode::Standard ? p_at_k : p_at_k / double(i + 1);
        }
        sum += ap / double(l.truth_ids.size());
        ++counted;
    }
    if (counted == 0) throw StepoError("mean_average_precision: no list has ground truth");
    return sum / double(counted);
}

std::string to_string(PipelineConfig c) {
    switch (c) {
        case PipelineConfig::Full: return "full";
        case PipelineConfig::NoRetrieval: return "no-retrieval";
        case PipelineConfig::NoRerank: return "no-rerank";
        case PipelineConfig::ReasoningOnly: return "reasoning-only";
    }
    throw StepoError("unreachable pipeline config");
}

PipelineConfig pipeline_config_from_string(const std::string& s) {
    if (s == "full") return PipelineConfig::Full;
    if (s == "no-retrieval") return PipelineConfig::NoRetrieval;
    if (s == "no-rerank") return PipelineConfig::NoRerank;
    if (s == "reasoning-only") return PipelineConfig::ReasoningOnly;
    throw StepoError("unknown pipeline config: \"" + s + "\"");
}

json eval_report_to_json(const EvalReport& r) {
    json recall = json::object();
    for (const auto& [k, v] : r.recall) recall[std::to_string(k)] = v;
    return json{{"config", r.config},
                {"failures", r.failures},
                {"map_paper_literal", r.map_paper_literal},
                {"map_standard", r.map_standard},
                {"n_samples", r.n_samples},
                {"recall", recall}};
}

namespace {

struct Sample {
    std::size_t user_index;
    std::string anchor_id;
    std::string truth_id;
};

struct SampleOutcome {
    bool ok = false;
    RankedList list;
};

SampleOutcome run_sample(const Sample& s, const Dataset& ds, const KnowledgeBase& kb,
                         const std::vector<PreferenceProfile>& profiles,
                         const std::vector<GarmentEntity>& bottoms, PipelineConfig config,
                         const BenchmarkOptions& opts) {
    SampleOutcome out;
    const GarmentEntity* anchor = ds.find_item(s.anchor_id);
    if (!anchor) return out;
    const PreferenceProfile& profile = profiles[s.user_index];

    PipelineOptions popts;
    popts.search = opts.search;
    popts.rerank = opts.rerank;
    popts.case_k = opts.case_k;
    popts.materialize_n = opts.materialize_n;
    popts.use_retrieval =
        config == PipelineConfig::Full || config == PipelineConfig::NoRerank;
    popts.use_rerank = config == PipelineConfig::Full || config == PipelineConfig::NoRetrieval;

    StylingRequest request;
    request.user = profile;
    request.anchor = *anchor;
    request.config = popts.search;
    if (popts.use_retrieval)
        request.knowledge = gather_knowledge(*anchor, profile, kb, popts);

    DeterministicPolicy policy(kb);
    SearchResult search = run_tree_search(request, policy, kb);

    std::vector<DecisionPath> ordered;
    if (popts.use_rerank) {
        auto ranked = rerank(search.paths, profile, kb.trends, popts.rerank);
        ordered.reserve(ranked.size());
        for (auto& c : ranked) ordered.push_back(std::move(c.path));
    } else {
        ordered = search.paths;
    }

    std::set<std::string> seen;
    for (const auto& path : ordered) {
        for (auto& [id, match] : materialize_candidates(path.attributes, bottoms,
                                                        opts.materialize_n)) {
            if (out.list.ranked_ids.size() >= opts.materialize_n) break;
            if (seen.insert(id).second) out.list.ranked_ids.push_back(id);
        }
        if (out.list.ranked_ids.size() >= opts.materialize_n) break;
    }
    out.list.truth_ids = {s.truth_id};
    out.ok = true;
    return out;
}

}  // namespace

std::vector<EvalReport> run_benchmark(const Dataset& dataset, const KnowledgeBase& kb,
                                      const BenchmarkOptions& opts) {
    // Profiles come from train outfits only; test outfits supply the samples.
    std::vector<PreferenceProfile> profiles(dataset.users.size());
    std::vector<Sample> samples;
    for (std::size_t u = 0; u < dataset.users.size(); ++u) {
        const DatasetUser& user = dataset.users[u];
        std::vector<std::vector<GarmentEntity>> history;
        for (const auto& o : user.train) {
            std::vector<GarmentEntity> outfit;
            for (const auto& id : o.item_ids)
                if (const GarmentEntity* e = dataset.find_item(id)) outfit.push_back(*e);
            history.push_back(std::move(outfit));
        }
        profiles[u] = user_preference_stats(user.user_id, history, kb);

        for (const auto& o : user.test) {
            std::vector<std::string> tops;
            std::string bottom;
            for (const auto& id : o.item_ids) {
                const GarmentEntity* e = dataset.find_item(id);
                if (!e) continue;
                if (e->role == Role::Top) tops.push_back(id);
                if (e->role == Role::Bottom) bottom = id;
            }
            if (tops.empty() || bottom.empty()) continue;
            std::sort(tops.begin(), tops.end());
            samples.push_back({u, tops.front(), bottom});
        }
    }
    if (samples.empty()) throw StepoError("dataset yields no evaluation sample");

    std::vector<GarmentEntity> bottoms;
    for (const auto& e : dataset.item_pool)
        if (e.role == Role::Bottom) bottoms.push_back(e);

    std::vector<EvalReport> reports;
    for (PipelineConfig config : opts.configs) {
        std::vector<SampleOutcome> outcomes(samples.size());
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < long(samples.size()); ++i) {
            try {
                outcomes[std::size_t(i)] =
                    run_sample(samples[std::size_t(i)], dataset, kb, profiles, bottoms, config,
                               opts);
            } catch (const std::exception&) {
                outcomes[std::size_t(i)].ok = false;
            }
        }
        EvalReport report;
        report.config = to_string(config);
        std::vector<RankedList> lists;
        for (auto& o : outcomes) {
            if (o.ok)
                lists.push_back(std::move(o.list));
            else
                ++report.failures;
        }
        report.n_samples = lists.size();
        if (!lists.empty()) {
            for (std::size_t k : opts.ks) report.recall[k] = recall_at_k(lists, k);
            report.map_standard = mean_average_precision(lists, MapMode::Standard);
            report.map_paper_literal = mean_average_precision(lists, MapMode::PaperLiteral);
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

double default_compatibility(const GarmentEntity& top, const GarmentEntity& bottom,
                             const PrincipleParams& params,
                             const std::vector<StyleConstraintSet>& gates) {
    AttributeSet attrs = outfit_attributes(top, bottom);
    for (const auto& g : gates) {
        try {
            if (!check_style(attrs, g)) return 0.0;
        } catch (const StepoError&) {
            return 0.0;  // a gate the pair cannot even express is failed
        }
    }
    double sil = score_silhouette_pair(top.silhouette, bottom.silhouette, params).total;
    double col = score_color_pair(top.color, bottom.color, params).total;
    return 0.5 * (sil + col);
}

}  // namespace stepo
