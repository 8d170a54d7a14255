// SPDX-License-Identifier: Apache-2.0

#include "stepo/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "stepo/eval.hpp"

namespace stepo {

FusedKnowledge gather_knowledge(const GarmentEntity& anchor, const PreferenceProfile& profile,
                                const KnowledgeBase& kb, const PipelineOptions& opts) {
    GarmentEntity a = anchor;
    // The anchor's stored ref may index a foreign store (a dataset's); the KB
    // row found by id wins, and a ref with no KB row is dropped.
    if (auto idx = kb.embeddings.index_of(a.id))
        a.embedding_ref = *idx;
    else if (a.embedding_ref && *a.embedding_ref >= kb.embeddings.count())
        a.embedding_ref.reset();

    std::vector<std::vector<KnowledgeItem>> bundles;
    bundles.push_back(retrieve_typical_outfits(a, kb, opts.case_k).items);

    std::vector<KnowledgeItem> scene;
    for (const auto& scenario : kb.matrix.scenarios) {
        auto items = retrieve_scene_style(scenario, {}, kb, opts.search.scene_style_threshold);
        scene.insert(scene.end(), items.begin(), items.end());
    }
    bundles.push_back(std::move(scene));
    bundles.push_back(retrieve_pairing_rules(a, kb));
    bundles.push_back(preference_items(profile));
    bundles.push_back(trend_items(kb));
    return fuse_knowledge(bundles, opts.external_fuser);
}

std::vector<NodeExplanation> replay_path(const DecisionPath& path, const StylingRequest& request,
                                         DecisionPolicy& policy, const KnowledgeBase& kb,
                                         const SearchConfig& config) {
    std::vector<NodeExplanation> out;
    const std::string session_id = "s:" + request.anchor.id;
    const DecisionNode root = make_root_node();
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        const DecisionNode& node = path.nodes[i];
        const DecisionNode& parent = i == 0 ? root : path.nodes[i - 1];
        DecisionNode shell;
        shell.id = parent.id;
        shell.dtype = node.dtype;
        shell.state = parent.state;
        for (std::size_t j = 0; j < i; ++j)
            shell.edge_constraints.insert(shell.edge_constraints.end(),
                                          path.nodes[j].edge_constraints.begin(),
                                          path.nodes[j].edge_constraints.end());
        Context context = build_context(shell, request);
        ActionSpace space = enumerate_actions(node.dtype, context, kb, config);
        context.actions = space;
        auto scores = policy.score(context, space, session_id, parent.id + "/" + node.dtype);
        out.push_back(explain_node(node, context, scores));
    }
    return out;
}

RecommendationResult recommend(const KnowledgeBase& kb, const GarmentEntity& anchor,
                               const PreferenceProfile& profile, DecisionPolicy& policy,
                               const PipelineOptions& opts) {
    RecommendationResult r;
    if (opts.use_retrieval) r.fused = gather_knowledge(anchor, profile, kb, opts);

    StylingRequest request;
    request.user = profile;
    request.anchor = anchor;
    request.knowledge = r.fused;
    request.config = opts.search;
    r.search = run_tree_search(request, policy, kb);

    if (opts.use_rerank) {
        r.ranked = rerank(r.search.paths, profile, kb.trends, opts.rerank);
        r.weights = adapt_weights(profile, opts.rerank);
    } else {
        for (const auto& p : r.search.paths) {
            ScoredCandidate c;
            c.path = p;
            c.final_score = p.path_score;
            r.ranked.push_back(std::move(c));
        }
        r.weights = RerankWeights{1.0, 0.0};
    }
    if (r.ranked.empty()) throw StepoError("search produced no candidate path");

    const DecisionPath& best = r.ranked.front().path;
    std::vector<GarmentEntity> pool;
    Role want = anchor.role == Role::Top ? Role::Bottom : Role::Top;
    for (const auto& e : kb.entities)
        if (e.role == want) pool.push_back(e);
    if (!pool.empty()) r.items = materialize_candidates(best.attributes, pool, opts.materialize_n);

    auto explanations = replay_path(best, request, policy, kb, opts.search);
    std::vector<std::string> related;
    for (const auto& item : r.fused.items)
        if (item.source == KnowledgeSource::Case) related.push_back(item.ref_id);
    std::sort(related.begin(), related.end());
    related.erase(std::unique(related.begin(), related.end()), related.end());

    json summary{{"anchor", anchor.id},
                 {"beam_width", opts.search.beam_width},
                 {"path_score", best.path_score},
                 {"user", profile.user_id}};
    r.report = assemble_report(explanations, related, profile, summary);
    return r;
}

PreferenceProfile profile_for_user(const std::string& user_id,
                                   const std::optional<std::filesystem::path>& dataset_dir,
                                   const KnowledgeBase& kb) {
    if (dataset_dir) {
        IngestOptions opts;
        opts.min_outfits = 1;  // recommendation mode accepts any history depth
        Dataset ds = ingest_dataset(*dataset_dir, opts);
        for (const auto& user : ds.users) {
            if (user.user_id != user_id) continue;
            std::vector<std::vector<GarmentEntity>> history;
            auto add = [&](const std::vector<OutfitRecord>& recs) {
                for (const auto& o : recs) {
                    std::vector<GarmentEntity> outfit;
                    for (const auto& id : o.item_ids)
                        if (const GarmentEntity* e = ds.find_item(id)) outfit.push_back(*e);
                    history.push_back(std::move(outfit));
                }
            };
            add(user.train);
            add(user.test);
            return user_preference_stats(user_id, history, kb);
        }
    }
    PreferenceProfile p;
    p.user_id = user_id;
    return p;  // cold start
}

}  // namespace stepo
