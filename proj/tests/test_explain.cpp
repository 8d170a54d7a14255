// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stepo/explain.hpp"
#include "support/test_support.hpp"

using namespace stepo;
using namespace stepo::test;

namespace {

KnowledgeItem item_of(KnowledgeSource source, std::string ref, double relevance, json payload) {
    KnowledgeItem item;
    item.source = source;
    item.ref_id = std::move(ref);
    item.relevance = relevance;
    item.payload = std::move(payload);
    return item;
}

DecisionNode node_of(std::string id, std::string dtype, std::string chosen) {
    DecisionNode n;
    n.id = std::move(id);
    n.dtype = std::move(dtype);
    n.chosen = std::move(chosen);
    return n;
}

}  // namespace

TEST_CASE("evidence refs join source and id") {
    CHECK(evidence_ref(item_of(KnowledgeSource::Trend, "t-noir", 0.5, {})) == "trend:t-noir");
    CHECK(evidence_ref(item_of(KnowledgeSource::SceneStyle, "work", 0.5, {})) ==
          "scene_style:work");
    CHECK(evidence_ref(item_of(KnowledgeSource::Case, "case-7", 0.5, {})) == "case:case-7");
}

TEST_CASE("node explanations cite only endorsing evidence, capped at three") {
    Context ctx;
    ctx.path_prefix = {{"scenario", "daily"}, {"style", "plain"}};
    ctx.preferences = {{"loose fit", 0.25}};
    // Four items endorse "loose"/"loose fit", one is unrelated.
    ctx.knowledge.items = {
        item_of(KnowledgeSource::Trend, "t-baggy", 0.6, {{"attributes", {"loose fit"}}}),
        item_of(KnowledgeSource::Case, "case-1", 0.9, {{"attributes", {"loose fit", "black"}}}),
        item_of(KnowledgeSource::Preference, "pref:loose fit", 0.25,
                {{"attribute", "loose fit"}}),
        item_of(KnowledgeSource::SilhouetteRule, "sil:H-A", 0.9, {{"fit_best", "loose"}}),
        item_of(KnowledgeSource::ColorRule, "color:mono", 0.8, {{"scheme", "mono"}}),
    };

    auto ex = explain_node(node_of("n0.0.0/fit", "fit", "loose"), ctx,
                           {{"loose", 0.7}, {"tight", 0.1}, {"fit", 0.2}});
    CHECK(ex.node_id == "n0.0.0/fit");
    CHECK(ex.dtype == "fit");
    CHECK(ex.chosen == "loose");

    REQUIRE(ex.alternatives.size() == 3);
    CHECK(ex.alternatives[0] == std::pair<std::string, double>{"loose", 0.7});
    CHECK(ex.alternatives[1] == std::pair<std::string, double>{"fit", 0.2});
    CHECK(ex.alternatives[2] == std::pair<std::string, double>{"tight", 0.1});

    // Relevance descending, source priority breaking the 0.9 tie, top 3 kept;
    // the color rule never endorses a fit decision.
    REQUIRE(ex.evidence.size() == 3);
    CHECK(ex.evidence[0] == "silhouette_rule:sil:H-A");
    CHECK(ex.evidence[1] == "case:case-1");
    CHECK(ex.evidence[2] == "trend:t-baggy");

    CHECK(ex.preference_note == "\"loose fit\" appears in 25.00% of the user's history");
    CHECK(ex.rationale_text ==
          "Chose loose for fit after scenario=daily, style=plain; supported by "
          "silhouette_rule:sil:H-A (relevance 0.90), case:case-1 (relevance 0.90), "
          "trend:t-baggy (relevance 0.60). "
          "\"loose fit\" appears in 25.00% of the user's history.");
}

TEST_CASE("nodes without evidence explain themselves as principle-only") {
    Context ctx;  // no knowledge, no preferences, no prefix
    auto ex = explain_node(node_of("n0/scenario", "scenario", "daily"), ctx, {{"daily", 1.0}});
    CHECK(ex.evidence.empty());
    CHECK(ex.preference_note == "no preference signal for this decision type");
    CHECK(ex.rationale_text ==
          "Chose daily for scenario; principle-only decision (no retrieved evidence endorses "
          "it). no preference signal for this decision type.");
}

TEST_CASE("preference note distinguishes unseen attributes from absent profiles") {
    Context ctx;
    ctx.preferences = {{"tshirt", 0.5}};
    auto ex = explain_node(node_of("n0/category", "category", "skirt"), ctx, {{"skirt", 1.0}});
    CHECK(ex.preference_note == "no history support for \"skirt\"");

    // The bare action key works when the descriptor form is absent.
    Context ctx2;
    ctx2.preferences = {{"mono", 0.75}};
    auto ex2 = explain_node(node_of("n/color_scheme", "color_scheme", "mono"), ctx2,
                            {{"mono", 1.0}});
    CHECK(ex2.preference_note == "\"mono scheme\" appears in 75.00% of the user's history");
}

TEST_CASE("underscored decision types render with spaces") {
    Context ctx;
    auto ex = explain_node(node_of("n/silhouette_pairing", "silhouette_pairing", "A"), ctx,
                           {{"A", 1.0}});
    CHECK(ex.rationale_text.rfind("Chose A for silhouette pairing;", 0) == 0);
}

TEST_CASE("report indices are mutual inverses") {
    NodeExplanation a;
    a.node_id = "n0/scenario";
    a.dtype = "scenario";
    a.chosen = "daily";
    a.evidence = {"scene_style:daily", "case:case-1"};
    NodeExplanation b;
    b.node_id = "n0.0/style";
    b.dtype = "style";
    b.chosen = "plain";
    b.evidence = {"case:case-1"};
    NodeExplanation c;
    c.node_id = "n0.0.0/category";
    c.dtype = "category";
    c.chosen = "skirt";

    PreferenceProfile prof;
    prof.user_id = "u1";
    prof.history_size = 4;
    prof.trend_match_rate = 0.25;

    auto report = assemble_report({a, b, c}, {"case-1", "case-9"}, prof,
                                  {{"anchor", "top-a"}});
    CHECK(report.request_summary.at("anchor") == "top-a");
    CHECK(report.related_cases == std::vector<std::string>{"case-1", "case-9"});
    CHECK(report.profile_summary.at("user_id") == "u1");
    CHECK(report.profile_summary.at("history_size") == 4);
    CHECK(report.profile_summary.at("cold_start") == false);

    REQUIRE(report.index_forward.size() == 3);
    CHECK(report.index_forward.at("n0/scenario") ==
          std::vector<std::string>{"scene_style:daily", "case:case-1"});
    CHECK(report.index_forward.at("n0.0.0/category").empty());
    REQUIRE(report.index_backward.size() == 2);
    CHECK(report.index_backward.at("case:case-1") ==
          std::vector<std::string>{"n0/scenario", "n0.0/style"});
    CHECK(report.index_backward.at("scene_style:daily") ==
          std::vector<std::string>{"n0/scenario"});

    // Every forward edge appears backward and vice versa.
    for (const auto& [node, refs] : report.index_forward)
        for (const auto& ref : refs) {
            const auto& nodes = report.index_backward.at(ref);
            CHECK(std::find(nodes.begin(), nodes.end(), node) != nodes.end());
        }
    for (const auto& [ref, nodes] : report.index_backward)
        for (const auto& node : nodes) {
            const auto& refs = report.index_forward.at(node);
            CHECK(std::find(refs.begin(), refs.end(), ref) != refs.end());
        }

    SUBCASE("queries answer from either index") {
        CHECK(trace_query(report, "n0.0/style") == std::vector<std::string>{"case:case-1"});
        CHECK(trace_query(report, "case:case-1") ==
              std::vector<std::string>{"n0/scenario", "n0.0/style"});
        CHECK_THROWS_WITH_AS(trace_query(report, "case:ghost"),
                             "\"case:ghost\" not in report", StepoError);
    }

    SUBCASE("json round trip is lossless") {
        json j = report_to_json(report);
        ExplanationReport back = report_from_json(j);
        CHECK(report_to_json(back).dump(2) == j.dump(2));
        CHECK(back.node_explanations.size() == 3);
        CHECK(back.node_explanations[0].node_id == "n0/scenario");
        CHECK(back.index_backward == report.index_backward);
    }

    SUBCASE("text render lists nodes and related cases") {
        std::string text = report_to_text(report);
        CHECK(text.find("Recommendation trace for user u1") != std::string::npos);
        CHECK(text.find("[n0/scenario] scenario -> daily") != std::string::npos);
        CHECK(text.find("related cases: case-1 case-9") != std::string::npos);
    }
}

TEST_CASE("duplicate citations collapse in the backward index") {
    NodeExplanation a;
    a.node_id = "n0";
    a.dtype = "style";
    a.chosen = "plain";
    a.evidence = {"case:case-1", "case:case-1"};
    auto report = assemble_report({a}, {}, PreferenceProfile{});
    CHECK(report.index_backward.at("case:case-1") == std::vector<std::string>{"n0"});
}

TEST_CASE("alternatives line appears only when there was a real choice") {
    NodeExplanation only;
    only.node_id = "n0";
    only.dtype = "scenario";
    only.chosen = "daily";
    only.alternatives = {{"daily", 1.0}};
    auto report = assemble_report({only}, {}, PreferenceProfile{});
    CHECK(report_to_text(report).find("alternatives:") == std::string::npos);

    only.alternatives.emplace_back("evening", 0.25);
    report = assemble_report({only}, {}, PreferenceProfile{});
    CHECK(report_to_text(report).find("alternatives: daily=1.00 evening=0.25") !=
          std::string::npos);
}
