// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "stepo/eval.hpp"
#include "stepo/principles.hpp"
#include "support/test_support.hpp"

using namespace stepo;
using namespace stepo::test;

namespace {

void write_json(const std::filesystem::path& p, const json& j) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

json small_items() {
    json items = json::array();
    for (const GarmentEntity& e :
         {make_garment("blouse-a", "blouse", Role::Top, 0, 0, 75, Shape::A, Fit::Fitted,
                       LengthClass::Regular),
          make_garment("skirt-a", "skirt", Role::Bottom, 0, 0, 35, Shape::A, Fit::Fitted,
                       LengthClass::Regular),
          make_garment("trousers-a", "trousers", Role::Bottom, 0, 0, 10, Shape::H, Fit::Fitted,
                       LengthClass::Regular),
          make_garment("tshirt-a", "tshirt", Role::Top, 0, 0, 92, Shape::H, Fit::Fitted,
                       LengthClass::Regular)}) {
        json j = entity_to_json(e);
        j.erase("embedding_ref");
        items.push_back(j);
    }
    return items;
}

json outfit(const std::string& id, std::vector<std::string> item_ids) {
    return json{{"outfit_id", id}, {"item_ids", item_ids}};
}

// The hand-ranked retrieval fixture: truths at ranks 1; 2; 1 and 3; 6.
std::vector<RankedList> ranked_fixture() {
    return {
        {{"a1", "a2", "a3"}, {"a1"}},
        {{"b1", "b2", "b3"}, {"b2"}},
        {{"c1", "c2", "c3", "c4"}, {"c1", "c3"}},
        {{"d1", "d2", "d3", "d4", "d5", "d6"}, {"d6"}},
    };
}

}  // namespace

TEST_CASE("ingestion keeps only well-formed outfits and splits per user") {
    TempDir dir("stepo-ingest");
    write_json(dir.path / "items.json", small_items());
    write_json(dir.path / "users" / "u1" / "outfits.json",
               json::array({
                   outfit("o1", {"tshirt-a", "trousers-a"}),
                   outfit("o2", {"blouse-a", "skirt-a"}),
                   outfit("o3", {"tshirt-a", "skirt-a"}),
                   outfit("bad-single", {"tshirt-a"}),
                   outfit("bad-two-bottoms", {"trousers-a", "skirt-a"}),
                   outfit("bad-dangling", {"tshirt-a", "ghost-item"}),
                   outfit("bad-no-bottom", {"tshirt-a", "blouse-a"}),
               }));
    write_json(dir.path / "users" / "u2" / "outfits.json",
               json::array({outfit("lonely", {"tshirt-a", "trousers-a"})}));

    IngestOptions opts;
    opts.min_outfits = 2;
    opts.split_ratio = 0.8;
    opts.seed = 42;
    Dataset ds = ingest_dataset(dir.path, opts);

    CHECK(ds.item_pool.size() == 4);
    CHECK(ds.split_seed == 42);
    REQUIRE(ds.users.size() == 1);  // u2 falls below min_outfits
    const DatasetUser& u = ds.users[0];
    CHECK(u.user_id == "u1");
    // Three usable outfits at ratio 0.8: llround(2.4) = 2 train, 1 test.
    CHECK(u.train.size() == 2);
    CHECK(u.test.size() == 1);
    std::set<std::string> ids;
    for (const auto& o : u.train) ids.insert(o.outfit_id);
    for (const auto& o : u.test) ids.insert(o.outfit_id);
    CHECK(ids == std::set<std::string>{"o1", "o2", "o3"});

    // The split is a pure function of (seed, user id).
    Dataset again = ingest_dataset(dir.path, opts);
    REQUIRE(again.users.size() == 1);
    for (std::size_t i = 0; i < u.train.size(); ++i)
        CHECK(again.users[0].train[i].outfit_id == u.train[i].outfit_id);
    CHECK(again.users[0].test[0].outfit_id == u.test[0].outfit_id);

    CHECK(ds.find_item("skirt-a") != nullptr);
    CHECK(ds.find_item("skirt-a")->role == Role::Bottom);
    CHECK(ds.find_item("ghost-item") == nullptr);
}

TEST_CASE("ingestion rejects broken layouts with located errors") {
    IngestOptions opts;
    opts.min_outfits = 1;

    SUBCASE("missing items.json") {
        TempDir dir("stepo-ingest-bad");
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, opts),
                             doctest::Contains("missing dataset file"), StepoError);
    }
    SUBCASE("items.json not an array") {
        TempDir dir("stepo-ingest-bad");
        write_json(dir.path / "items.json", json{{"not", "array"}});
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, opts),
                             "items.json: expected a top-level array", StepoError);
    }
    SUBCASE("missing users directory") {
        TempDir dir("stepo-ingest-bad");
        write_json(dir.path / "items.json", small_items());
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, opts),
                             "missing dataset directory: users/", StepoError);
    }
    SUBCASE("outfit record without item_ids") {
        TempDir dir("stepo-ingest-bad");
        write_json(dir.path / "items.json", small_items());
        write_json(dir.path / "users" / "u1" / "outfits.json",
                   json::array({json{{"outfit_id", "o1"}}}));
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, opts),
                             doctest::Contains("users/u1/outfits.json#0"), StepoError);
    }
    SUBCASE("degenerate split ratios") {
        TempDir dir("stepo-ingest-bad");
        IngestOptions bad = opts;
        bad.split_ratio = 0.0;
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, bad),
                             "split_ratio must lie in (0, 1)", StepoError);
        bad.split_ratio = 1.0;
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, bad),
                             "split_ratio must lie in (0, 1)", StepoError);
    }
    SUBCASE("no user clears the outfit floor") {
        TempDir dir("stepo-ingest-bad");
        write_json(dir.path / "items.json", small_items());
        write_json(dir.path / "users" / "u1" / "outfits.json",
                   json::array({outfit("o1", {"tshirt-a"})}));
        CHECK_THROWS_WITH_AS(ingest_dataset(dir.path, opts),
                             doctest::Contains("no user with at least 1"), StepoError);
    }
}

TEST_CASE("candidate materialization ranks by attribute overlap") {
    std::vector<GarmentEntity> pool = {
        make_garment("trousers-black", "trousers", Role::Bottom, 0, 0, 10, Shape::H, Fit::Fitted,
                     LengthClass::Regular),
        make_garment("trousers-white", "trousers", Role::Bottom, 0, 0, 92, Shape::H, Fit::Fitted,
                     LengthClass::Regular),
        make_garment("skirt-black", "skirt", Role::Bottom, 0, 0, 10, Shape::A, Fit::Fitted,
                     LengthClass::Regular),
    };

    auto ranked = materialize_candidates({"trousers", "black"}, pool, 10);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0] == std::pair<std::string, double>{"trousers-black", 1.0});
    // 0.5 tie resolves by id.
    CHECK(ranked[1] == std::pair<std::string, double>{"skirt-black", 0.5});
    CHECK(ranked[2] == std::pair<std::string, double>{"trousers-white", 0.5});

    auto top2 = materialize_candidates({"trousers", "black"}, pool, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[1].first == "skirt-black");

    auto none = materialize_candidates({}, pool, 10);
    REQUIRE(none.size() == 3);
    CHECK(none[0].first == "skirt-black");  // all-zero scores sort by id
    CHECK(none[0].second == 0.0);

    CHECK_THROWS_WITH_AS(materialize_candidates({"x"}, {}, 5),
                         "cannot materialize candidates from an empty pool", StepoError);
}

TEST_CASE("recall over the hand-ranked fixture") {
    auto lists = ranked_fixture();
    CHECK(recall_at_k(lists, 1) == doctest::Approx(0.5));
    CHECK(recall_at_k(lists, 3) == doctest::Approx(0.75));
    CHECK(recall_at_k(lists, 5) == doctest::Approx(0.75));
    CHECK(recall_at_k(lists, 10) == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(recall_at_k({}, 1), "recall_at_k over zero lists", StepoError);
}

TEST_CASE("average precision in both modes over the hand-ranked fixture") {
    auto lists = ranked_fixture();

    // Per-list values first, then the mean over all four.
    CHECK(mean_average_precision({lists[0]}, MapMode::Standard) == doctest::Approx(1.0));
    CHECK(mean_average_precision({lists[0]}, MapMode::PaperLiteral) == doctest::Approx(1.0));
    CHECK(mean_average_precision({lists[1]}, MapMode::Standard) == doctest::Approx(0.5));
    CHECK(mean_average_precision({lists[1]}, MapMode::PaperLiteral) == doctest::Approx(0.25));
    CHECK(mean_average_precision({lists[2]}, MapMode::Standard) == doctest::Approx(5.0 / 6.0));
    CHECK(mean_average_precision({lists[2]}, MapMode::PaperLiteral) ==
          doctest::Approx(11.0 / 18.0));
    CHECK(mean_average_precision({lists[3]}, MapMode::Standard) == doctest::Approx(1.0 / 6.0));
    CHECK(mean_average_precision({lists[3]}, MapMode::PaperLiteral) ==
          doctest::Approx(1.0 / 36.0));

    CHECK(mean_average_precision(lists, MapMode::Standard) == doctest::Approx(0.625));
    CHECK(mean_average_precision(lists, MapMode::PaperLiteral) == doctest::Approx(17.0 / 36.0));

    // A truth that never surfaces contributes zero.
    RankedList missed{{"m1", "m2"}, {"elsewhere"}};
    CHECK(mean_average_precision({lists[0], missed}, MapMode::Standard) == doctest::Approx(0.5));

    // Lists without ground truth are excluded, not zero-counted.
    RankedList no_truth{{"n1", "n2"}, {}};
    CHECK(mean_average_precision({lists[0], no_truth}, MapMode::Standard) ==
          doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(mean_average_precision({no_truth}, MapMode::Standard),
                         "mean_average_precision: no list has ground truth", StepoError);
}

TEST_CASE("pipeline config names round trip") {
    for (PipelineConfig c : {PipelineConfig::Full, PipelineConfig::NoRetrieval,
                             PipelineConfig::NoRerank, PipelineConfig::ReasoningOnly})
        CHECK(pipeline_config_from_string(to_string(c)) == c);
    CHECK(to_string(PipelineConfig::Full) == "full");
    CHECK(to_string(PipelineConfig::NoRetrieval) == "no-retrieval");
    CHECK(to_string(PipelineConfig::NoRerank) == "no-rerank");
    CHECK(to_string(PipelineConfig::ReasoningOnly) == "reasoning-only");
    CHECK_THROWS_WITH_AS(pipeline_config_from_string("half"),
                         "unknown pipeline config: \"half\"", StepoError);
}

TEST_CASE("eval reports serialize with stringified cutoffs") {
    EvalReport r;
    r.config = "full";
    r.n_samples = 100;
    r.recall = {{1, 0.9}, {10, 1.0}};
    r.map_standard = 0.95;
    r.map_paper_literal = 0.75;
    r.failures = 2;
    json j = eval_report_to_json(r);
    CHECK(j.at("config") == "full");
    CHECK(j.at("n_samples") == 100);
    CHECK(j.at("failures") == 2);
    CHECK(j.at("recall").at("1") == doctest::Approx(0.9));
    CHECK(j.at("recall").at("10") == doctest::Approx(1.0));
    CHECK(j.at("map_standard") == doctest::Approx(0.95));
    CHECK(j.at("map_paper_literal") == doctest::Approx(0.75));
}

TEST_CASE("pair compatibility averages the principle scores and honors gates") {
    GarmentEntity top = make_garment("t", "tshirt", Role::Top, 0, 0, 92, Shape::H, Fit::Fitted,
                                     LengthClass::Regular);
    GarmentEntity bottom = make_garment("b", "trousers", Role::Bottom, 0, 0, 10, Shape::H,
                                        Fit::Fitted, LengthClass::Regular);
    PrincipleParams params = default_principle_params();

    double expected = 0.5 * (score_silhouette_pair(top.silhouette, bottom.silhouette,
                                                   params).total +
                             score_color_pair(top.color, bottom.color, params).total);
    CHECK(default_compatibility(top, bottom, params) == doctest::Approx(expected));

    StyleConstraintSet pass;
    pass.style_id = "casual";
    pass.constraints = {{"g1", "casual", "descriptors", RuleOp::In, json::array({"tshirt"}),
                         "", 1.0}};
    CHECK(default_compatibility(top, bottom, params, {pass}) == doctest::Approx(expected));

    StyleConstraintSet fail;
    fail.style_id = "formal";
    fail.constraints = {{"g2", "formal", "descriptors", RuleOp::NotIn,
                         json::array({"tshirt"}), "", 1.0}};
    CHECK(default_compatibility(top, bottom, params, {fail}) == 0.0);

    // A gate on an attribute the pair does not carry counts as failed.
    StyleConstraintSet unknowable;
    unknowable.style_id = "dressy";
    unknowable.constraints = {{"g3", "dressy", "formality", RuleOp::Ge, json(0.7), "", 1.0}};
    CHECK(default_compatibility(top, bottom, params, {unknowable}) == 0.0);
}

TEST_CASE("synthetic benchmark recovers the planted preferences") {
    TempDir dir("stepo-evalbench");
    write_synth_dataset(dir.path);
    KnowledgeBase kb = synth_kb();

    IngestOptions iopts;
    iopts.min_outfits = 10;
    iopts.split_ratio = 0.8;
    iopts.seed = 7;
    Dataset ds = ingest_dataset(dir.path, iopts);
    REQUIRE(ds.users.size() == 50);
    for (const auto& u : ds.users) {
        CHECK(u.train.size() == 8);
        CHECK(u.test.size() == 2);
    }

    BenchmarkOptions bopts;
    bopts.configs = {PipelineConfig::Full, PipelineConfig::NoRetrieval, PipelineConfig::NoRerank,
                     PipelineConfig::ReasoningOnly};
    bopts.search.beam_width = 6;

    auto reports = run_benchmark(ds, kb, bopts);
    REQUIRE(reports.size() == 4);
    const EvalReport& full = reports[0];
    CHECK(full.config == "full");
    CHECK(full.failures == 0);
    CHECK(full.n_samples == 100);  // 50 users x 2 held-out outfits
    CHECK(full.recall.at(1) >= 0.9);
    CHECK(full.recall.at(10) >= full.recall.at(1));

    for (std::size_t i = 1; i < reports.size(); ++i) {
        CAPTURE(reports[i].config);
        CHECK(reports[i].failures == 0);
        CHECK(reports[i].n_samples == 100);
        // Every ablation is strictly worse on both headline metrics.
        CHECK(reports[i].recall.at(1) < full.recall.at(1));
        CHECK(reports[i].map_standard < full.map_standard);
    }

    // Byte-identical re-run: the whole benchmark is deterministic.
    auto again = run_benchmark(ds, kb, bopts);
    REQUIRE(again.size() == reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i)
        CHECK(eval_report_to_json(again[i]).dump(2) == eval_report_to_json(reports[i]).dump(2));
}
