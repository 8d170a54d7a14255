// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "stepo/kb.hpp"
#include "support/test_support.hpp"

using namespace stepo;
using namespace stepo::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kKbFiles[] = {"entities.json", "semantics.json",
                          "rules.json",    "principle_params.json",
                          "graph.json",    "cases.jsonl",
                          "trends.json",   "scenario_style_matrix.json",
                          "embeddings.meta.json"};

bool has_finding(const ValidationReport& r, const std::string& locus_part,
                 const std::string& msg_part) {
    for (const auto& f : r.findings)
        if (f.locus.find(locus_part) != std::string::npos &&
            f.message.find(msg_part) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST_CASE("serialize then load is byte-stable") {
    for (const KnowledgeBase& kb : {micro_kb_b(), synth_kb()}) {
        TempDir first("kb-roundtrip-a"), second("kb-roundtrip-b");
        serialize_kb(kb, first.path);
        KnowledgeBase loaded = load_kb(first.path);
        serialize_kb(loaded, second.path);
        for (const char* name : kKbFiles)
            CHECK_MESSAGE(slurp(first.path / name) == slurp(second.path / name), name);
        CHECK(slurp(first.path / "embeddings.bin") == slurp(second.path / "embeddings.bin"));
    }
}

TEST_CASE("loaded knowledge base matches the in-memory source") {
    KnowledgeBase kb = micro_kb_b();
    TempDir dir("kb-load");
    serialize_kb(kb, dir.path);
    KnowledgeBase loaded = load_kb(dir.path);

    CHECK(loaded.entities.size() == kb.entities.size());
    REQUIRE(loaded.find_entity("skirt-navy") != nullptr);
    const GarmentEntity& skirt = *loaded.find_entity("skirt-navy");
    CHECK(skirt.color.hue_deg == doctest::Approx(210.0));
    CHECK(skirt.color.temperature == Temperature::Cool);
    CHECK(skirt.color.lab[0] == doctest::Approx(30.0));
    CHECK(color_name(skirt.color) == "dark blue");

    CHECK(loaded.find_semantic("sleek") != nullptr);
    CHECK(loaded.find_semantic("nope") == nullptr);
    CHECK(loaded.find_entity("nope") == nullptr);

    // Graph edges are rebuilt at load time and must agree with the cache
    // serialize_kb wrote.
    REQUIRE(loaded.cached_edges.has_value());
    CHECK(*loaded.cached_edges == loaded.graph.edges);
    REQUIRE(loaded.graph.edges.size() == kb.graph.edges.size());
    for (const auto& [key, w] : kb.graph.edges)
        CHECK(loaded.graph.edges.at(key) == doctest::Approx(w).epsilon(1e-12));

    CHECK(loaded.embeddings.dim == kb.embeddings.dim);
    CHECK(loaded.embeddings.count() == kb.embeddings.count());
    REQUIRE(loaded.embeddings.index_of("top-b").has_value());
    auto row = loaded.embeddings.row(*loaded.embeddings.index_of("top-b"));
    auto src = kb.embeddings.row(*kb.embeddings.index_of("top-b"));
    REQUIRE(row.size() == src.size());
    for (std::size_t i = 0; i < row.size(); ++i) CHECK(row[i] == src[i]);

    CHECK(validate_kb(loaded).ok());
}

TEST_CASE("entity json round trip and lab derivation") {
    json j = {{"id", "x1"},
              {"category", "shirt"},
              {"role", "top"},
              {"color", {{"hue_deg", 90.0}, {"chroma", 40.0}, {"lightness", 60.0}}},
              {"silhouette",
               {{"shape", "H"}, {"fit", "fit"}, {"length_class", "regular"},
                {"length_ratio", 0.5}}},
              {"tags", {"soft"}}};
    GarmentEntity e = entity_from_json(j);
    CHECK(e.color.temperature == Temperature::Warm);  // derived: 90 deg, chroma 40
    CHECK(e.color.lab[0] == doctest::Approx(60.0));
    CHECK(std::fabs(e.color.lab[1]) < 1e-9);  // 40 * cos(90 deg)
    CHECK(e.color.lab[2] == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(e.tags.count("soft") == 1);

    json back = entity_to_json(e);
    GarmentEntity again = entity_from_json(back);
    CHECK(entity_to_json(again) == back);
}

TEST_CASE("projection keeps semantics whose signature the entity satisfies") {
    KnowledgeBase kb = micro_kb_a();
    SemanticEntity cottony;
    cottony.id = "cottony";
    cottony.kind = SemanticEntity::Kind::Style;
    cottony.attribute_signature = {"tshirt", "neutral color"};
    kb.semantics.push_back(cottony);
    SemanticEntity impossible;
    impossible.id = "impossible";
    impossible.kind = SemanticEntity::Kind::Style;
    impossible.attribute_signature = {"tshirt", "warm color"};
    kb.semantics.push_back(impossible);

    auto hits = project(*kb.find_entity("top-a"), kb);
    bool saw_cottony = false, saw_impossible = false;
    for (const auto& s : hits) {
        if (s.id == "cottony") saw_cottony = true;
        if (s.id == "impossible") saw_impossible = true;
    }
    CHECK(saw_cottony);
    CHECK_FALSE(saw_impossible);

    GarmentEntity stranger;
    stranger.id = "stranger";
    CHECK_THROWS_AS(project(stranger, kb), StepoError);
}

TEST_CASE("validation flags entity record violations") {
    KnowledgeBase kb = micro_kb_a();
    kb.entities.push_back(kb.entities[0]);  // duplicate id
    kb.entities[1].color.hue_deg = 380.0;
    kb.entities[2].silhouette.length_ratio = 0.0;

    GarmentEntity warm = kb.entities[0];
    warm.id = "mislabeled";
    warm.category = "parka";
    warm.color.hue_deg = 20.0;
    warm.color.chroma = 50.0;
    warm.color.temperature = Temperature::Cool;
    kb.entities.push_back(warm);

    GarmentEntity clash = kb.entities[0];
    clash.id = "clash";
    clash.category = "trousers";  // trousers already bound to Bottom
    clash.role = Role::Top;
    kb.entities.push_back(clash);

    GarmentEntity dangling = kb.entities[0];
    dangling.id = "dangling";
    dangling.category = "hat";
    dangling.embedding_ref = 999;
    kb.entities.push_back(dangling);

    auto report = validate_kb(kb);
    CHECK(has_finding(report, "entities.json#top-a", "duplicate entity id"));
    CHECK(has_finding(report, "pants-black", "out of [0,360)"));
    CHECK(has_finding(report, "pants-white", "length_ratio out of (0,2]"));
    CHECK(has_finding(report, "mislabeled", "temperature tag inconsistent with hue band"));
    CHECK(has_finding(report, "clash", "category \"trousers\" used with conflicting roles"));
    CHECK(has_finding(report, "dangling", "embedding_ref out of range"));
}

TEST_CASE("validation flags rule and semantic violations") {
    KnowledgeBase kb = micro_kb_b();
    kb.semantics.push_back(kb.semantics[0]);  // duplicate semantic id

    RuleAttribute bad_weight;
    bad_weight.id = "neg";
    bad_weight.lhs = "delta_h";
    bad_weight.op = RuleOp::Le;
    bad_weight.rhs = 10.0;
    bad_weight.weight = -0.5;
    kb.rules.push_back(bad_weight);

    RuleAttribute in_scalar;
    in_scalar.id = "in-scalar";
    in_scalar.lhs = "descriptors";
    in_scalar.op = RuleOp::In;
    in_scalar.rhs = "ripped";
    in_scalar.weight = 1.0;
    kb.rules.push_back(in_scalar);

    RuleAttribute ge_string;
    ge_string.id = "ge-string";
    ge_string.lhs = "delta_h";
    ge_string.op = RuleOp::Ge;
    ge_string.rhs = "loud";
    ge_string.weight = 1.0;
    kb.rules.push_back(ge_string);

    RuleAttribute eq_array;
    eq_array.id = "eq-array";
    eq_array.lhs = "category";
    eq_array.op = RuleOp::Eq;
    eq_array.rhs = json::array({"skirt"});
    eq_array.weight = 1.0;
    kb.rules.push_back(eq_array);

    RuleAttribute ghost_style = kb.rules[0];
    ghost_style.id = "ghost";
    ghost_style.style = "nonexistent";
    kb.rules.push_back(ghost_style);

    auto report = validate_kb(kb);
    CHECK(has_finding(report, "semantics.json", "duplicate semantic id"));
    CHECK(has_finding(report, "rules.json#neg", "negative weight"));
    CHECK(has_finding(report, "rules.json#in-scalar", "needs an array rhs"));
    CHECK(has_finding(report, "rules.json#ge-string", "needs a numeric rhs"));
    CHECK(has_finding(report, "rules.json#eq-array", "cannot take an array rhs"));
    CHECK(has_finding(report, "rules.json#ghost", "style \"nonexistent\" not a semantic entity"));
}

TEST_CASE("validation flags parameter and graph violations") {
    KnowledgeBase kb = micro_kb_a();
    kb.principle_params.rho = {0.5, 0.5, 0.5};
    kb.principle_params.beta = {0.5, 0.5, 0.5, 0.5};
    kb.principle_params.golden_sigma = 0.0;
    kb.principle_params.shape_compat[0][0] = 1.5;
    kb.principle_params.sil_tables.fit.erase(Fit::Loose);
    kb.graph.lambda = 2.0;
    kb.graph.strengths[{"plain", "contrast"}] = -1.0;
    kb.graph.edges[{"plain", "contrast"}] = 1.25;
    kb.cached_edges = std::map<std::pair<std::string, std::string>, double>{};

    auto report = validate_kb(kb);
    CHECK(has_finding(report, "principle_params.json", "rho sums to"));
    CHECK(has_finding(report, "principle_params.json", "beta sums to"));
    CHECK(has_finding(report, "principle_params.json", "golden_sigma must be positive"));
    CHECK(has_finding(report, "principle_params.json", "shape_compat value"));
    CHECK(has_finding(report, "principle_params.json", "sil_tables.fit missing loose"));
    CHECK(has_finding(report, "graph.json", "lambda"));
    CHECK(has_finding(report, "graph.json", "strength (plain,contrast) is negative"));
    CHECK(has_finding(report, "graph.json", "edge (plain,contrast)"));
    CHECK(has_finding(report, "graph.json",
                      "cached edges disagree with rebuild from cases+strengths"));
}

TEST_CASE("validation flags case, trend, matrix, and embedding violations") {
    KnowledgeBase kb = micro_kb_c();
    kb.cases.cases.push_back(kb.cases.cases[0]);  // duplicate case id
    kb.cases.cases[0].style_vector["crisp"] = 1.5;
    kb.cases.cases[0].item_ids.push_back("phantom-item");
    kb.cases.cases[0].embedding_ref = 999;
    kb.trends[0].weight = -0.25;
    kb.matrix.scenarios.push_back(kb.matrix.scenarios[0]);
    kb.matrix.styles.push_back("not-a-style");
    kb.matrix.values.push_back(2.0);
    kb.embeddings.ids.push_back(kb.embeddings.ids[0]);

    auto report = validate_kb(kb);
    CHECK(has_finding(report, "cases.jsonl#case-c1", "duplicate case id"));
    CHECK(has_finding(report, "cases.jsonl#case-c1", "style_vector[crisp]"));
    CHECK(has_finding(report, "cases.jsonl#case-c1", "item \"phantom-item\" does not resolve"));
    CHECK(has_finding(report, "cases.jsonl#case-c1", "embedding_ref out of range"));
    CHECK(has_finding(report, "trends.json#trend-c", "weight"));
    CHECK(has_finding(report, "scenario_style_matrix.json", "duplicate scenario \"work\""));
    CHECK(has_finding(report, "scenario_style_matrix.json",
                      "style \"not-a-style\" not a style semantic entity"));
    CHECK(has_finding(report, "scenario_style_matrix.json", "compatibility"));
    CHECK(has_finding(report, "scenario_style_matrix.json", "value grid shape mismatch"));
    CHECK(has_finding(report, "embeddings.meta.json", "duplicate embedding id"));
    CHECK(has_finding(report, "embeddings.meta.json", "binary payload shape mismatch"));

    // A matrix scenario that is a style-kind semantic is also a finding.
    KnowledgeBase kc = micro_kb_c();
    kc.matrix.scenarios[0] = "crisp";
    CHECK(has_finding(validate_kb(kc), "scenario_style_matrix.json",
                      "scenario \"crisp\" not a scenario semantic entity"));
}

TEST_CASE("checked load reports the first finding and the total") {
    KnowledgeBase kb = micro_kb_a();
    TempDir dir("kb-checked-load");
    serialize_kb(kb, dir.path);

    json trends = json::parse(slurp(dir.path / "trends.json"));
    trends[0]["weight"] = 2.0;
    std::ofstream(dir.path / "trends.json", std::ios::binary) << trends.dump(2) << "\n";
    json matrix = json::parse(slurp(dir.path / "scenario_style_matrix.json"));
    matrix["values"][0][0] = 1.5;
    std::ofstream(dir.path / "scenario_style_matrix.json", std::ios::binary)
        << matrix.dump(2) << "\n";

    try {
        load_kb(dir.path);
        FAIL("expected KbError");
    } catch (const KbError& e) {
        CHECK(e.locus() == "trends.json#trend-a");
        CHECK(std::string(e.what()).find("weight") != std::string::npos);
        CHECK(std::string(e.what()).find("(+1 more findings)") != std::string::npos);
    }

    // load_kb_unchecked defers the same problems to validate_kb.
    KnowledgeBase raw = load_kb_unchecked(dir.path);
    auto report = validate_kb(raw);
    CHECK(report.findings.size() == 2);
}

TEST_CASE("malformed files throw with a file locus") {
    KnowledgeBase kb = micro_kb_a();
    TempDir dir("kb-malformed");
    serialize_kb(kb, dir.path);
    std::ofstream(dir.path / "entities.json", std::ios::binary) << "this is not json\n";
    CHECK_THROWS_AS(load_kb_unchecked(dir.path), KbError);

    TempDir missing("kb-missing");
    CHECK_THROWS_AS(load_kb(missing.path), KbError);
}
