// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stepo/semantic.hpp"

using namespace stepo;

namespace {

Case make_case(const std::string& id, std::map<std::string, double> styles,
               std::map<std::string, double> principles) {
    Case c;
    c.id = id;
    c.style_vector = std::move(styles);
    c.principle_vector = std::move(principles);
    return c;
}

}  // namespace

TEST_CASE("edge weight blends frequency and strength") {
    CHECK(edge_weight(0.5, 1.0, 0.5) == doctest::Approx(0.75));
    CHECK(edge_weight(1.0, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(edge_weight(1.0, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(edge_weight(-0.1, 0.5, 0.5), StepoError);
    CHECK_THROWS_AS(edge_weight(0.5, 1.1, 0.5), StepoError);
    CHECK_THROWS_AS(edge_weight(0.5, 0.5, 2.0), StepoError);
}

TEST_CASE("graph build blends case frequency with normalized strengths") {
    CaseLibrary lib;
    lib.cases = {make_case("c1", {{"s1", 0.9}}, {{"p1", 0.8}, {"p2", 0.3}, {"p4", 0.9}}),
                 make_case("c2", {{"s1", 0.6}}, {{"p1", 0.2}})};
    std::map<std::pair<std::string, std::string>, double> strengths = {
        {{"s1", "p1"}, 0.8}, {{"s2", "p3"}, 0.4}};

    StyleRuleGraph g = build_graph(lib, strengths, 0.5, 0.5);

    CHECK(g.style_vertices == std::vector<std::string>{"s1", "s2"});
    CHECK(g.principle_vertices == std::vector<std::string>{"p1", "p3", "p4"});

    // (s1,p1): freq 1/2 (only c1 clears the threshold on both sides),
    // strength 0.8/0.8 = 1 -> 0.5*0.5 + 0.5*1.
    CHECK(g.edges.at({"s1", "p1"}) == doctest::Approx(0.75));
    // (s1,p4): frequency only.
    CHECK(g.edges.at({"s1", "p4"}) == doctest::Approx(0.5));
    // (s2,p3): strength only (s2 has no cases), normalized by the max.
    CHECK(g.edges.at({"s2", "p3"}) == doctest::Approx(0.5));
    // (s1,p3): freq 0 and no strength -> zero weight edges are dropped.
    CHECK(g.edges.count({"s1", "p3"}) == 0);
    // p2 never clears the activation threshold anywhere.
    CHECK(g.edges.count({"s1", "p2"}) == 0);

    CHECK(g.lambda == doctest::Approx(0.5));
    CHECK(g.activation_threshold == doctest::Approx(0.5));
    CHECK(g.strengths == strengths);
}

TEST_CASE("style inference normalizes over weighted evidence") {
    StyleRuleGraph g;
    g.style_vertices = {"a", "b"};
    g.principle_vertices = {"p1", "p2"};
    g.edges = {{{"a", "p1"}, 0.6}, {{"a", "p2"}, 0.2}, {{"b", "p1"}, 0.3}};

    auto dist = infer_styles(g, {{"p1", 0.5}, {"p2", 1.0}});
    CHECK(dist.at("a") == doctest::Approx(0.5 / 0.65).epsilon(1e-12));
    CHECK(dist.at("b") == doctest::Approx(0.15 / 0.65).epsilon(1e-12));
    CHECK(dist.at("a") + dist.at("b") == doctest::Approx(1.0).epsilon(1e-12));

    // Unknown principles contribute nothing; all-unknown evidence throws.
    auto with_noise = infer_styles(g, {{"p1", 0.5}, {"p2", 1.0}, {"p9", 5.0}});
    CHECK(with_noise.at("a") == doctest::Approx(dist.at("a")).epsilon(1e-12));
    CHECK_THROWS_AS(infer_styles(g, {{"p9", 1.0}}), NoEvidenceError);
    CHECK_THROWS_AS(infer_styles(g, {{"p1", 0.0}}), NoEvidenceError);
}

TEST_CASE("randomized inference is a scale-invariant distribution") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> nstyles(1, 6), nprin(1, 6);

    for (int iter = 0; iter < 200; ++iter) {
        StyleRuleGraph g;
        int ns = nstyles(rng), np = nprin(rng);
        for (int s = 0; s < ns; ++s) g.style_vertices.push_back("s" + std::to_string(s));
        for (int p = 0; p < np; ++p) g.principle_vertices.push_back("p" + std::to_string(p));
        for (int s = 0; s < ns; ++s)
            for (int p = 0; p < np; ++p)
                if (unit(rng) < 0.7)
                    g.edges[{g.style_vertices[s], g.principle_vertices[p]}] =
                        0.05 + 0.95 * unit(rng);

        std::map<std::string, double> p_vec;
        for (int p = 0; p < np; ++p) p_vec[g.principle_vertices[p]] = 0.05 + unit(rng);

        bool touches = false;
        for (const auto& [key, w] : g.edges)
            if (p_vec.count(key.second)) touches = true;
        if (!touches) continue;

        auto dist = infer_styles(g, p_vec);
        double sum = 0.0;
        for (const auto& [s, v] : dist) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

        std::map<std::string, double> scaled = p_vec;
        double k = 0.1 + 10.0 * unit(rng);
        for (auto& [p, v] : scaled) v *= k;
        auto dist2 = infer_styles(g, scaled);
        for (const auto& [s, v] : dist)
            CHECK(dist2.at(s) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("cosine similarity") {
    std::vector<float> x = {1.0f, 0.0f}, y = {0.0f, 1.0f}, nx = {-2.0f, 0.0f},
                       z = {0.0f, 0.0f};
    CHECK(cosine_similarity(x, x) == doctest::Approx(1.0));
    CHECK(cosine_similarity(x, y) == doctest::Approx(0.0));
    CHECK(cosine_similarity(x, nx) == doctest::Approx(-1.0));
    CHECK(cosine_similarity(x, z) == 0.0);
}

namespace {

struct NearestFixture {
    CaseLibrary lib;
    EmbeddingStore store;

    NearestFixture() {
        store.dim = 2;
        auto add = [&](const std::string& id, float a, float b,
                       std::optional<std::size_t> ref) {
            Case c;
            c.id = id;
            c.embedding_ref = ref;
            lib.cases.push_back(c);
            if (ref) {
                store.ids.push_back(id);
                store.data.push_back(a);
                store.data.push_back(b);
            }
        };
        add("north", 0.0f, 1.0f, 0);
        add("east", 1.0f, 0.0f, 1);
        add("northeast", 1.0f, 1.0f, 2);
        add("no-embedding", 0, 0, std::nullopt);
        Case dangling;
        dangling.id = "dangling";
        dangling.embedding_ref = 99;
        lib.cases.push_back(dangling);
    }
};

}  // namespace

TEST_CASE("nearest cases rank by cosine with id tie-breaks") {
    NearestFixture f;
    std::vector<float> q = {1.0f, 0.0f};

    auto top = nearest_cases(q, f.lib, f.store, 10);
    REQUIRE(top.size() == 3);  // missing and dangling refs are skipped
    CHECK(top[0].first == "east");
    CHECK(top[0].second == doctest::Approx(1.0));
    CHECK(top[1].first == "northeast");
    CHECK(top[1].second == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(top[2].first == "north");
    CHECK(top[2].second == doctest::Approx(0.0));

    auto k1 = nearest_cases(q, f.lib, f.store, 1);
    REQUIRE(k1.size() == 1);
    CHECK(k1[0].first == "east");

    // Equal scores fall back to ascending case id.
    std::vector<float> diag = {1.0f, 1.0f};
    auto tied = nearest_cases(diag, f.lib, f.store, 3);
    REQUIRE(tied.size() == 3);
    CHECK(tied[0].first == "northeast");
    CHECK(tied[1].first == "east");
    CHECK(tied[2].first == "north");

    CHECK_THROWS_AS(nearest_cases(std::vector<float>{1.0f}, f.lib, f.store, 3), StepoError);
    CaseLibrary empty;
    CHECK_THROWS_AS(nearest_cases(q, empty, f.store, 3), StepoError);
}

TEST_CASE("parallel and serial nearest-case scans agree") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> coord(-1.0f, 1.0f);

    CaseLibrary lib;
    EmbeddingStore store;
    store.dim = 16;
    for (int i = 0; i < 257; ++i) {
        Case c;
        c.id = "case-" + std::to_string(i);
        c.embedding_ref = store.count();
        store.ids.push_back(c.id);
        for (std::size_t d = 0; d < store.dim; ++d) store.data.push_back(coord(rng));
        lib.cases.push_back(c);
    }

    for (int trial = 0; trial < 5; ++trial) {
        std::vector<float> q(store.dim);
        for (auto& v : q) v = coord(rng);
        auto a = nearest_cases(q, lib, store, 25);
        auto b = nearest_cases_serial(q, lib, store, 25);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].first == b[i].first);
            CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-12));
        }
    }
}
