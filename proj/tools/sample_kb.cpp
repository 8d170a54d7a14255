// SPDX-License-Identifier: Apache-2.0

#include "sample_kb.hpp"

#include <numeric>

#include "stepo/principles.hpp"
#include "stepo/semantic.hpp"

namespace stepo {

namespace {

GarmentEntity item(const std::string& id, const std::string& category, Role role, double hue,
                   double chroma, double lightness, Shape shape, Fit fit, double ratio,
                   LengthClass length, std::set<std::string> tags) {
    GarmentEntity e;
    e.id = id;
    e.category = category;
    e.role = role;
    e.color.hue_deg = hue;
    e.color.chroma = chroma;
    e.color.lightness = lightness;
    double h = hue * std::numbers::pi / 180.0;
    e.color.lab = {lightness, chroma * std::cos(h), chroma * std::sin(h)};
    e.color.temperature = classify_temperature(hue, chroma);
    e.silhouette.shape = shape;
    e.silhouette.fit = fit;
    e.silhouette.length_ratio = ratio;
    e.silhouette.length_class = length;
    e.tags = std::move(tags);
    return e;
}

SemanticEntity semantic(const std::string& id, SemanticEntity::Kind kind,
                        std::set<std::string> signature) {
    SemanticEntity s;
    s.id = id;
    s.kind = kind;
    s.attribute_signature = std::move(signature);
    return s;
}

RuleAttribute rule(const std::string& id, const std::string& style, const std::string& lhs,
                   RuleOp op, json rhs, const std::string& unit, double weight) {
    RuleAttribute r;
    r.id = id;
    r.style = style;
    r.lhs = lhs;
    r.op = op;
    r.rhs = std::move(rhs);
    r.unit = unit;
    r.weight = weight;
    return r;
}

std::vector<float> embed(const GarmentEntity& e) {
    std::vector<float> v(8, 0.0f);
    v[static_cast<int>(e.silhouette.shape)] = 2.0f;
    v[5] = static_cast<float>(e.silhouette.fit) / 2.0f;
    v[6] = static_cast<float>(e.silhouette.length_class) / 2.0f;
    v[7] = static_cast<float>(e.color.chroma) / 50.0f;
    return v;
}

Case make_case(const std::string& id, const std::string& text,
               std::map<std::string, double> styles, std::map<std::string, double> principles,
               std::vector<std::string> items) {
    Case c;
    c.id = id;
    c.text = text;
    c.style_vector = std::move(styles);
    c.principle_vector = std::move(principles);
    c.item_ids = std::move(items);
    return c;
}

}  // namespace

KnowledgeBase make_sample_kb() {
    KnowledgeBase kb;

    kb.entities = {
        // tops
        item("shirt-white", "shirt", Role::Top, 0, 3, 92, Shape::H, Fit::Fitted, 0.45,
             LengthClass::Regular, {"straight cut", "timeless", "formal", "business"}),
        item("shirt-blue", "shirt", Role::Top, 225, 25, 65, Shape::H, Fit::Fitted, 0.45,
             LengthClass::Regular, {"straight cut"}),
        item("blouse-blush", "blouse", Role::Top, 10, 18, 78, Shape::A, Fit::Loose, 0.40,
             LengthClass::Regular, {"flowy", "evening"}),
        item("blouse-olive", "blouse", Role::Top, 100, 20, 45, Shape::A, Fit::Loose, 0.42,
             LengthClass::Regular, {"patterned", "flowy"}),
        item("tshirt-white", "tshirt", Role::Top, 0, 2, 90, Shape::H, Fit::Fitted, 0.40,
             LengthClass::Regular, {"timeless", "relaxed"}),
        item("tshirt-black", "tshirt", Role::Top, 0, 3, 15, Shape::H, Fit::Fitted, 0.40,
             LengthClass::Regular, {"athletic"}),
        item("blazer-grey-light", "blazer", Role::Top, 0, 4, 75, Shape::H, Fit::Loose, 0.55,
             LengthClass::Regular, {"structured", "straight cut", "formal", "business"}),
        item("blazer-navy", "blazer", Role::Top, 250, 30, 25, Shape::H, Fit::Fitted, 0.55,
             LengthClass::Regular, {"structured", "straight cut", "formal", "business"}),
        item("sweater-camel", "sweater", Role::Top, 60, 28, 65, Shape::O, Fit::Loose, 0.50,
             LengthClass::Regular, {"soft tailoring"}),
        item("sweater-grey", "sweater", Role::Top, 0, 6, 55, Shape::O, Fit::Loose, 0.50,
             LengthClass::Regular, {"soft tailoring", "versatile"}),
        item("hoodie-grey", "hoodie", Role::Top, 0, 5, 50, Shape::O, Fit::Loose, 0.55,
             LengthClass::Regular, {"athletic", "relaxed"}),
        item("jacket-navy", "jacket", Role::Top, 250, 28, 28, Shape::H, Fit::Fitted, 0.50,
             LengthClass::Regular, {"versatile", "structured"}),
        item("jacket-black", "jacket", Role::Top, 0, 5, 18, Shape::X, Fit::Fitted, 0.50,
             LengthClass::Regular, {"evening", "structured"}),
        // bottoms
        item("pants-black-slim", "trousers", Role::Bottom, 0, 4, 15, Shape::H, Fit::Tight, 1.0,
             LengthClass::Regular, {"straight cut", "formal", "business"}),
        item("trousers-navy", "trousers", Role::Bottom, 250, 22, 28, Shape::H, Fit::Fitted, 1.0,
             LengthClass::Regular, {"straight cut", "formal", "business"}),
        item("trousers-grey-wide", "trousers", Role::Bottom, 0, 5, 55, Shape::H, Fit::Loose, 1.0,
             LengthClass::Long, {"straight cut"}),
        item("jeans-blue", "jeans", Role::Bottom, 230, 30, 45, Shape::H, Fit::Fitted, 1.0,
             LengthClass::Regular, {"denim", "relaxed"}),
        item("jeans-black", "jeans", Role::Bottom, 0, 4, 18, Shape::H, Fit::Tight, 1.0,
             LengthClass::Regular, {"denim"}),
        item("jeans-ripped", "jeans", Role::Bottom, 228, 28, 50, Shape::H, Fit::Tight, 0.95,
             LengthClass::Regular, {"denim", "ripped"}),
        item("skirt-white", "skirt", Role::Bottom, 0, 3, 88, Shape::A, Fit::Fitted, 0.60,
             LengthClass::Regular, {"flowy", "evening"}),
        item("skirt-camel-long", "skirt", Role::Bottom, 55, 25, 60, Shape::A, Fit::Loose, 1.10,
             LengthClass::Long, {"flowy", "patterned"}),
        item("shorts-khaki", "shorts", Role::Bottom, 70, 20, 60, Shape::H, Fit::Fitted, 0.40,
             LengthClass::Cropped, {"relaxed", "versatile"}),
        item("shorts-black", "shorts", Role::Bottom, 0, 4, 20, Shape::H, Fit::Fitted, 0.38,
             LengthClass::Cropped, {"athletic"}),
        item("chinos-camel", "chinos", Role::Bottom, 60, 24, 62, Shape::H, Fit::Fitted, 1.0,
             LengthClass::Regular, {"soft tailoring", "versatile"}),
        item("chinos-olive", "chinos", Role::Bottom, 100, 18, 40, Shape::H, Fit::Fitted, 1.0,
             LengthClass::Regular, {"soft tailoring"}),
        item("leggings-black", "leggings", Role::Bottom, 0, 3, 12, Shape::H, Fit::Tight, 0.95,
             LengthClass::Long, {"athletic"}),
    };

    kb.semantics = {
        semantic("business", SemanticEntity::Kind::Scenario, {"formal"}),
        semantic("casual_day", SemanticEntity::Kind::Scenario, {"relaxed"}),
        semantic("date_night", SemanticEntity::Kind::Scenario, {"evening"}),
        semantic("athleisure", SemanticEntity::Kind::Scenario, {"athletic"}),
        semantic("travel", SemanticEntity::Kind::Scenario, {"versatile"}),
        semantic("business_formal", SemanticEntity::Kind::Style,
                 {"neutral color", "straight cut"}),
        semantic("smart_casual", SemanticEntity::Kind::Style, {"soft tailoring"}),
        semantic("minimalist", SemanticEntity::Kind::Style, {"neutral color"}),
        semantic("street", SemanticEntity::Kind::Style, {"denim"}),
        semantic("romantic", SemanticEntity::Kind::Style, {"flowy"}),
        semantic("sporty", SemanticEntity::Kind::Style, {"athletic"}),
        semantic("boho", SemanticEntity::Kind::Style, {"patterned"}),
        semantic("classic", SemanticEntity::Kind::Style, {"timeless"}),
    };

    kb.rules = {
        rule("col-harmony", "", "delta_h", RuleOp::Le, 120.0, "deg", 0.8),
        rule("col-chroma-ratio", "", "s_ratio", RuleOp::Le, 4.0, "", 0.5),
        rule("sil-balance", "", "length_split", RuleOp::Le, 0.75, "", 0.7),
        rule("bf-neutral", "business_formal", "descriptors", RuleOp::In,
             json::array({"neutral color"}), "", 0.9),
        rule("bf-straight", "business_formal", "descriptors", RuleOp::In,
             json::array({"straight cut"}), "", 0.8),
        rule("bf-no-ripped", "business_formal", "descriptors", RuleOp::NotIn,
             json::array({"ripped"}), "", 1.0),
        rule("min-neutral", "minimalist", "descriptors", RuleOp::In,
             json::array({"neutral color"}), "", 0.8),
        rule("st-denim", "street", "descriptors", RuleOp::In, json::array({"denim"}), "", 0.7),
        rule("ro-flowy", "romantic", "descriptors", RuleOp::In, json::array({"flowy"}), "", 0.7),
        rule("sp-athletic", "sporty", "descriptors", RuleOp::In, json::array({"athletic"}), "",
             0.8),
    };

    kb.principle_params = default_principle_params();

    kb.cases.cases = {
        make_case("c-business-1", "structured light grey blazer over black slim trousers",
                  {{"business_formal", 0.9}, {"minimalist", 0.6}},
                  {{"silhouette", 0.9}, {"color", 0.85}},
                  {"blazer-grey-light", "pants-black-slim"}),
        make_case("c-business-2", "white shirt with navy tailored trousers",
                  {{"business_formal", 0.85}, {"classic", 0.6}},
                  {{"silhouette", 0.85}, {"color", 0.8}},
                  {"shirt-white", "trousers-navy"}),
        make_case("c-smart-1", "camel sweater with matching chinos",
                  {{"smart_casual", 0.8}}, {{"silhouette", 0.8}, {"color", 0.75}},
                  {"sweater-camel", "chinos-camel"}),
        make_case("c-minimal-1", "white tee with black jeans",
                  {{"minimalist", 0.8}}, {{"silhouette", 0.75}, {"color", 0.9}},
                  {"tshirt-white", "jeans-black"}),
        make_case("c-street-1", "grey hoodie with blue jeans",
                  {{"street", 0.85}}, {{"silhouette", 0.7}, {"color", 0.6}},
                  {"hoodie-grey", "jeans-blue"}),
        make_case("c-sporty-1", "black tee with black leggings",
                  {{"sporty", 0.9}}, {{"silhouette", 0.8}, {"color", 0.95}},
                  {"tshirt-black", "leggings-black"}),
        make_case("c-romantic-1", "blush blouse with white skirt",
                  {{"romantic", 0.85}}, {{"silhouette", 0.7}, {"color", 0.8}},
                  {"blouse-blush", "skirt-white"}),
        make_case("c-boho-1", "olive blouse with long camel skirt",
                  {{"boho", 0.8}}, {{"silhouette", 0.6}, {"color", 0.7}},
                  {"blouse-olive", "skirt-camel-long"}),
        make_case("c-travel-1", "navy jacket with blue jeans",
                  {{"classic", 0.7}, {"smart_casual", 0.65}},
                  {{"silhouette", 0.75}, {"color", 0.7}},
                  {"jacket-navy", "jeans-blue"}),
    };

    const std::vector<std::pair<std::string, std::array<double, 2>>> strength_rows = {
        {"business_formal", {0.9, 0.85}}, {"smart_casual", {0.7, 0.7}},
        {"minimalist", {0.6, 0.8}},       {"street", {0.6, 0.5}},
        {"romantic", {0.5, 0.8}},         {"sporty", {0.7, 0.6}},
        {"boho", {0.4, 0.7}},             {"classic", {0.8, 0.75}},
    };
    std::map<std::pair<std::string, std::string>, double> strengths;
    for (const auto& [style, sc] : strength_rows) {
        strengths[{style, "silhouette"}] = sc[0];
        strengths[{style, "color"}] = sc[1];
    }

    kb.trends = {
        {"trend-wide-leg", "aw26", TrendEntry::Kind::Silhouette, {"loose fit", "trousers"}, 0.8},
        {"trend-monochrome", "aw26", TrendEntry::Kind::Color, {"neutral color"}, 0.7},
    };

    kb.matrix.scenarios = {"business", "casual_day", "date_night", "athleisure", "travel"};
    kb.matrix.styles = {"business_formal", "smart_casual", "minimalist", "street",
                        "romantic",        "sporty",       "boho",       "classic"};
    kb.matrix.values = {
        0.95, 0.75, 0.80, 0.15, 0.10, 0.30, 0.40, 0.20,  // business
        0.25, 0.80, 0.70, 0.75, 0.55, 0.60, 0.65, 0.70,  // casual_day
        0.45, 0.70, 0.60, 0.50, 0.85, 0.30, 0.55, 0.75,  // date_night
        0.05, 0.35, 0.40, 0.65, 0.20, 0.95, 0.30, 0.25,  // athleisure
        0.30, 0.75, 0.70, 0.60, 0.40, 0.70, 0.55, 0.80,  // travel
    };

    // Embeddings: one attribute-coded row per entity, then one per case
    // (mean of its items), so anchors and cases share a space.
    kb.embeddings.dim = 8;
    for (auto& e : kb.entities) {
        e.embedding_ref = kb.embeddings.count();
        kb.embeddings.ids.push_back(e.id);
        auto v = embed(e);
        kb.embeddings.data.insert(kb.embeddings.data.end(), v.begin(), v.end());
    }
    for (auto& c : kb.cases.cases) {
        std::vector<float> mean(kb.embeddings.dim, 0.0f);
        for (const auto& id : c.item_ids) {
            const GarmentEntity* e = kb.find_entity(id);
            auto v = embed(*e);
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
        }
        for (auto& x : mean) x /= static_cast<float>(c.item_ids.size());
        c.embedding_ref = kb.embeddings.count();
        kb.embeddings.ids.push_back(c.id);
        kb.embeddings.data.insert(kb.embeddings.data.end(), mean.begin(), mean.end());
    }

    kb.graph = build_graph(kb.cases, strengths, 0.5, 0.5);
    kb.cached_edges = kb.graph.edges;
    return kb;
}

}  // namespace stepo
