// SPDX-License-Identifier: Apache-2.0

#include "stepo/kb.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace stepo {

namespace fs = std::filesystem;

const GarmentEntity* KnowledgeBase::find_entity(const std::string& id) const {
    for (const auto& e : entities)
        if (e.id == id) return &e;
    return nullptr;
}

const SemanticEntity* KnowledgeBase::find_semantic(const std::string& id) const {
    for (const auto& s : semantics)
        if (s.id == id) return &s;
    return nullptr;
}

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw KbError(path.filename().string(), "missing " + path.stem().string() + " file");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw KbError(path.filename().string(), std::string("malformed JSON: ") + e.what());
    }
}

std::string locus(const char* file, std::size_t record, const json& rec) {
    if (rec.is_object() && rec.contains("id") && rec.at("id").is_string())
        return std::string(file) + "#" + rec.at("id").get<std::string>();
    return std::string(file) + "#" + std::to_string(record);
}

template <typename F>
auto parse_record(const std::string& where, F f) {
    try {
        return f();
    } catch (const KbError&) {
        throw;
    } catch (const std::exception& e) {
        throw KbError(where, e.what());
    }
}

ColorSpec parse_color(const json& j, bool derive_lab) {
    ColorSpec c;
    c.hue_deg = j.at("hue_deg").get<double>();
    c.chroma = j.at("chroma").get<double>();
    c.lightness = j.at("lightness").get<double>();
    if (j.contains("lab"))
        c.lab = j.at("lab").get<std::array<double, 3>>();
    else if (derive_lab) {
        double h = c.hue_deg * std::numbers::pi / 180.0;
        c.lab = {c.lightness, c.chroma * std::cos(h), c.chroma * std::sin(h)};
    }
    if (j.contains("temperature"))
        c.temperature = temperature_from_string(j.at("temperature").get<std::string>());
    else
        c.temperature = classify_temperature(c.hue_deg, c.chroma);
    return c;
}

json color_to_json(const ColorSpec& c) {
    return json{{"chroma", c.chroma},
                {"hue_deg", c.hue_deg},
                {"lab", c.lab},
                {"lightness", c.lightness},
                {"temperature", to_string(c.temperature)}};
}

SilhouetteSpec parse_silhouette(const json& j) {
    SilhouetteSpec s;
    s.shape = shape_from_string(j.at("shape").get<std::string>());
    s.fit = fit_from_string(j.at("fit").get<std::string>());
    s.length_ratio = j.at("length_ratio").get<double>();
    s.length_class = length_class_from_string(j.at("length_class").get<std::string>());
    return s;
}

json silhouette_to_json(const SilhouetteSpec& s) {
    return json{{"fit", to_string(s.fit)},
                {"length_class", to_string(s.length_class)},
                {"length_ratio", s.length_ratio},
                {"shape", to_string(s.shape)}};
}

std::vector<GarmentEntity> parse_entities(const fs::path& root, bool derive_lab) {
    json arr = read_json_file(root / "entities.json");
    if (!arr.is_array()) throw KbError("entities.json", "expected a top-level array");
    std::vector<GarmentEntity> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& j = arr[i];
        out.push_back(parse_record(locus("entities.json", i, j),
                                   [&] { return entity_from_json(j, derive_lab); }));
    }
    return out;
}

std::vector<SemanticEntity> parse_semantics(const fs::path& root) {
    json arr = read_json_file(root / "semantics.json");
    if (!arr.is_array()) throw KbError("semantics.json", "expected a top-level array");
    std::vector<SemanticEntity> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& j = arr[i];
        out.push_back(parse_record(locus("semantics.json", i, j), [&] {
            SemanticEntity s;
            s.id = j.at("id").get<std::string>();
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "style")
                s.kind = SemanticEntity::Kind::Style;
            else if (kind == "scenario")
                s.kind = SemanticEntity::Kind::Scenario;
            else
                throw StepoError("unknown semantic kind: \"" + kind + "\"");
            for (const auto& a : j.at("attribute_signature"))
                s.attribute_signature.insert(a.get<std::string>());
            return s;
        }));
    }
    return out;
}

std::vector<RuleAttribute> parse_rules(const fs::path& root) {
    json arr = read_json_file(root / "rules.json");
    if (!arr.is_array()) throw KbError("rules.json", "expected a top-level array");
    std::vector<RuleAttribute> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& j = arr[i];
        out.push_back(parse_record(locus("rules.json", i, j), [&] {
            RuleAttribute r;
            r.id = j.at("id").get<std::string>();
            r.style = j.value("style", "");
            r.lhs = j.at("lhs").get<std::string>();
            r.op = rule_op_from_string(j.at("op").get<std::string>());
            r.rhs = j.at("rhs");
            r.unit = j.value("unit", "");
            r.weight = j.value("weight", 1.0);
            return r;
        }));
    }
    return out;
}

StyleRuleGraph parse_graph_inputs(const fs::path& root,
                                  std::map<std::pair<std::string, std::string>, double>* cached) {
    json j = read_json_file(root / "graph.json");
    StyleRuleGraph g;
    g.lambda = j.at("lambda").get<double>();
    g.activation_threshold = j.value("activation_threshold", 0.5);
    for (std::size_t i = 0; i < j.at("strengths").size(); ++i) {
        const json& s = j.at("strengths")[i];
        parse_record("graph.json#strengths[" + std::to_string(i) + "]", [&] {
            g.strengths[{s.at("style").get<std::string>(),
                         s.at("principle").get<std::string>()}] = s.at("value").get<double>();
            return 0;
        });
    }
    if (j.contains("edges")) {
        for (std::size_t i = 0; i < j.at("edges").size(); ++i) {
            const json& e = j.at("edges")[i];
            parse_record("graph.json#edges[" + std::to_string(i) + "]", [&] {
                (*cached)[{e.at("style").get<std::string>(),
                           e.at("principle").get<std::string>()}] =
                    e.at("weight").get<double>();
                return 0;
            });
        }
    }
    return g;
}

CaseLibrary parse_cases(const fs::path& root) {
    std::ifstream in(root / "cases.jsonl");
    if (!in) throw KbError("cases.jsonl", "missing cases file");
    CaseLibrary lib;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw KbError("cases.jsonl#" + std::to_string(n),
                          std::string("malformed JSON: ") + e.what());
        }
        lib.cases.push_back(parse_record(locus("cases.jsonl", n, j), [&] {
            Case c;
            c.id = j.at("id").get<std::string>();
            if (j.contains("embedding_ref"))
                c.embedding_ref = j.at("embedding_ref").get<std::size_t>();
            c.text = j.value("text", "");
            for (auto it = j.at("style_vector").begin(); it != j.at("style_vector").end(); ++it)
                c.style_vector[it.key()] = it->get<double>();
            for (auto it = j.at("principle_vector").begin(); it != j.at("principle_vector").end();
                 ++it)
                c.principle_vector[it.key()] = it->get<double>();
            for (const auto& id : j.at("item_ids")) c.item_ids.push_back(id.get<std::string>());
            return c;
        }));
    }
    return lib;
}

std::vector<TrendEntry> parse_trends(const fs::path& root) {
    json arr = read_json_file(root / "trends.json");
    if (!arr.is_array()) throw KbError("trends.json", "expected a top-level array");
    std::vector<TrendEntry> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& j = arr[i];
        out.push_back(parse_record(locus("trends.json", i, j), [&] {
            TrendEntry t;
            t.id = j.at("id").get<std::string>();
            t.season = j.at("season").get<std::string>();
            t.kind = trend_kind_from_string(j.at("kind").get<std::string>());
            for (const auto& a : j.at("attribute_signature"))
                t.attribute_signature.insert(a.get<std::string>());
            t.weight = j.at("weight").get<double>();
            return t;
        }));
    }
    return out;
}

ScenarioStyleMatrix parse_matrix(const fs::path& root) {
    json j = read_json_file(root / "scenario_style_matrix.json");
    return parse_record("scenario_style_matrix.json", [&] {
        ScenarioStyleMatrix m;
        for (const auto& s : j.at("scenarios")) m.scenarios.push_back(s.get<std::string>());
        for (const auto& s : j.at("styles")) m.styles.push_back(s.get<std::string>());
        const json& rows = j.at("values");
        if (rows.size() != m.scenarios.size())
            throw StepoError("matrix has " + std::to_string(rows.size()) + " rows for " +
                             std::to_string(m.scenarios.size()) + " scenarios");
        for (const auto& row : rows) {
            if (row.size() != m.styles.size())
                throw StepoError("matrix row width != style count");
            for (const auto& v : row) m.values.push_back(v.get<double>());
        }
        return m;
    });
}

EmbeddingStore parse_embeddings(const fs::path& root) {
    json meta = read_json_file(root / "embeddings.meta.json");
    EmbeddingStore store;
    parse_record("embeddings.meta.json", [&] {
        store.dim = meta.at("dim").get<std::size_t>();
        for (const auto& id : meta.at("ids")) store.ids.push_back(id.get<std::string>());
        std::size_t count = meta.at("count").get<std::size_t>();
        if (count != store.ids.size())
            throw StepoError("count " + std::to_string(count) + " != ids length " +
                             std::to_string(store.ids.size()));
        return 0;
    });

    std::ifstream bin(root / "embeddings.bin", std::ios::binary);
    if (!bin) throw KbError("embeddings.bin", "missing embeddings file");
    std::vector<char> bytes((std::istreambuf_iterator<char>(bin)),
                            std::istreambuf_iterator<char>());
    std::size_t expect = store.ids.size() * store.dim * sizeof(float);
    if (bytes.size() != expect)
        throw KbError("embeddings.bin", "size " + std::to_string(bytes.size()) +
                                            " bytes, expected " + std::to_string(expect));
    store.data.resize(store.ids.size() * store.dim);
    // Stored little-endian; this build targets little-endian hosts.
    std::memcpy(store.data.data(), bytes.data(), bytes.size());
    return store;
}

}  // namespace

KnowledgeBase load_kb_unchecked(const fs::path& root, const LoadOptions& opts) {
    KnowledgeBase kb;
    kb.entities = parse_entities(root, opts.derive_lab);
    kb.semantics = parse_semantics(root);
    kb.rules = parse_rules(root);
    kb.principle_params = parse_record("principle_params.json", [&] {
        return principle_params_from_json(read_json_file(root / "principle_params.json"));
    });
    std::map<std::pair<std::string, std::string>, double> cached;
    StyleRuleGraph inputs = parse_graph_inputs(root, &cached);
    kb.cases = parse_cases(root);
    kb.trends = parse_trends(root);
    kb.matrix = parse_matrix(root);
    kb.embeddings = parse_embeddings(root);

    kb.graph = build_graph(kb.cases, inputs.strengths, inputs.lambda,
                           inputs.activation_threshold);
    kb.cached_edges = cached.empty() ? std::nullopt : std::make_optional(std::move(cached));
    return kb;
}

namespace {

void check_unit(std::vector<ValidationFinding>& f, const std::string& locus,
                const std::string& what, double v) {
    if (v < 0.0 || v > 1.0)
        f.push_back({locus, what + " " + std::to_string(v) + " out of [0,1]"});
}

}  // namespace

ValidationReport validate_kb(const KnowledgeBase& kb) {
    ValidationReport report;
    auto& f = report.findings;

    std::set<std::string> entity_ids;
    std::map<std::string, Role> category_role;
    for (const auto& e : kb.entities) {
        std::string at = "entities.json#" + e.id;
        if (!entity_ids.insert(e.id).second) f.push_back({at, "duplicate entity id"});
        if (e.color.hue_deg < 0.0 || e.color.hue_deg >= 360.0)
            f.push_back({at, "hue " + std::to_string(e.color.hue_deg) + " out of [0,360)"});
        if (e.color.lightness < 0.0 || e.color.lightness > 100.0)
            f.push_back({at, "lightness out of [0,100]"});
        if (e.color.chroma < 0.0) f.push_back({at, "negative chroma"});
        else if (e.color.hue_deg >= 0.0 && e.color.hue_deg < 360.0 &&
                 e.color.temperature != classify_temperature(e.color.hue_deg, e.color.chroma))
            f.push_back({at, "temperature tag inconsistent with hue band"});
        if (e.silhouette.length_ratio <= 0.0 || e.silhouette.length_ratio > 2.0)
            f.push_back({at, "length_ratio out of (0,2]"});
        if (e.embedding_ref && *e.embedding_ref >= kb.embeddings.count())
            f.push_back({at, "embedding_ref out of range"});
        auto [it, fresh] = category_role.emplace(e.category, e.role);
        if (!fresh && it->second != e.role)
            f.push_back({at, "category \"" + e.category + "\" used with conflicting roles"});
    }

    std::set<std::string> semantic_ids;
    for (const auto& s : kb.semantics)
        if (!semantic_ids.insert(s.id).second)
            f.push_back({"semantics.json#" + s.id, "duplicate semantic id"});

    for (const auto& r : kb.rules) {
        std::string at = "rules.json#" + r.id;
        if (r.weight < 0.0) f.push_back({at, "negative weight"});
        bool needs_list = r.op == RuleOp::In || r.op == RuleOp::NotIn;
        if (needs_list && !r.rhs.is_array())
            f.push_back({at, "op " + to_string(r.op) + " needs an array rhs"});
        if (!needs_list && r.rhs.is_array())
            f.push_back({at, "op " + to_string(r.op) + " cannot take an array rhs"});
        if ((r.op == RuleOp::Ge || r.op == RuleOp::Le) && !r.rhs.is_number())
            f.push_back({at, "op " + to_string(r.op) + " needs a numeric rhs"});
        if (!r.style.empty() && !semantic_ids.count(r.style))
            f.push_back({at, "style \"" + r.style + "\" not a semantic entity"});
    }

    {
        const auto& p = kb.principle_params;
        double sr = p.rho[0] + p.rho[1] + p.rho[2];
        if (std::fabs(sr - 1.0) > 1e-9)
            f.push_back({"principle_params.json", "rho sums to " + std::to_string(sr)});
        double sb = p.beta[0] + p.beta[1] + p.beta[2] + p.beta[3];
        if (std::fabs(sb - 1.0) > 1e-9)
            f.push_back({"principle_params.json", "beta sums to " + std::to_string(sb)});
        if (p.golden_sigma <= 0.0)
            f.push_back({"principle_params.json", "golden_sigma must be positive"});
        for (const auto& row : p.shape_compat)
            for (double v : row) check_unit(f, "principle_params.json", "shape_compat value", v);
        for (const auto& row : p.fit_contrast)
            for (double v : row) check_unit(f, "principle_params.json", "fit_contrast value", v);
        for (Fit k : kAllFits)
            if (!p.sil_tables.fit.count(k))
                f.push_back({"principle_params.json", "sil_tables.fit missing " + to_string(k)});
        for (Shape k : kAllShapes)
            if (!p.sil_tables.shape.count(k))
                f.push_back({"principle_params.json", "sil_tables.shape missing " + to_string(k)});
        for (LengthClass k : kAllLengths)
            if (!p.sil_tables.length.count(k))
                f.push_back(
                    {"principle_params.json", "sil_tables.length missing " + to_string(k)});
    }

    {
        const auto& g = kb.graph;
        check_unit(f, "graph.json", "lambda", g.lambda);
        check_unit(f, "graph.json", "activation_threshold", g.activation_threshold);
        for (const auto& [key, v] : g.strengths)
            if (v < 0.0)
                f.push_back({"graph.json", "strength (" + key.first + "," + key.second +
                                               ") is negative"});
        for (const auto& [key, v] : g.edges)
            check_unit(f, "graph.json", "edge (" + key.first + "," + key.second + ")", v);
        if (kb.cached_edges && *kb.cached_edges != g.edges)
            f.push_back({"graph.json", "cached edges disagree with rebuild from cases+strengths"});
    }

    std::set<std::string> case_ids;
    for (const auto& c : kb.cases.cases) {
        std::string at = "cases.jsonl#" + c.id;
        if (!case_ids.insert(c.id).second) f.push_back({at, "duplicate case id"});
        for (const auto& [s, v] : c.style_vector)
            check_unit(f, at, ("style_vector[" + s + "]").c_str(), v);
        for (const auto& [p, v] : c.principle_vector)
            check_unit(f, at, ("principle_vector[" + p + "]").c_str(), v);
        for (const auto& id : c.item_ids)
            if (!entity_ids.count(id))
                f.push_back({at, "item \"" + id + "\" does not resolve"});
        if (c.embedding_ref && *c.embedding_ref >= kb.embeddings.count())
            f.push_back({at, "embedding_ref out of range"});
    }

    for (const auto& t : kb.trends)
        check_unit(f, "trends.json#" + t.id, "weight", t.weight);

    {
        const auto& m = kb.matrix;
        std::set<std::string> seen;
        for (const auto& s : m.scenarios) {
            if (!seen.insert(s).second)
                f.push_back({"scenario_style_matrix.json", "duplicate scenario \"" + s + "\""});
            const SemanticEntity* sem = kb.find_semantic(s);
            if (!sem || sem->kind != SemanticEntity::Kind::Scenario)
                f.push_back({"scenario_style_matrix.json",
                             "scenario \"" + s + "\" not a scenario semantic entity"});
        }
        seen.clear();
        for (const auto& s : m.styles) {
            if (!seen.insert(s).second)
                f.push_back({"scenario_style_matrix.json", "duplicate style \"" + s + "\""});
            const SemanticEntity* sem = kb.find_semantic(s);
            if (!sem || sem->kind != SemanticEntity::Kind::Style)
                f.push_back({"scenario_style_matrix.json",
                             "style \"" + s + "\" not a style semantic entity"});
        }
        for (double v : m.values) check_unit(f, "scenario_style_matrix.json", "compatibility", v);
        if (m.values.size() != m.scenarios.size() * m.styles.size())
            f.push_back({"scenario_style_matrix.json", "value grid shape mismatch"});
    }

    {
        std::set<std::string> seen;
        for (const auto& id : kb.embeddings.ids)
            if (!seen.insert(id).second)
                f.push_back({"embeddings.meta.json", "duplicate embedding id \"" + id + "\""});
        if (kb.embeddings.data.size() != kb.embeddings.count() * kb.embeddings.dim)
            f.push_back({"embeddings.meta.json", "binary payload shape mismatch"});
    }

    return report;
}

KnowledgeBase load_kb(const fs::path& root, const LoadOptions& opts) {
    KnowledgeBase kb = load_kb_unchecked(root, opts);
    ValidationReport report = validate_kb(kb);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << report.findings.front().message;
        if (report.findings.size() > 1)
            msg << " (+" << report.findings.size() - 1 << " more findings)";
        throw KbError(report.findings.front().locus, msg.str());
    }
    return kb;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw KbError(path.filename().string(), "cannot open for writing");
    out << text;
}

void write_json_file(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json case_to_json(const Case& c) {
    json j{{"id", c.id},
           {"item_ids", c.item_ids},
           {"principle_vector", c.principle_vector},
           {"style_vector", c.style_vector},
           {"text", c.text}};
    if (c.embedding_ref) j["embedding_ref"] = *c.embedding_ref;
    return j;
}

}  // namespace

void serialize_kb(const KnowledgeBase& kb, const fs::path& root) {
    fs::create_directories(root);

    auto entities = kb.entities;
    std::sort(entities.begin(), entities.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    json ej = json::array();
    for (const auto& e : entities) ej.push_back(entity_to_json(e));
    write_json_file(root / "entities.json", ej);

    auto semantics = kb.semantics;
    std::sort(semantics.begin(), semantics.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    json sj = json::array();
    for (const auto& s : semantics)
        sj.push_back(json{{"attribute_signature", s.attribute_signature},
                          {"id", s.id},
                          {"kind", s.kind == SemanticEntity::Kind::Style ? "style" : "scenario"}});
    write_json_file(root / "semantics.json", sj);

    auto rules = kb.rules;
    std::sort(rules.begin(), rules.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    json rj = json::array();
    for (const auto& r : rules) {
        json j{{"id", r.id}, {"lhs", r.lhs},   {"op", to_string(r.op)},
               {"rhs", r.rhs}, {"weight", r.weight}};
        if (!r.style.empty()) j["style"] = r.style;
        if (!r.unit.empty()) j["unit"] = r.unit;
        rj.push_back(j);
    }
    write_json_file(root / "rules.json", rj);

    write_json_file(root / "principle_params.json",
                    principle_params_to_json(kb.principle_params));

    json gj;
    gj["lambda"] = kb.graph.lambda;
    gj["activation_threshold"] = kb.graph.activation_threshold;
    json strengths = json::array();
    for (const auto& [key, v] : kb.graph.strengths)
        strengths.push_back(json{{"principle", key.second}, {"style", key.first}, {"value", v}});
    gj["strengths"] = strengths;
    json edges = json::array();
    for (const auto& [key, v] : kb.graph.edges)
        edges.push_back(json{{"principle", key.second}, {"style", key.first}, {"weight", v}});
    gj["edges"] = edges;
    write_json_file(root / "graph.json", gj);

    auto cases = kb.cases.cases;
    std::sort(cases.begin(), cases.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::string lines;
    for (const auto& c : cases) lines += case_to_json(c).dump() + "\n";
    write_text(root / "cases.jsonl", lines);

    auto trends = kb.trends;
    std::sort(trends.begin(), trends.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    json tj = json::array();
    for (const auto& t : trends)
        tj.push_back(json{{"attribute_signature", t.attribute_signature},
                          {"id", t.id},
                          {"kind", to_string(t.kind)},
                          {"season", t.season},
                          {"weight", t.weight}});
    write_json_file(root / "trends.json", tj);

    json mj;
    mj["scenarios"] = kb.matrix.scenarios;
    mj["styles"] = kb.matrix.styles;
    json rows = json::array();
    for (std::size_t i = 0; i < kb.matrix.scenarios.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < kb.matrix.styles.size(); ++j)
            row.push_back(kb.matrix.at(i, j));
        rows.push_back(row);
    }
    mj["values"] = rows;
    write_json_file(root / "scenario_style_matrix.json", mj);

    json mej{{"count", kb.embeddings.count()},
             {"dim", kb.embeddings.dim},
             {"ids", kb.embeddings.ids}};
    write_json_file(root / "embeddings.meta.json", mej);
    std::ofstream bin(root / "embeddings.bin", std::ios::binary);
    if (!bin) throw KbError("embeddings.bin", "cannot open for writing");
    bin.write(reinterpret_cast<const char*>(kb.embeddings.data.data()),
              static_cast<std::streamsize>(kb.embeddings.data.size() * sizeof(float)));
}

std::vector<SemanticEntity> project(const GarmentEntity& entity, const KnowledgeBase& kb) {
    if (!kb.find_entity(entity.id))
        throw StepoError("project: entity \"" + entity.id + "\" not in the knowledge base");
    auto descriptors = effective_descriptors(entity);
    std::vector<SemanticEntity> out;
    for (const auto& s : kb.semantics) {
        bool all = std::all_of(s.attribute_signature.begin(), s.attribute_signature.end(),
                               [&](const std::string& a) { return descriptors.count(a) > 0; });
        if (all) out.push_back(s);
    }
    return out;
}

GarmentEntity entity_from_json(const json& j, bool derive_lab) {
    GarmentEntity e;
    e.id = j.at("id").get<std::string>();
    e.category = j.at("category").get<std::string>();
    e.role = role_from_string(j.at("role").get<std::string>());
    e.color = parse_color(j.at("color"), derive_lab);
    e.silhouette = parse_silhouette(j.at("silhouette"));
    for (const auto& t : j.value("tags", json::array())) e.tags.insert(t.get<std::string>());
    if (j.contains("embedding_ref")) e.embedding_ref = j.at("embedding_ref").get<std::size_t>();
    return e;
}

json entity_to_json(const GarmentEntity& e) {
    json j{{"category", e.category}, {"color", color_to_json(e.color)},
           {"id", e.id},             {"role", to_string(e.role)},
           {"silhouette", silhouette_to_json(e.silhouette)},
           {"tags", e.tags}};
    if (e.embedding_ref) j["embedding_ref"] = *e.embedding_ref;
    return j;
}

}  // namespace stepo
