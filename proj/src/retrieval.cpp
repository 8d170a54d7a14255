// SPDX-License-Identifier: Apache-2.0

#include "stepo/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "stepo/principles.hpp"
#include "stepo/semantic.hpp"

namespace stepo {

std::string to_string(KnowledgeSource s) {
    switch (s) {
        case KnowledgeSource::Case: return "case";
        case KnowledgeSource::SceneStyle: return "scene_style";
        case KnowledgeSource::ColorRule: return "color_rule";
        case KnowledgeSource::SilhouetteRule: return "silhouette_rule";
        case KnowledgeSource::Preference: return "preference";
        case KnowledgeSource::Trend: return "trend";
    }
    return "case";
}

KnowledgeSource knowledge_source_from_string(const std::string& s) {
    if (s == "case") return KnowledgeSource::Case;
    if (s == "scene_style") return KnowledgeSource::SceneStyle;
    if (s == "color_rule") return KnowledgeSource::ColorRule;
    if (s == "silhouette_rule") return KnowledgeSource::SilhouetteRule;
    if (s == "preference") return KnowledgeSource::Preference;
    if (s == "trend") return KnowledgeSource::Trend;
    throw StepoError("unknown knowledge source: \"" + s + "\"");
}

int source_priority(KnowledgeSource s) {
    switch (s) {
        case KnowledgeSource::SceneStyle: return 0;
        case KnowledgeSource::ColorRule: return 1;
        case KnowledgeSource::SilhouetteRule: return 2;
        case KnowledgeSource::Preference: return 3;
        case KnowledgeSource::Trend: return 4;
        case KnowledgeSource::Case: return 5;
    }
    return 5;
}

CaseRetrieval retrieve_typical_outfits(const GarmentEntity& anchor, const KnowledgeBase& kb,
                                       std::size_t k) {
    CaseRetrieval out;
    if (!anchor.embedding_ref || *anchor.embedding_ref >= kb.embeddings.count()) {
        out.missing_embedding = true;
        return out;
    }
    if (kb.cases.cases.empty()) return out;
    auto query = kb.embeddings.row(*anchor.embedding_ref);
    for (const auto& [case_id, cos] : nearest_cases(query, kb.cases, kb.embeddings, k)) {
        const Case* c = kb.cases.find(case_id);
        KnowledgeItem item;
        item.source = KnowledgeSource::Case;
        item.ref_id = case_id;
        item.relevance = std::clamp((cos + 1.0) / 2.0, 0.0, 1.0);
        json attrs = json::array();
        for (const auto& id : c->item_ids)
            if (const GarmentEntity* e = kb.find_entity(id))
                for (const auto& d : effective_descriptors(*e)) attrs.push_back(d);
        item.payload = {{"attributes", attrs},
                        {"item_ids", c->item_ids},
                        {"style_vector", c->style_vector},
                        {"text", c->text}};
        out.items.push_back(std::move(item));
    }
    return out;
}

std::vector<KnowledgeItem> retrieve_scene_style(const std::string& scenario,
                                                const std::vector<std::string>& candidates,
                                                const KnowledgeBase& kb, double threshold) {
    auto row = kb.matrix.scenario_index(scenario);
    if (!row) throw StepoError("unknown scenario \"" + scenario + "\"");
    std::vector<KnowledgeItem> out;
    for (std::size_t j = 0; j < kb.matrix.styles.size(); ++j) {
        const std::string& style = kb.matrix.styles[j];
        if (!candidates.empty() &&
            std::find(candidates.begin(), candidates.end(), style) == candidates.end())
            continue;
        double compat = kb.matrix.at(*row, j);
        if (compat < threshold) continue;
        KnowledgeItem item;
        item.source = KnowledgeSource::SceneStyle;
        item.ref_id = style;
        item.relevance = compat;
        json rules = json::array();
        for (const auto& r : kb.rules)
            if (r.style == style)
                rules.push_back({{"id", r.id},
                                 {"lhs", r.lhs},
                                 {"op", to_string(r.op)},
                                 {"rhs", r.rhs},
                                 {"weight", r.weight}});
        json signature = json::array();
        if (const SemanticEntity* sem = kb.find_semantic(style))
            for (const auto& a : sem->attribute_signature) signature.push_back(a);
        item.payload = {{"scenario", scenario},
                        {"style", style},
                        {"rules", rules},
                        {"signature", signature}};
        out.push_back(std::move(item));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.relevance != b.relevance) return a.relevance > b.relevance;
        return a.ref_id < b.ref_id;
    });
    return out;
}

namespace {

enum class RuleFamily { Color, Silhouette, Other };

RuleFamily rule_family(const std::string& raw_lhs) {
    std::string lhs = raw_lhs;
    for (const char* prefix : {"top.", "bottom."})
        if (lhs.rfind(prefix, 0) == 0) lhs = lhs.substr(std::string(prefix).size());
    if (lhs == "delta_h" || lhs == "delta_l" || lhs == "s_ratio" || lhs == "hue" ||
        lhs == "chroma" || lhs == "lightness" || lhs == "temperature" ||
        lhs == "temperature_match" || lhs == "color" || lhs == "scheme")
        return RuleFamily::Color;
    if (lhs == "shape" || lhs == "fit" || lhs == "length" || lhs == "length_ratio" ||
        lhs == "length_split")
        return RuleFamily::Silhouette;
    return RuleFamily::Other;
}

json family_rules_json(const KnowledgeBase& kb, RuleFamily family) {
    json out = json::array();
    for (const auto& r : kb.rules)
        if (r.style.empty() && rule_family(r.lhs) == family) out.push_back(r.id);
    return out;
}

struct SchemeWindow {
    HarmonyScheme scheme;
    double lo, hi;       // acceptable hue difference to the anchor
    double prior;
};

constexpr SchemeWindow kSchemeWindows[] = {
    {HarmonyScheme::Monochromatic, 0.0, 15.0, 0.90},
    {HarmonyScheme::Analogous, 15.0, 45.0, 0.80},
    {HarmonyScheme::Complementary, 150.0, 180.0, 0.70},
    {HarmonyScheme::Triadic, 108.0, 132.0, 0.60},
};

// Distinct color names of complementary-role entities whose hue difference
// to the anchor falls in [lo,hi] (chromatic) or whose chroma is < 10
// (achromatic lists).
std::vector<std::string> palette_for_window(const KnowledgeBase& kb, const GarmentEntity& anchor,
                                            double lo, double hi, bool achromatic) {
    std::set<std::string> names;
    for (const auto& e : kb.entities) {
        if (e.role == anchor.role || e.role == Role::Composite) continue;
        if (achromatic) {
            if (e.color.chroma < 10.0) names.insert(color_name(e.color));
            continue;
        }
        if (e.color.chroma < 10.0) continue;
        double dh = hue_difference(anchor.color.hue_deg, e.color.hue_deg);
        if (dh >= lo - 1e-9 && dh <= hi + 1e-9) names.insert(color_name(e.color));
    }
    return {names.begin(), names.end()};
}

}  // namespace

std::vector<KnowledgeItem> retrieve_pairing_rules(const GarmentEntity& anchor,
                                                  const KnowledgeBase& kb) {
    std::vector<KnowledgeItem> out;
    bool have_color_rules = false, have_sil_rules = false;
    for (const auto& r : kb.rules) {
        if (!r.style.empty()) continue;
        RuleFamily f = rule_family(r.lhs);
        if (f == RuleFamily::Color) have_color_rules = true;
        if (f == RuleFamily::Silhouette) have_sil_rules = true;
    }

    if (have_color_rules) {
        json rule_ids = family_rules_json(kb, RuleFamily::Color);
        for (const auto& w : kSchemeWindows) {
            KnowledgeItem item;
            item.source = KnowledgeSource::ColorRule;
            item.ref_id = "color:" + to_string(w.scheme);
            item.relevance = w.prior;
            item.payload = {{"scheme", to_string(w.scheme)},
                            {"anchor_color", color_name(anchor.color)},
                            {"delta_h_window", json::array({w.lo, w.hi})},
                            {"colors", palette_for_window(kb, anchor, w.lo, w.hi, false)},
                            {"rules", rule_ids}};
            out.push_back(std::move(item));
        }
        if (anchor.color.chroma < 10.0) {
            KnowledgeItem item;
            item.source = KnowledgeSource::ColorRule;
            item.ref_id = "color:neutral";
            item.relevance = 0.95;
            item.payload = {{"scheme", "neutral"},
                            {"anchor_color", color_name(anchor.color)},
                            {"colors", palette_for_window(kb, anchor, 0, 0, true)},
                            {"rules", rule_ids}};
            out.push_back(std::move(item));
        }
    }

    if (have_sil_rules) {
        json rule_ids = family_rules_json(kb, RuleFamily::Silhouette);
        for (Shape s : kAllShapes) {
            int a = static_cast<int>(anchor.silhouette.shape);
            int b = static_cast<int>(s);
            double compat = anchor.role == Role::Bottom ? kb.principle_params.shape_compat[b][a]
                                                        : kb.principle_params.shape_compat[a][b];
            Fit best_fit = Fit::Tight;
            double best = -1.0;
            for (Fit f : kAllFits) {
                int af = static_cast<int>(anchor.silhouette.fit);
                int bf = static_cast<int>(f);
                double v = anchor.role == Role::Bottom
                               ? kb.principle_params.fit_contrast[bf][af]
                               : kb.principle_params.fit_contrast[af][bf];
                if (v > best) {
                    best = v;
                    best_fit = f;
                }
            }
            KnowledgeItem item;
            item.source = KnowledgeSource::SilhouetteRule;
            item.ref_id = "sil:" + to_string(anchor.silhouette.shape) + "-" + to_string(s);
            item.relevance = compat;
            item.payload = {{"shape", to_string(s)},
                            {"anchor_shape", to_string(anchor.silhouette.shape)},
                            {"fit_best", to_string(best_fit)},
                            {"rules", rule_ids}};
            out.push_back(std::move(item));
        }
    }
    return out;
}

PreferenceProfile user_preference_stats(const std::string& user_id,
                                        const std::vector<std::vector<GarmentEntity>>& history,
                                        const KnowledgeBase& kb) {
    PreferenceProfile p;
    p.user_id = user_id;
    p.history_size = history.size();
    if (history.empty()) return p;

    std::map<std::string, std::size_t> attr_counts, style_counts;
    std::size_t trend_hits = 0;
    for (const auto& outfit : history) {
        std::set<std::string> descriptors;
        for (const auto& item : outfit) {
            auto d = effective_descriptors(item);
            descriptors.insert(d.begin(), d.end());
        }
        for (const auto& d : descriptors) ++attr_counts[d];
        for (const auto& sem : kb.semantics) {
            if (sem.kind != SemanticEntity::Kind::Style) continue;
            bool all = std::all_of(sem.attribute_signature.begin(), sem.attribute_signature.end(),
                                   [&](const std::string& a) { return descriptors.count(a) > 0; });
            if (all) ++style_counts[sem.id];
        }
        bool trendy = std::any_of(kb.trends.begin(), kb.trends.end(), [&](const TrendEntry& t) {
            return std::any_of(t.attribute_signature.begin(), t.attribute_signature.end(),
                               [&](const std::string& a) { return descriptors.count(a) > 0; });
        });
        if (trendy) ++trend_hits;
    }
    double n = static_cast<double>(history.size());
    for (const auto& [a, c] : attr_counts) p.attr_freq[a] = static_cast<double>(c) / n;
    for (const auto& [s, c] : style_counts) p.style_freq[s] = static_cast<double>(c) / n;
    p.trend_match_rate = static_cast<double>(trend_hits) / n;
    return p;
}

std::vector<KnowledgeItem> preference_items(const PreferenceProfile& profile, std::size_t top_n) {
    std::vector<std::pair<std::string, double>> ranked(profile.attr_freq.begin(),
                                                       profile.attr_freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_n) ranked.resize(top_n);
    std::vector<KnowledgeItem> out;
    for (const auto& [attr, freq] : ranked) {
        KnowledgeItem item;
        item.source = KnowledgeSource::Preference;
        item.ref_id = "pref:" + attr;
        item.relevance = freq;
        item.payload = {{"attribute", attr}, {"frequency", freq}, {"user", profile.user_id}};
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<KnowledgeItem> trend_items(const KnowledgeBase& kb) {
    std::vector<KnowledgeItem> out;
    for (const auto& t : kb.trends) {
        KnowledgeItem item;
        item.source = KnowledgeSource::Trend;
        item.ref_id = t.id;
        item.relevance = t.weight;
        item.payload = {{"attributes", t.attribute_signature},
                        {"kind", to_string(t.kind)},
                        {"season", t.season}};
        out.push_back(std::move(item));
    }
    return out;
}

namespace {

// "constrains": {"attribute": a, "values": [...]} marks an item as pinning
// an attribute; disjoint value sets on the same attribute conflict.
std::optional<std::pair<std::string, std::set<std::string>>> constrained(
    const KnowledgeItem& item) {
    if (!item.payload.is_object() || !item.payload.contains("constrains")) return std::nullopt;
    const json& c = item.payload.at("constrains");
    if (!c.is_object() || !c.contains("attribute") || !c.contains("values")) return std::nullopt;
    std::set<std::string> values;
    for (const auto& v : c.at("values"))
        if (v.is_string()) values.insert(v.get<std::string>());
    return std::make_pair(c.at("attribute").get<std::string>(), values);
}

bool loses_to(const KnowledgeItem& a, const KnowledgeItem& b) {
    if (a.relevance != b.relevance) return a.relevance < b.relevance;
    if (source_priority(a.source) != source_priority(b.source))
        return source_priority(a.source) > source_priority(b.source);
    return a.ref_id > b.ref_id;
}

FusedKnowledge deterministic_fuse(const std::vector<KnowledgeItem>& all) {
    FusedKnowledge out;
    // Deduplicate by (source, ref_id), keeping the max relevance.
    for (const auto& item : all) {
        auto it = std::find_if(out.items.begin(), out.items.end(),
                               [&](const KnowledgeItem& k) { return k.same_key(item); });
        if (it == out.items.end())
            out.items.push_back(item);
        else if (item.relevance > it->relevance)
            *it = item;
    }

    // Resolve constraint conflicts, dropping the loser.
    for (bool again = true; again;) {
        again = false;
        for (std::size_t i = 0; i < out.items.size() && !again; ++i) {
            auto ci = constrained(out.items[i]);
            if (!ci) continue;
            for (std::size_t j = i + 1; j < out.items.size(); ++j) {
                auto cj = constrained(out.items[j]);
                if (!cj || ci->first != cj->first) continue;
                bool disjoint = std::none_of(
                    ci->second.begin(), ci->second.end(),
                    [&](const std::string& v) { return cj->second.count(v) > 0; });
                if (!disjoint) continue;
                std::size_t loser = loses_to(out.items[i], out.items[j]) ? i : j;
                std::size_t winner = loser == i ? j : i;
                KnowledgeConflict conflict;
                conflict.kept_source = to_string(out.items[winner].source);
                conflict.kept_ref = out.items[winner].ref_id;
                conflict.dropped = out.items[loser];
                conflict.reason = "disjoint values for attribute \"" + ci->first + "\"";
                out.conflicts.push_back(std::move(conflict));
                out.items.erase(out.items.begin() + static_cast<std::ptrdiff_t>(loser));
                again = true;
                break;
            }
        }
    }

    std::sort(out.items.begin(), out.items.end(), [](const auto& a, const auto& b) {
        if (a.relevance != b.relevance) return a.relevance > b.relevance;
        if (source_priority(a.source) != source_priority(b.source))
            return source_priority(a.source) < source_priority(b.source);
        return a.ref_id < b.ref_id;
    });
    return out;
}

}  // namespace

FusedKnowledge fuse_knowledge(const std::vector<std::vector<KnowledgeItem>>& bundles,
                              const Fuser& external) {
    std::vector<KnowledgeItem> all;
    for (const auto& b : bundles) all.insert(all.end(), b.begin(), b.end());
    if (external) {
        try {
            if (auto fused = external(all)) return *fused;
        } catch (const std::exception&) {
            // fall through to the deterministic fuser
        }
        FusedKnowledge out = deterministic_fuse(all);
        out.fuser_fallback = true;
        return out;
    }
    return deterministic_fuse(all);
}

}  // namespace stepo
