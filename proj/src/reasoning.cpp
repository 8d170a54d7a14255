// SPDX-License-Identifier: Apache-2.0

#include "stepo/reasoning.hpp"

#include <algorithm>
#include <cmath>

#include "stepo/principles.hpp"

namespace stepo {

DecisionNode make_root_node() {
    DecisionNode root;
    root.id = "n0";
    return root;
}

std::string decision_descriptor(const std::string& dtype, const std::string& value) {
    if (dtype == "color_scheme") return value + " scheme";
    if (dtype == "silhouette_pairing") return value + " silhouette";
    if (dtype == "fit") return value + " fit";
    if (dtype == "length") return value + " length";
    return value;  // scenario, style, category, color_value are bare
}

namespace {

const std::vector<std::string>& achromatic_names() {
    static const std::vector<std::string> names = {"black", "dark grey", "grey", "light grey",
                                                   "white"};
    return names;
}

bool is_color_name(const std::string& s) {
    std::string base = s;
    for (const char* prefix : {"dark ", "light "})
        if (base.rfind(prefix, 0) == 0) base = base.substr(std::string(prefix).size());
    static const std::set<std::string> kBases = {"red",  "orange", "yellow",  "green", "cyan",
                                                 "blue", "purple", "magenta", "black", "grey",
                                                 "white"};
    return kBases.count(base) > 0;
}

}  // namespace

std::map<std::string, double> preference_slice(const std::string& dtype,
                                               const PreferenceProfile& profile) {
    if (dtype == "style") return profile.style_freq;
    std::map<std::string, double> out;
    for (const auto& [key, freq] : profile.attr_freq) {
        bool fit = key.ends_with(" fit");
        bool length = key.ends_with(" length");
        bool sil = key.ends_with(" silhouette");
        bool scheme = key.ends_with(" scheme");
        bool temp_color = key.ends_with(" color");
        bool color = is_color_name(key);
        bool matched = false;
        if (dtype == "fit")
            matched = fit;
        else if (dtype == "length")
            matched = length;
        else if (dtype == "silhouette_pairing")
            matched = sil;
        else if (dtype == "color_scheme")
            matched = scheme || temp_color;
        else if (dtype == "color_value")
            matched = color || temp_color;
        else  // scenario, category: the general bucket
            matched = !fit && !length && !sil && !scheme && !temp_color && !color;
        if (matched) out[key] = freq;
    }
    return out;
}

json anchor_features_json(const GarmentEntity& anchor) {
    json j;
    j["id"] = anchor.id;
    j["category"] = anchor.category;
    j["role"] = to_string(anchor.role);
    j["color"] = {{"hue_deg", anchor.color.hue_deg},
                  {"chroma", anchor.color.chroma},
                  {"lightness", anchor.color.lightness},
                  {"name", color_name(anchor.color)},
                  {"temperature", to_string(anchor.color.temperature)}};
    j["silhouette"] = {{"shape", to_string(anchor.silhouette.shape)},
                       {"fit", to_string(anchor.silhouette.fit)},
                       {"length_class", to_string(anchor.silhouette.length_class)},
                       {"length_ratio", anchor.silhouette.length_ratio}};
    j["descriptors"] = effective_descriptors(anchor);
    return j;
}

namespace {

GarmentEntity anchor_from_features(const json& j) {
    GarmentEntity a;
    a.id = j.at("id").get<std::string>();
    a.category = j.at("category").get<std::string>();
    a.role = role_from_string(j.at("role").get<std::string>());
    const json& c = j.at("color");
    a.color.hue_deg = c.at("hue_deg").get<double>();
    a.color.chroma = c.at("chroma").get<double>();
    a.color.lightness = c.at("lightness").get<double>();
    a.color.temperature = temperature_from_string(c.at("temperature").get<std::string>());
    const json& s = j.at("silhouette");
    a.silhouette.shape = shape_from_string(s.at("shape").get<std::string>());
    a.silhouette.fit = fit_from_string(s.at("fit").get<std::string>());
    a.silhouette.length_class =
        length_class_from_string(s.at("length_class").get<std::string>());
    a.silhouette.length_ratio = s.at("length_ratio").get<double>();
    // Descriptors subsume the original tags; keeping them all as tags makes
    // effective_descriptors(a) reproduce the exported set exactly.
    if (j.contains("descriptors"))
        for (const auto& d : j.at("descriptors")) a.tags.insert(d.get<std::string>());
    return a;
}

std::vector<KnowledgeSource> sources_for(const std::string& dtype) {
    if (dtype == "scenario" || dtype == "style")
        return {KnowledgeSource::SceneStyle, KnowledgeSource::Case};
    if (dtype == "color_scheme" || dtype == "color_value")
        return {KnowledgeSource::ColorRule, KnowledgeSource::Case, KnowledgeSource::Trend};
    if (dtype == "silhouette_pairing" || dtype == "fit" || dtype == "length")
        return {KnowledgeSource::SilhouetteRule, KnowledgeSource::Case};
    if (dtype == "category") return {KnowledgeSource::Case, KnowledgeSource::Preference};
    return {KnowledgeSource::Case,           KnowledgeSource::SceneStyle,
            KnowledgeSource::ColorRule,      KnowledgeSource::SilhouetteRule,
            KnowledgeSource::Preference,     KnowledgeSource::Trend};
}

Role complementary_role(Role r) {
    if (r == Role::Top) return Role::Bottom;
    if (r == Role::Bottom) return Role::Top;
    throw StepoError("composite anchors have no complementary role");
}

const std::string* state_choice(const std::vector<std::pair<std::string, std::string>>& state,
                                const std::string& dtype) {
    for (const auto& [d, c] : state)
        if (d == dtype) return &c;
    return nullptr;
}

struct SchemeSpec {
    double lo, hi;
    double prior;
};

const std::map<std::string, SchemeSpec>& scheme_specs() {
    static const std::map<std::string, SchemeSpec> specs = {
        {"monochromatic", {0.0, 15.0, 0.90}},
        {"analogous", {15.0, 45.0, 0.80}},
        {"complementary", {150.0, 180.0, 0.70}},
        {"triadic", {108.0, 132.0, 0.60}},
    };
    return specs;
}

// Lexicographically-first complementary-role entity carrying the color name,
// preferring entities inside the scheme window so the representative agrees
// with the enumeration filter.
const GarmentEntity* representative_palette_entity(const KnowledgeBase& kb,
                                                   const std::string& name, Role role,
                                                   const GarmentEntity& anchor,
                                                   const std::string& scheme) {
    const GarmentEntity* in_window = nullptr;
    const GarmentEntity* any = nullptr;
    for (const auto& e : kb.entities) {
        if (e.role != role || color_name(e.color) != name) continue;
        if (!any || e.id < any->id) any = &e;
        bool fits = true;
        if (scheme == "neutral")
            fits = e.color.chroma < 10.0;
        else if (auto it = scheme_specs().find(scheme); it != scheme_specs().end()) {
            double dh = hue_difference(anchor.color.hue_deg, e.color.hue_deg);
            fits = e.color.chroma >= 10.0 && dh >= it->second.lo - 1e-9 &&
                   dh <= it->second.hi + 1e-9;
        }
        if (fits && (!in_window || e.id < in_window->id)) in_window = &e;
    }
    return in_window ? in_window : any;
}

// Attribute view of the anchor plus the decisions made so far (optionally
// extended by one more), with pair numerics filled once a color is decided.
AttributeSet partial_pair_attrs(const GarmentEntity& anchor,
                                const std::vector<std::pair<std::string, std::string>>& decided,
                                const std::string& extra_dtype, const std::string& extra_choice,
                                const KnowledgeBase& kb) {
    AttributeSet attrs = attribute_set_for(anchor);
    std::string anchor_side = anchor.role == Role::Bottom ? "bottom" : "top";
    std::string other_side = anchor.role == Role::Bottom ? "top" : "bottom";
    attrs.strings[anchor_side + ".shape"] = to_string(anchor.silhouette.shape);
    attrs.strings[anchor_side + ".fit"] = to_string(anchor.silhouette.fit);
    attrs.strings[anchor_side + ".length"] = to_string(anchor.silhouette.length_class);
    attrs.strings[anchor_side + ".color"] = color_name(anchor.color);

    auto apply = [&](const std::string& dtype, const std::string& choice) {
        attrs.descriptors.insert(decision_descriptor(dtype, choice));
        if (dtype == "silhouette_pairing")
            attrs.strings[other_side + ".shape"] = choice;
        else if (dtype == "fit")
            attrs.strings[other_side + ".fit"] = choice;
        else if (dtype == "length")
            attrs.strings[other_side + ".length"] = choice;
        else if (dtype == "scenario")
            attrs.strings["scenario"] = choice;
        else if (dtype == "style")
            attrs.strings["style"] = choice;
        else if (dtype == "color_scheme")
            attrs.strings["scheme"] = choice;
        else if (dtype == "category")
            attrs.strings[other_side + ".category"] = choice;
        else if (dtype == "color_value") {
            attrs.strings[other_side + ".color"] = choice;
            const std::string* scheme = state_choice(decided, "color_scheme");
            Role role = complementary_role(anchor.role);
            const GarmentEntity* rep = representative_palette_entity(
                kb, choice, role, anchor, scheme ? *scheme : "");
            if (rep) {
                attrs.numerics["delta_h"] =
                    hue_difference(anchor.color.hue_deg, rep->color.hue_deg);
                attrs.numerics["delta_l"] =
                    std::fabs(anchor.color.lightness - rep->color.lightness);
                if (anchor.color.chroma < 1e-9 && rep->color.chroma < 1e-9)
                    attrs.numerics["s_ratio"] = 1.0;
                else
                    attrs.numerics["s_ratio"] =
                        anchor.color.chroma / std::max(rep->color.chroma, 1e-9);
                attrs.strings["temperature_match"] =
                    anchor.color.temperature == rep->color.temperature ? "same" : "different";
            }
        }
    };
    for (const auto& [d, c] : decided) apply(d, c);
    if (!extra_dtype.empty()) apply(extra_dtype, extra_choice);
    return attrs;
}

}  // namespace

Context build_context(const DecisionNode& node, const StylingRequest& request) {
    Context ctx;
    ctx.path_prefix = node.state;
    auto wanted = sources_for(node.dtype);
    for (const auto& item : request.knowledge.items)
        if (std::find(wanted.begin(), wanted.end(), item.source) != wanted.end())
            ctx.knowledge.items.push_back(item);
    ctx.preferences = preference_slice(node.dtype, request.user);
    ctx.anchor_features = anchor_features_json(request.anchor);
    ctx.edge_constraints = node.edge_constraints;
    return ctx;
}

namespace {

std::vector<std::string> cap_by_prior(std::vector<std::pair<std::string, double>> scored,
                                      std::size_t cap) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > cap) scored.resize(cap);
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (auto& [a, s] : scored) out.push_back(std::move(a));
    return out;
}

}  // namespace

ActionSpace enumerate_actions(const std::string& dtype, const Context& context,
                              const KnowledgeBase& kb, const SearchConfig& config) {
    GarmentEntity anchor = anchor_from_features(context.anchor_features);
    std::vector<std::pair<std::string, double>> scored;

    if (dtype == "scenario") {
        for (std::size_t i = 0; i < kb.matrix.scenarios.size(); ++i) {
            double mean = 0.0;
            for (std::size_t j = 0; j < kb.matrix.styles.size(); ++j) mean += kb.matrix.at(i, j);
            if (!kb.matrix.styles.empty()) mean /= static_cast<double>(kb.matrix.styles.size());
            scored.emplace_back(kb.matrix.scenarios[i], mean);
        }
    } else if (dtype == "style") {
        const std::string* scenario = state_choice(context.path_prefix, "scenario");
        for (std::size_t j = 0; j < kb.matrix.styles.size(); ++j) {
            double compat;
            if (scenario) {
                auto row = kb.matrix.scenario_index(*scenario);
                if (!row) throw StepoError("unknown scenario \"" + *scenario + "\"");
                compat = kb.matrix.at(*row, j);
            } else {
                compat = 0.0;  // no scenario decided: take each style's best row
                for (std::size_t i = 0; i < kb.matrix.scenarios.size(); ++i)
                    compat = std::max(compat, kb.matrix.at(i, j));
            }
            if (compat >= config.scene_style_threshold)
                scored.emplace_back(kb.matrix.styles[j], compat);
        }
    } else if (dtype == "color_scheme") {
        for (const auto& [name, spec] : scheme_specs()) scored.emplace_back(name, spec.prior);
        scored.emplace_back("neutral", anchor.color.chroma < 10.0 ? 0.95 : 0.5);
    } else if (dtype == "silhouette_pairing") {
        for (Shape s : kAllShapes) {
            int a = static_cast<int>(anchor.silhouette.shape);
            int b = static_cast<int>(s);
            double compat = anchor.role == Role::Bottom ? kb.principle_params.shape_compat[b][a]
                                                        : kb.principle_params.shape_compat[a][b];
            scored.emplace_back(to_string(s), compat);
        }
    } else if (dtype == "category") {
        Role role = complementary_role(anchor.role);
        std::set<std::string> categories;
        for (const auto& e : kb.entities)
            if (e.role == role) categories.insert(e.category);
        for (const auto& c : categories) {
            double freq = 0.0;
            if (auto it = context.preferences.find(c); it != context.preferences.end())
                freq = it->second;
            scored.emplace_back(c, 0.5 + 0.5 * freq);
        }
    } else if (dtype == "color_value") {
        const std::string* scheme = state_choice(context.path_prefix, "color_scheme");
        Role role = complementary_role(anchor.role);
        std::set<std::string> names;
        for (const auto& e : kb.entities) {
            if (e.role != role) continue;
            if (scheme) {
                if (*scheme == "neutral") {
                    if (e.color.chroma >= 10.0) continue;
                } else if (auto it = scheme_specs().find(*scheme); it != scheme_specs().end()) {
                    if (e.color.chroma < 10.0) continue;
                    double dh = hue_difference(anchor.color.hue_deg, e.color.hue_deg);
                    if (dh < it->second.lo - 1e-9 || dh > it->second.hi + 1e-9) continue;
                }
            }
            names.insert(color_name(e.color));
        }
        for (const auto& n : names) {
            const GarmentEntity* rep =
                representative_palette_entity(kb, n, role, anchor, scheme ? *scheme : "");
            double prior =
                rep ? score_color_pair(anchor.color, rep->color, kb.principle_params).total : 0.0;
            scored.emplace_back(n, prior);
        }
    } else if (dtype == "fit") {
        for (Fit f : kAllFits) {
            int a = static_cast<int>(anchor.silhouette.fit);
            int b = static_cast<int>(f);
            double v = anchor.role == Role::Bottom ? kb.principle_params.fit_contrast[b][a]
                                                   : kb.principle_params.fit_contrast[a][b];
            scored.emplace_back(to_string(f), v);
        }
    } else if (dtype == "length") {
        for (LengthClass l : kAllLengths)
            scored.emplace_back(to_string(l), kb.principle_params.sil_tables.length.at(l));
    } else {
        throw StepoError("unknown decision type \"" + dtype + "\"");
    }

    ActionSpace space;
    space.dtype = dtype;
    space.actions = cap_by_prior(std::move(scored), config.branching_cap);
    if (space.actions.empty())
        throw StepoError("empty action space for \"" + dtype + "\": knowledge base gap");
    return space;
}

std::vector<RuleAttribute> edge_constraints_for(const std::string& dtype,
                                                const std::string& choice,
                                                const KnowledgeBase& kb) {
    std::vector<RuleAttribute> out;
    if (dtype == "color_scheme") {
        if (choice == "neutral") {
            RuleAttribute r;
            r.id = "edge:neutral-palette";
            r.lhs = "descriptors";
            r.op = RuleOp::In;
            r.rhs = achromatic_names();
            out.push_back(std::move(r));
        } else if (auto it = scheme_specs().find(choice); it != scheme_specs().end()) {
            if (it->second.lo > 0.0) {
                RuleAttribute lo;
                lo.id = "edge:" + choice + "-dh-lo";
                lo.lhs = "delta_h";
                lo.op = RuleOp::Ge;
                lo.rhs = it->second.lo;
                lo.unit = "deg";
                out.push_back(std::move(lo));
            }
            RuleAttribute hi;
            hi.id = "edge:" + choice + "-dh-hi";
            hi.lhs = "delta_h";
            hi.op = RuleOp::Le;
            hi.rhs = it->second.hi;
            hi.unit = "deg";
            out.push_back(std::move(hi));
        }
    } else if (dtype == "style") {
        for (const auto& r : kb.rules)
            if (r.style == choice) out.push_back(r);
    }
    return out;
}

DecisionNode transition(const DecisionNode& parent, const std::string& choice,
                        const Context& context, const KnowledgeBase& kb) {
    if (!context.actions)
        throw StepoError("transition: context has no enumerated action space");
    const auto& actions = context.actions->actions;
    auto it = std::find(actions.begin(), actions.end(), choice);
    if (it == actions.end())
        throw StepoError("transition: choice \"" + choice + "\" not in the action space for \"" +
                         context.actions->dtype + "\"");
    DecisionNode child;
    child.id = parent.id + "." + std::to_string(it - actions.begin());
    child.dtype = context.actions->dtype;
    child.state = parent.state;
    child.state.emplace_back(child.dtype, choice);
    child.chosen = choice;
    child.edge_constraints = edge_constraints_for(child.dtype, choice, kb);
    return child;
}

double combine_policy_factors(double principle, double case_support, double preference) {
    return principle * case_support * preference;
}

namespace {

bool json_mentions(const json& j, const std::string& a, const std::string& b) {
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        return s == a || s == b;
    }
    if (j.is_array() || j.is_object()) {
        for (const auto& v : j)
            if (json_mentions(v, a, b)) return true;
    }
    return false;
}

}  // namespace

bool knowledge_endorses(const KnowledgeItem& item, const std::string& dtype,
                        const std::string& action) {
    std::string desc = decision_descriptor(dtype, action);
    if (item.ref_id == action || item.ref_id == desc) return true;
    return json_mentions(item.payload, action, desc);
}

std::map<std::string, double> DeterministicPolicy::score(const Context& context,
                                                          const ActionSpace& actions,
                                                          const std::string&,
                                                          const std::string&) {
    GarmentEntity anchor = anchor_from_features(context.anchor_features);
    const std::string& dtype = actions.dtype;
    const PrincipleParams& params = kb_.principle_params;

    const std::string* decided_shape = state_choice(context.path_prefix, "silhouette_pairing");
    const std::string* decided_fit = state_choice(context.path_prefix, "fit");
    const std::string* decided_length = state_choice(context.path_prefix, "length");
    const std::string* decided_scheme = state_choice(context.path_prefix, "color_scheme");

    auto silhouette_factor = [&](Shape shape, Fit fit, LengthClass length) {
        SilhouetteSpec cand;
        cand.shape = shape;
        cand.fit = fit;
        cand.length_class = length;
        cand.length_ratio = 1.0;
        const SilhouetteSpec& a = anchor.silhouette;
        return anchor.role == Role::Bottom ? score_silhouette_pair(cand, a, params).total
                                           : score_silhouette_pair(a, cand, params).total;
    };

    std::map<std::string, double> raw;
    for (const auto& action : actions.actions) {
        double principle = 1.0;
        if (dtype == "style") {
            AttributeSet attrs =
                partial_pair_attrs(anchor, context.path_prefix, "style", action, kb_);
            for (const auto& r : kb_.rules) {
                if (r.style != action) continue;
                if (rule_applicable(r, attrs) && !evaluate_rule(r, attrs)) {
                    principle = 0.0;
                    break;
                }
            }
        } else if (dtype == "color_scheme") {
            if (action == "neutral")
                principle = anchor.color.chroma < 10.0 ? 0.95 : 0.5;
            else
                principle = scheme_specs().at(action).prior;
        } else if (dtype == "silhouette_pairing") {
            principle = silhouette_factor(shape_from_string(action),
                                          decided_fit ? fit_from_string(*decided_fit)
                                                      : Fit::Fitted,
                                          decided_length
                                              ? length_class_from_string(*decided_length)
                                              : LengthClass::Regular);
        } else if (dtype == "fit") {
            principle = silhouette_factor(
                decided_shape ? shape_from_string(*decided_shape) : Shape::H,
                fit_from_string(action),
                decided_length ? length_class_from_string(*decided_length)
                               : LengthClass::Regular);
        } else if (dtype == "length") {
            principle = silhouette_factor(
                decided_shape ? shape_from_string(*decided_shape) : Shape::H,
                decided_fit ? fit_from_string(*decided_fit) : Fit::Fitted,
                length_class_from_string(action));
        } else if (dtype == "color_value") {
            Role role = complementary_role(anchor.role);
            const GarmentEntity* rep = representative_palette_entity(
                kb_, action, role, anchor, decided_scheme ? *decided_scheme : "");
            principle = rep ? score_color_pair(anchor.color, rep->color, params).total : 0.0;
            if (principle > 0.0 && !context.edge_constraints.empty()) {
                AttributeSet attrs =
                    partial_pair_attrs(anchor, context.path_prefix, "color_value", action, kb_);
                for (const auto& r : context.edge_constraints) {
                    if (rule_applicable(r, attrs) && !evaluate_rule(r, attrs)) {
                        principle = 0.0;
                        break;
                    }
                }
            }
        }
        // scenario and category stay neutral at 1.0

        std::string desc = decision_descriptor(dtype, action);
        double support = 0.0;
        bool endorsed = false;
        for (const auto& item : context.knowledge.items) {
            if (!knowledge_endorses(item, dtype, action)) continue;
            endorsed = true;
            support = std::max(support, item.relevance);
        }
        support = endorsed ? std::max(support, 0.1) : 0.1;

        double freq = 0.0;
        if (auto it = context.preferences.find(desc); it != context.preferences.end())
            freq = it->second;
        else if (auto it2 = context.preferences.find(action); it2 != context.preferences.end())
            freq = it2->second;
        double preference = 0.5 + 0.5 * freq;

        raw[action] = combine_policy_factors(principle, support, preference);
    }

    double sum = 0.0;
    for (auto& [a, v] : raw) {
        if (v < 1e-6) v = 1e-6;
        sum += v;
    }
    for (auto& [a, v] : raw) v /= sum;
    return raw;
}

namespace {

struct Partial {
    std::vector<DecisionNode> nodes;
    double log_sum = 0.0;

    double geomean() const {
        if (nodes.empty()) return 1.0;
        return std::exp(log_sum / static_cast<double>(nodes.size()));
    }
    std::string attr_key() const {
        std::set<std::string> attrs;
        for (const auto& n : nodes) attrs.insert(decision_descriptor(n.dtype, n.chosen));
        std::string key;
        for (const auto& a : attrs) {
            key += a;
            key += '\x1f';
        }
        return key;
    }
};

}  // namespace

SearchResult run_tree_search(const StylingRequest& request, DecisionPolicy& policy,
                             const KnowledgeBase& kb) {
    const SearchConfig& config = request.config;
    if (config.beam_width < 1) throw StepoError("beam width must be >= 1");
    if (config.branching_cap < 1) throw StepoError("branching cap must be >= 1");
    if (config.type_sequence.empty()) throw StepoError("empty decision type sequence");
    {
        std::set<std::string> seen(config.type_sequence.begin(), config.type_sequence.end());
        if (seen.size() != config.type_sequence.size())
            throw StepoError("decision type sequence has duplicates");
    }
    if (request.anchor.role == Role::Composite)
        throw StepoError("composite anchors are not searchable; pick a top or bottom item");

    const std::string session_id = "s:" + request.anchor.id;
    const DecisionNode root = make_root_node();

    SearchResult result;
    std::vector<Partial> beam(1);
    for (const auto& dtype : config.type_sequence) {
        std::vector<Partial> candidates;
        for (const auto& partial : beam) {
            const DecisionNode& parent = partial.nodes.empty() ? root : partial.nodes.back();
            DecisionNode shell;
            shell.id = parent.id;
            shell.dtype = dtype;
            shell.state = parent.state;
            for (const auto& n : partial.nodes)
                shell.edge_constraints.insert(shell.edge_constraints.end(),
                                              n.edge_constraints.begin(),
                                              n.edge_constraints.end());
            Context context = build_context(shell, request);
            ActionSpace space;
            try {
                space = enumerate_actions(dtype, context, kb, config);
            } catch (const StepoError& e) {
                result.pruned.push_back({parent.id, dtype, e.what()});
                continue;
            }
            context.actions = space;
            auto scores = policy.score(context, space, session_id, parent.id + "/" + dtype);
            for (const auto& action : space.actions) {
                DecisionNode child = transition(parent, action, context, kb);
                auto it = scores.find(action);
                child.score = it == scores.end() ? 1e-6 : it->second;
                Partial next = partial;
                if (!next.nodes.empty()) next.nodes.back().children.push_back(child.id);
                next.log_sum += std::log(std::max(child.score, 1e-300));
                next.nodes.push_back(std::move(child));
                candidates.push_back(std::move(next));
            }
        }
        if (candidates.empty())
            throw NoFeasibleOutfitError(
                "no feasible outfit: every branch pruned at \"" + dtype + "\"",
                std::move(result.pruned));
        std::sort(candidates.begin(), candidates.end(), [](const Partial& a, const Partial& b) {
            double ga = a.geomean(), gb = b.geomean();
            if (ga != gb) return ga > gb;
            return a.attr_key() < b.attr_key();
        });
        if (candidates.size() > config.beam_width) candidates.resize(config.beam_width);
        beam = std::move(candidates);
    }

    for (const auto& partial : beam) {
        DecisionPath path;
        path.nodes = partial.nodes;
        for (const auto& n : partial.nodes)
            path.attributes.insert(decision_descriptor(n.dtype, n.chosen));
        path.path_score = partial.geomean();
        result.paths.push_back(std::move(path));
    }
    std::sort(result.paths.begin(), result.paths.end(),
              [](const DecisionPath& a, const DecisionPath& b) {
                  if (a.path_score != b.path_score) return a.path_score > b.path_score;
                  return a.attributes < b.attributes;
              });
    result.policy_fallbacks = policy.fallback_events();
    return result;
}

}  // namespace stepo
