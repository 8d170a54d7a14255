// SPDX-License-Identifier: Apache-2.0

#include "stepo/principles.hpp"

#include <algorithm>
#include <cmath>

namespace stepo {

PrincipleParams default_principle_params() {
    PrincipleParams p;
    p.sil_tables.fit = {{Fit::Tight, 0.8}, {Fit::Fitted, 1.0}, {Fit::Loose, 0.85}};
    p.sil_tables.shape = {{Shape::H, 1.0},
                          {Shape::X, 0.9},
                          {Shape::A, 0.85},
                          {Shape::O, 0.7},
                          {Shape::Y, 0.8}};
    p.sil_tables.length = {{LengthClass::Cropped, 0.85},
                           {LengthClass::Regular, 1.0},
                           {LengthClass::Long, 0.9}};
    p.shape_compat = {{{0.90, 0.80, 0.85, 0.70, 0.80},
                       {0.80, 0.85, 0.90, 0.65, 0.75},
                       {0.85, 0.80, 0.70, 0.60, 0.70},
                       {0.75, 0.70, 0.75, 0.55, 0.65},
                       {0.70, 0.75, 0.95, 0.70, 0.60}}};
    p.fit_contrast = {{{0.55, 0.75, 0.95},
                       {0.75, 0.85, 0.80},
                       {0.90, 0.80, 0.60}}};
    return p;
}

namespace {

template <typename K>
json table_to_json(const std::map<K, double>& t) {
    json out = json::object();
    for (const auto& [k, v] : t) out[to_string(k)] = v;
    return out;
}

template <typename K, typename FromString>
std::map<K, double> table_from_json(const json& j, FromString from) {
    std::map<K, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[from(it.key())] = it->get<double>();
    return out;
}

}  // namespace

json principle_params_to_json(const PrincipleParams& p) {
    json j;
    j["rho"] = p.rho;
    j["beta"] = p.beta;
    j["color_map"] = {{"c1_slope", p.color_map.c1_slope},
                      {"c2_center", p.color_map.c2_center},
                      {"c2_slope", p.color_map.c2_slope},
                      {"c4_mismatch", p.color_map.c4_mismatch}};
    j["sil_tables"] = {{"fit", table_to_json(p.sil_tables.fit)},
                       {"shape", table_to_json(p.sil_tables.shape)},
                       {"length", table_to_json(p.sil_tables.length)}};
    j["shape_compat"] = p.shape_compat;
    j["fit_contrast"] = p.fit_contrast;
    j["golden_sigma"] = p.golden_sigma;
    return j;
}

PrincipleParams principle_params_from_json(const json& j) {
    PrincipleParams p;
    p.rho = j.at("rho").get<std::array<double, 3>>();
    p.beta = j.at("beta").get<std::array<double, 4>>();
    const json& cm = j.at("color_map");
    p.color_map.c1_slope = cm.at("c1_slope").get<double>();
    p.color_map.c2_center = cm.at("c2_center").get<double>();
    p.color_map.c2_slope = cm.at("c2_slope").get<double>();
    p.color_map.c4_mismatch = cm.at("c4_mismatch").get<double>();
    const json& st = j.at("sil_tables");
    p.sil_tables.fit = table_from_json<Fit>(st.at("fit"), fit_from_string);
    p.sil_tables.shape = table_from_json<Shape>(st.at("shape"), shape_from_string);
    p.sil_tables.length = table_from_json<LengthClass>(st.at("length"), length_class_from_string);
    p.shape_compat = j.at("shape_compat").get<std::array<std::array<double, 5>, 5>>();
    p.fit_contrast = j.at("fit_contrast").get<std::array<std::array<double, 3>, 3>>();
    p.golden_sigma = j.at("golden_sigma").get<double>();
    return p;
}

SilhouetteScore aggregate_silhouette(const std::array<double, 3>& f,
                                     const PrincipleParams& params) {
    SilhouetteScore s;
    s.f = f;
    s.total = 0.0;
    for (int i = 0; i < 3; ++i) s.total += params.rho[i] * f[i];
    return s;
}

namespace {

double table_at(const std::map<Fit, double>& t, Fit k) { return t.at(k); }
double table_at(const std::map<Shape, double>& t, Shape k) { return t.at(k); }
double table_at(const std::map<LengthClass, double>& t, LengthClass k) { return t.at(k); }

}  // namespace

SilhouetteScore score_silhouette_pair(const SilhouetteSpec& top, const SilhouetteSpec& bottom,
                                      const PrincipleParams& params) {
    const auto& t = params.sil_tables;
    double f1 = 0.5 * (table_at(t.fit, top.fit) + table_at(t.fit, bottom.fit));
    double f2_tables = 0.5 * (table_at(t.shape, top.shape) + table_at(t.shape, bottom.shape));
    double f2 = 0.5 * f2_tables +
                0.5 * params.shape_compat[static_cast<int>(top.shape)]
                                         [static_cast<int>(bottom.shape)];
    double f3 = 0.5 * (table_at(t.length, top.length_class) +
                       table_at(t.length, bottom.length_class));
    return aggregate_silhouette({f1, f2, f3}, params);
}

ColorScore score_color_pair(const ColorSpec& a, const ColorSpec& b,
                            const PrincipleParams& params) {
    ColorScore s;
    s.raw.delta_h = hue_difference(a.hue_deg, b.hue_deg);
    s.raw.delta_l = std::fabs(a.lightness - b.lightness);
    if (a.chroma < 1e-9 && b.chroma < 1e-9)
        s.raw.s_ratio = 1.0;
    else
        s.raw.s_ratio = a.chroma / std::max(b.chroma, 1e-9);
    s.raw.same_temp = a.temperature == b.temperature;

    const auto& m = params.color_map;
    s.c[0] = std::max(0.0, 1.0 - s.raw.delta_h / m.c1_slope);
    s.c[1] = std::max(0.0, 1.0 - std::fabs(s.raw.delta_l - m.c2_center) / m.c2_slope);
    double r = s.raw.s_ratio <= 0.0 ? 1e9 : std::max(s.raw.s_ratio, 1.0 / s.raw.s_ratio);
    s.c[2] = std::clamp(2.0 - r, 0.0, 1.0);
    s.c[3] = s.raw.same_temp ? 1.0 : m.c4_mismatch;

    s.total = 0.0;
    for (int i = 0; i < 4; ++i) s.total += params.beta[i] * s.c[i];
    return s;
}

int check_style(const AttributeSet& attrs, const StyleConstraintSet& constraints) {
    for (const auto& rule : constraints.constraints)
        if (!evaluate_rule(rule, attrs)) return 0;
    return 1;
}

double style_compatibility(const StyleConstraintSet& style, const AttributeSet& attrs,
                           const std::vector<double>& weights) {
    if (weights.size() != style.constraints.size())
        throw StepoError("style_compatibility: " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(style.constraints.size()) +
                         " constraints");
    double mu = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto& rule = style.constraints[i];
        bool sat = rule_applicable(rule, attrs) && evaluate_rule(rule, attrs);
        if (sat) mu += weights[i];
    }
    return mu;
}

int rule_satisfaction(const AttributeSet& attrs,
                      const std::vector<StyleConstraintSet>& rulesets) {
    for (const auto& set : rulesets)
        for (const auto& rule : set.constraints) {
            bool sat = rule_applicable(rule, attrs) && evaluate_rule(rule, attrs);
            if (!sat) return 0;
        }
    return 1;
}

double delta_e(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double dl = a[0] - b[0], da = a[1] - b[1], db = a[2] - b[2];
    return std::sqrt(dl * dl + da * da + db * db);
}

std::string to_string(HarmonyScheme s) {
    switch (s) {
        case HarmonyScheme::Monochromatic: return "monochromatic";
        case HarmonyScheme::Analogous: return "analogous";
        case HarmonyScheme::Complementary: return "complementary";
        case HarmonyScheme::Triadic: return "triadic";
        case HarmonyScheme::Neutral: return "neutral";
    }
    return "monochromatic";
}

namespace {

struct Bucket {
    HarmonyScheme scheme;
    double lo, hi;
};

// Classification order doubles as the tie-break for the nearest-bucket
// fallback.
constexpr Bucket kBuckets[] = {
    {HarmonyScheme::Monochromatic, 0.0, 15.0},
    {HarmonyScheme::Analogous, 15.0, 45.0},
    {HarmonyScheme::Triadic, 108.0, 132.0},
    {HarmonyScheme::Complementary, 150.0, 180.0},
};

double interval_distance(double x, double lo, double hi) {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

}  // namespace

HarmonyAssessment classify_harmony(const ColorSpec& a, const ColorSpec& b,
                                   const PrincipleParams& params) {
    HarmonyAssessment h;
    ColorScore base = score_color_pair(a, b, params);
    double dh = base.raw.delta_h;

    double bucket_dist = 0.0;
    if (a.chroma < 10.0 || b.chroma < 10.0) {
        h.scheme = HarmonyScheme::Neutral;
    } else {
        const Bucket* best = nullptr;
        double best_dist = 1e9;
        for (const auto& bk : kBuckets) {
            double d = interval_distance(dh, bk.lo, bk.hi);
            if (d < best_dist - 1e-12) {
                best = &bk;
                best_dist = d;
            }
        }
        h.scheme = best->scheme;
        bucket_dist = best_dist;
    }

    // Same aggregation as the color pair, with the hue component replaced by
    // how well the difference fits the assigned bucket.
    double scheme_fit = h.scheme == HarmonyScheme::Neutral
                            ? 1.0
                            : std::max(0.0, 1.0 - bucket_dist / params.color_map.c1_slope);
    h.score = base.total + params.beta[0] * (scheme_fit - base.c[0]);

    h.high_contrast =
        h.scheme == HarmonyScheme::Complementary && delta_e(a.lab, b.lab) > 30.0;
    return h;
}

double golden_ratio_score(double split, double sigma) {
    if (!(split > 0.0 && split < 1.0)) throw StepoError("length split outside (0,1)");
    double d = split - 0.618;
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double balance(const SilhouetteSpec& top, const SilhouetteSpec& bottom,
               const PrincipleParams& params) {
    double fc = params.fit_contrast[static_cast<int>(top.fit)][static_cast<int>(bottom.fit)];
    double sc = params.shape_compat[static_cast<int>(top.shape)][static_cast<int>(bottom.shape)];
    double split = top.length_ratio /
                   std::max(top.length_ratio + bottom.length_ratio, 1e-9);
    double g = golden_ratio_score(std::clamp(split, 1e-6, 1.0 - 1e-6), params.golden_sigma);
    return (fc + sc + g) / 3.0;
}

}  // namespace stepo
