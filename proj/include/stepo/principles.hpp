// SPDX-License-Identifier: Apache-2.0
//
// Quantitative styling principles: silhouette pairing, color coordination,
// style gating, color harmony classification and silhouette balance.
//
// All scoring is parameterized by PrincipleParams, loaded from
// principle_params.json. The shipped defaults reproduce the documented
// worked examples; see default_principle_params().

#pragma once

#include <array>
#include <map>
#include <vector>

#include "stepo/types.hpp"

namespace stepo {

struct ColorMapParams {
    double c1_slope = 50.0;     // hue-difference falloff, degrees to zero score
    double c2_center = 20.0;    // preferred lightness gap
    double c2_slope = 50.0;     // lightness-gap falloff
    double c4_mismatch = 0.3;   // temperature-mismatch score
};

struct SilhouetteTables {
    std::map<Fit, double> fit;
    std::map<Shape, double> shape;
    std::map<LengthClass, double> length;
};

struct PrincipleParams {
    std::array<double, 3> rho = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::array<double, 4> beta = {0.25, 0.25, 0.25, 0.25};
    ColorMapParams color_map;
    SilhouetteTables sil_tables;
    // Rows and columns ordered H, X, A, O, Y.
    std::array<std::array<double, 5>, 5> shape_compat = {};
    // Rows and columns ordered tight, fit, loose.
    std::array<std::array<double, 3>, 3> fit_contrast = {};
    double golden_sigma = 0.15;
};

PrincipleParams default_principle_params();

json principle_params_to_json(const PrincipleParams& p);
PrincipleParams principle_params_from_json(const json& j);

struct SilhouetteScore {
    std::array<double, 3> f = {0, 0, 0};  // fit degree, shape type, length
    double total = 0.0;
};

struct ColorScoreRaw {
    double delta_h = 0.0;
    double delta_l = 0.0;
    double s_ratio = 0.0;  // stored as given (a/b); scored order-invariantly
    bool same_temp = false;
};

struct ColorScore {
    std::array<double, 4> c = {0, 0, 0, 0};  // hue, brightness, saturation, temperature
    ColorScoreRaw raw;
    double total = 0.0;
};

// Named constraint bundle for one style (formality floors, prohibited tags,
// numeric pairing limits), all expressed as RuleAttribute entries.
struct StyleConstraintSet {
    std::string style_id;
    std::vector<RuleAttribute> constraints;
};

// total = sum rho_i * f_i. Exposed separately so externally supplied
// sub-scores can be aggregated without the lookup tables.
SilhouetteScore aggregate_silhouette(const std::array<double, 3>& f,
                                     const PrincipleParams& params);

// Per-garment sub-scores from sil_tables, F_i = (S_i + P_i)/2; the shape
// dimension is then blended 50/50 with shape_compat[top][bottom] so
// cross-garment conflicts register.
SilhouetteScore score_silhouette_pair(const SilhouetteSpec& top, const SilhouetteSpec& bottom,
                                      const PrincipleParams& params);

// C1..C4 from color_map over (hue difference, lightness gap, chroma ratio,
// temperature match); total = sum beta_i * c_i. Both chromas zero makes the
// ratio 1 (neutral pairing).
ColorScore score_color_pair(const ColorSpec& a, const ColorSpec& b,
                            const PrincipleParams& params);

// Product of indicator evaluations; strict: a constraint referencing an
// attribute the set does not carry throws StepoError naming it.
int check_style(const AttributeSet& attrs, const StyleConstraintSet& constraints);

// Weighted fraction of satisfied constraints. Unknown attributes count as
// unsatisfied. Throws StepoError on weight/constraint length mismatch.
double style_compatibility(const StyleConstraintSet& style, const AttributeSet& attrs,
                           const std::vector<double>& weights);

// 1 iff every constraint in every set holds; unknown attributes count as
// unsatisfied. Empty ruleset is vacuously 1.
int rule_satisfaction(const AttributeSet& attrs, const std::vector<StyleConstraintSet>& rulesets);

// Euclidean distance between Lab triples.
double delta_e(const std::array<double, 3>& a, const std::array<double, 3>& b);

enum class HarmonyScheme { Monochromatic, Analogous, Complementary, Triadic, Neutral };

std::string to_string(HarmonyScheme s);

struct HarmonyAssessment {
    HarmonyScheme scheme = HarmonyScheme::Monochromatic;
    double score = 0.0;
    bool high_contrast = false;
};

// Scheme by hue-difference bucket (neutral overrides when either chroma < 10,
// nearest bucket when no interval contains the difference); score is the
// color-pair total with the hue component replaced by bucket fit;
// high_contrast = complementary scheme with delta_e > 30.
HarmonyAssessment classify_harmony(const ColorSpec& a, const ColorSpec& b,
                                   const PrincipleParams& params);

// Unimodal score peaking at split = 0.618: exp(-(split-0.618)^2 / (2 sigma^2)).
// Throws StepoError when split is outside (0,1).
double golden_ratio_score(double split, double sigma);

// Mean of fit contrast, shape compatibility and the golden-ratio score of
// the top's share of total length.
double balance(const SilhouetteSpec& top, const SilhouetteSpec& bottom,
               const PrincipleParams& params);

}  // namespace stepo
