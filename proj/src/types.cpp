// SPDX-License-Identifier: Apache-2.0

#include "stepo/types.hpp"

#include <algorithm>
#include <cmath>

namespace stepo {

namespace {

[[noreturn]] void bad_enum(const char* what, const std::string& got) {
    throw StepoError(std::string("unknown ") + what + ": \"" + got + "\"");
}

}  // namespace

std::string to_string(Temperature t) {
    switch (t) {
        case Temperature::Warm: return "warm";
        case Temperature::Cool: return "cool";
        case Temperature::Neutral: return "neutral";
    }
    return "neutral";
}

std::string to_string(Shape s) {
    switch (s) {
        case Shape::H: return "H";
        case Shape::X: return "X";
        case Shape::A: return "A";
        case Shape::O: return "O";
        case Shape::Y: return "Y";
    }
    return "H";
}

std::string to_string(Fit f) {
    switch (f) {
        case Fit::Tight: return "tight";
        case Fit::Fitted: return "fit";
        case Fit::Loose: return "loose";
    }
    return "fit";
}

std::string to_string(LengthClass l) {
    switch (l) {
        case LengthClass::Cropped: return "cropped";
        case LengthClass::Regular: return "regular";
        case LengthClass::Long: return "long";
    }
    return "regular";
}

std::string to_string(Role r) {
    switch (r) {
        case Role::Top: return "top";
        case Role::Bottom: return "bottom";
        case Role::Composite: return "composite";
    }
    return "top";
}

Temperature temperature_from_string(const std::string& s) {
    if (s == "warm") return Temperature::Warm;
    if (s == "cool") return Temperature::Cool;
    if (s == "neutral") return Temperature::Neutral;
    bad_enum("temperature", s);
}

Shape shape_from_string(const std::string& s) {
    if (s == "H") return Shape::H;
    if (s == "X") return Shape::X;
    if (s == "A") return Shape::A;
    if (s == "O") return Shape::O;
    if (s == "Y") return Shape::Y;
    bad_enum("shape", s);
}

Fit fit_from_string(const std::string& s) {
    if (s == "tight") return Fit::Tight;
    if (s == "fit") return Fit::Fitted;
    if (s == "loose") return Fit::Loose;
    bad_enum("fit", s);
}

LengthClass length_class_from_string(const std::string& s) {
    if (s == "cropped") return LengthClass::Cropped;
    if (s == "regular") return LengthClass::Regular;
    if (s == "long") return LengthClass::Long;
    bad_enum("length class", s);
}

Role role_from_string(const std::string& s) {
    if (s == "top") return Role::Top;
    if (s == "bottom") return Role::Bottom;
    if (s == "composite") return Role::Composite;
    bad_enum("role", s);
}

std::string to_string(RuleOp op) {
    switch (op) {
        case RuleOp::Ge: return "ge";
        case RuleOp::Le: return "le";
        case RuleOp::Eq: return "eq";
        case RuleOp::In: return "in";
        case RuleOp::NotIn: return "not_in";
    }
    return "eq";
}

RuleOp rule_op_from_string(const std::string& s) {
    if (s == "ge") return RuleOp::Ge;
    if (s == "le") return RuleOp::Le;
    if (s == "eq") return RuleOp::Eq;
    if (s == "in") return RuleOp::In;
    if (s == "not_in") return RuleOp::NotIn;
    bad_enum("rule op", s);
}

std::string to_string(TrendEntry::Kind k) {
    switch (k) {
        case TrendEntry::Kind::Product: return "product";
        case TrendEntry::Kind::ScenarioStyle: return "scenario_style";
        case TrendEntry::Kind::Color: return "color";
        case TrendEntry::Kind::Silhouette: return "silhouette";
    }
    return "product";
}

TrendEntry::Kind trend_kind_from_string(const std::string& s) {
    if (s == "product") return TrendEntry::Kind::Product;
    if (s == "scenario_style") return TrendEntry::Kind::ScenarioStyle;
    if (s == "color") return TrendEntry::Kind::Color;
    if (s == "silhouette") return TrendEntry::Kind::Silhouette;
    bad_enum("trend kind", s);
}

std::optional<std::size_t> ScenarioStyleMatrix::scenario_index(const std::string& name) const {
    auto it = std::find(scenarios.begin(), scenarios.end(), name);
    if (it == scenarios.end()) return std::nullopt;
    return static_cast<std::size_t>(it - scenarios.begin());
}

std::optional<std::size_t> ScenarioStyleMatrix::style_index(const std::string& name) const {
    auto it = std::find(styles.begin(), styles.end(), name);
    if (it == styles.end()) return std::nullopt;
    return static_cast<std::size_t>(it - styles.begin());
}

std::optional<std::size_t> EmbeddingStore::index_of(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
}

double hue_difference(double h1_deg, double h2_deg) {
    if (h1_deg < 0.0 || h1_deg >= 360.0 || h2_deg < 0.0 || h2_deg >= 360.0)
        throw StepoError("hue out of [0,360)");
    double d = std::fabs(h1_deg - h2_deg);
    return std::min(d, 360.0 - d);
}

Temperature classify_temperature(double hue_deg, double chroma) {
    if (chroma < 10.0) return Temperature::Neutral;
    if (hue_deg >= 135.0 && hue_deg < 315.0) return Temperature::Cool;
    return Temperature::Warm;
}

namespace {

std::string achromatic_name(double lightness) {
    if (lightness < 25.0) return "black";
    if (lightness < 45.0) return "dark grey";
    if (lightness < 65.0) return "grey";
    if (lightness < 85.0) return "light grey";
    return "white";
}

std::string hue_family(double h) {
    if (h >= 345.0 || h < 15.0) return "red";
    if (h < 45.0) return "orange";
    if (h < 75.0) return "yellow";
    if (h < 165.0) return "green";
    if (h < 200.0) return "cyan";
    if (h < 255.0) return "blue";
    if (h < 290.0) return "purple";
    return "magenta";
}

}  // namespace

std::string color_name(const ColorSpec& c) {
    if (c.chroma < 10.0) return achromatic_name(c.lightness);
    std::string base = hue_family(c.hue_deg);
    if (c.lightness < 35.0) return "dark " + base;
    if (c.lightness > 70.0) return "light " + base;
    return base;
}

std::set<std::string> effective_descriptors(const GarmentEntity& e) {
    std::set<std::string> out = e.tags;
    out.insert(e.category);
    out.insert(color_name(e.color));
    out.insert(to_string(e.color.temperature) + " color");
    out.insert(to_string(e.silhouette.fit) + " fit");
    out.insert(to_string(e.silhouette.shape) + " silhouette");
    out.insert(to_string(e.silhouette.length_class) + " length");
    return out;
}

namespace {

std::optional<double> formality_from_tags(const std::set<std::string>& tags) {
    if (tags.count("formal")) return 0.9;
    if (tags.count("semi-formal")) return 0.7;
    if (tags.count("casual")) return 0.3;
    return std::nullopt;
}

}  // namespace

AttributeSet attribute_set_for(const GarmentEntity& e) {
    AttributeSet a;
    a.descriptors = effective_descriptors(e);
    a.numerics["hue"] = e.color.hue_deg;
    a.numerics["chroma"] = e.color.chroma;
    a.numerics["lightness"] = e.color.lightness;
    a.numerics["length_ratio"] = e.silhouette.length_ratio;
    if (auto f = formality_from_tags(e.tags)) a.numerics["formality"] = *f;
    a.strings["category"] = e.category;
    a.strings["role"] = to_string(e.role);
    a.strings["shape"] = to_string(e.silhouette.shape);
    a.strings["fit"] = to_string(e.silhouette.fit);
    a.strings["length"] = to_string(e.silhouette.length_class);
    a.strings["temperature"] = to_string(e.color.temperature);
    a.strings["color"] = color_name(e.color);
    return a;
}

AttributeSet outfit_attributes(const GarmentEntity& top, const GarmentEntity& bottom) {
    AttributeSet a;
    auto td = effective_descriptors(top);
    auto bd = effective_descriptors(bottom);
    a.descriptors.insert(td.begin(), td.end());
    a.descriptors.insert(bd.begin(), bd.end());

    a.numerics["delta_h"] = hue_difference(top.color.hue_deg, bottom.color.hue_deg);
    a.numerics["delta_l"] = std::fabs(top.color.lightness - bottom.color.lightness);
    double bs = std::max(bottom.color.chroma, 1e-9);
    a.numerics["s_ratio"] = top.color.chroma / bs;
    a.numerics["length_split"] =
        top.silhouette.length_ratio /
        std::max(top.silhouette.length_ratio + bottom.silhouette.length_ratio, 1e-9);

    auto tf = formality_from_tags(top.tags);
    auto bf = formality_from_tags(bottom.tags);
    if (tf && bf)
        a.numerics["formality"] = (*tf + *bf) / 2.0;
    else if (tf)
        a.numerics["formality"] = *tf;
    else if (bf)
        a.numerics["formality"] = *bf;

    a.strings["top.shape"] = to_string(top.silhouette.shape);
    a.strings["top.fit"] = to_string(top.silhouette.fit);
    a.strings["top.length"] = to_string(top.silhouette.length_class);
    a.strings["top.color"] = color_name(top.color);
    a.strings["bottom.shape"] = to_string(bottom.silhouette.shape);
    a.strings["bottom.fit"] = to_string(bottom.silhouette.fit);
    a.strings["bottom.length"] = to_string(bottom.silhouette.length_class);
    a.strings["bottom.color"] = color_name(bottom.color);
    a.strings["temperature_match"] =
        top.color.temperature == bottom.color.temperature ? "same" : "different";
    return a;
}

bool rule_applicable(const RuleAttribute& rule, const AttributeSet& attrs) {
    if (attrs.numerics.count(rule.lhs) || attrs.strings.count(rule.lhs)) return true;
    // Descriptor-membership rules apply to any attribute view.
    return rule.lhs == "descriptors";
}

namespace {

bool value_in_list(const json& rhs, const std::string& v) {
    if (!rhs.is_array()) throw StepoError("rule rhs for in/not_in must be an array");
    for (const auto& e : rhs)
        if (e.is_string() && e.get<std::string>() == v) return true;
    return false;
}

bool any_descriptor_in_list(const json& rhs, const std::set<std::string>& descriptors) {
    if (!rhs.is_array()) throw StepoError("rule rhs for in/not_in must be an array");
    for (const auto& e : rhs)
        if (e.is_string() && descriptors.count(e.get<std::string>())) return true;
    return false;
}

}  // namespace

bool evaluate_rule(const RuleAttribute& rule, const AttributeSet& attrs) {
    if (rule.lhs == "descriptors") {
        switch (rule.op) {
            case RuleOp::In: return any_descriptor_in_list(rule.rhs, attrs.descriptors);
            case RuleOp::NotIn: return !any_descriptor_in_list(rule.rhs, attrs.descriptors);
            case RuleOp::Eq:
                return rule.rhs.is_string() &&
                       attrs.descriptors.count(rule.rhs.get<std::string>()) > 0;
            default:
                throw StepoError("descriptor rule supports eq/in/not_in only");
        }
    }
    if (auto it = attrs.numerics.find(rule.lhs); it != attrs.numerics.end()) {
        if (!rule.rhs.is_number())
            throw StepoError("rule \"" + rule.id + "\": numeric attribute \"" + rule.lhs +
                             "\" needs a numeric rhs");
        double v = it->second;
        double r = rule.rhs.get<double>();
        switch (rule.op) {
            case RuleOp::Ge: return v >= r;
            case RuleOp::Le: return v <= r;
            case RuleOp::Eq: return std::fabs(v - r) < 1e-9;
            default:
                throw StepoError("rule \"" + rule.id + "\": in/not_in needs a string attribute");
        }
    }
    if (auto it = attrs.strings.find(rule.lhs); it != attrs.strings.end()) {
        const std::string& v = it->second;
        switch (rule.op) {
            case RuleOp::Eq: return rule.rhs.is_string() && rule.rhs.get<std::string>() == v;
            case RuleOp::In: return value_in_list(rule.rhs, v);
            case RuleOp::NotIn: return !value_in_list(rule.rhs, v);
            default:
                throw StepoError("rule \"" + rule.id + "\": ge/le needs a numeric attribute");
        }
    }
    throw StepoError("rule \"" + rule.id + "\" references unknown attribute \"" + rule.lhs + "\"");
}

}  // namespace stepo
