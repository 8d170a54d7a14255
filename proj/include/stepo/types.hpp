// SPDX-License-Identifier: Apache-2.0
//
// Core domain types of the fashion knowledge base: garment metadata
// (color, silhouette), semantic entities, rule attributes, trends, the
// scenario-style matrix and the binary embedding store.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stepo {

using json = nlohmann::json;

// Base error for the whole library.
class StepoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Load/validation error carrying a file+record locus.
class KbError : public StepoError {
public:
    KbError(std::string locus, const std::string& msg)
        : StepoError(locus + ": " + msg), locus_(std::move(locus)) {}
    const std::string& locus() const { return locus_; }

private:
    std::string locus_;
};

enum class Temperature { Warm, Cool, Neutral };
enum class Shape { H, X, A, O, Y };
enum class Fit { Tight, Fitted, Loose };           // serialized as tight/fit/loose
enum class LengthClass { Cropped, Regular, Long };
enum class Role { Top, Bottom, Composite };

std::string to_string(Temperature t);
std::string to_string(Shape s);
std::string to_string(Fit f);
std::string to_string(LengthClass l);
std::string to_string(Role r);

Temperature temperature_from_string(const std::string& s);
Shape shape_from_string(const std::string& s);
Fit fit_from_string(const std::string& s);
LengthClass length_class_from_string(const std::string& s);
Role role_from_string(const std::string& s);

inline constexpr std::array<Shape, 5> kAllShapes = {Shape::H, Shape::X, Shape::A,
                                                    Shape::O, Shape::Y};
inline constexpr std::array<Fit, 3> kAllFits = {Fit::Tight, Fit::Fitted, Fit::Loose};
inline constexpr std::array<LengthClass, 3> kAllLengths = {
    LengthClass::Cropped, LengthClass::Regular, LengthClass::Long};

// Hue/chroma/lightness plus Lab coordinates. Lab may be supplied in the
// record or derived from HCL (L, C*cos(h), C*sin(h)) when the KB is
// loaded with derive_lab set.
struct ColorSpec {
    double hue_deg = 0.0;    // [0,360)
    double chroma = 0.0;     // >= 0
    double lightness = 0.0;  // [0,100]
    std::array<double, 3> lab = {0.0, 0.0, 0.0};
    Temperature temperature = Temperature::Neutral;
};

struct SilhouetteSpec {
    Shape shape = Shape::H;
    Fit fit = Fit::Fitted;
    double length_ratio = 1.0;  // (0,2], 1.0 = standard for the garment's body segment
    LengthClass length_class = LengthClass::Regular;
};

struct GarmentEntity {
    std::string id;
    std::string category;
    Role role = Role::Top;
    ColorSpec color;
    SilhouetteSpec silhouette;
    std::set<std::string> tags;
    std::optional<std::size_t> embedding_ref;
};

struct SemanticEntity {
    enum class Kind { Style, Scenario };
    std::string id;
    Kind kind = Kind::Style;
    std::set<std::string> attribute_signature;
};

enum class RuleOp { Ge, Le, Eq, In, NotIn };

std::string to_string(RuleOp op);
RuleOp rule_op_from_string(const std::string& s);

// One coordination constraint. `style` groups the rule into that style's
// constraint set; rules without a style are global pairing rules.
struct RuleAttribute {
    std::string id;
    std::string style;
    std::string lhs;
    RuleOp op = RuleOp::Ge;
    json rhs;
    std::string unit;
    double weight = 1.0;
};

struct TrendEntry {
    enum class Kind { Product, ScenarioStyle, Color, Silhouette };
    std::string id;
    std::string season;
    Kind kind = Kind::Product;
    std::set<std::string> attribute_signature;
    double weight = 0.0;  // [0,1]
};

std::string to_string(TrendEntry::Kind k);
TrendEntry::Kind trend_kind_from_string(const std::string& s);

// m scenarios x n styles compatibility grid, values in [0,1].
struct ScenarioStyleMatrix {
    std::vector<std::string> scenarios;
    std::vector<std::string> styles;
    std::vector<double> values;  // row-major, scenarios x styles

    double at(std::size_t i, std::size_t j) const { return values[i * styles.size() + j]; }
    std::optional<std::size_t> scenario_index(const std::string& name) const;
    std::optional<std::size_t> style_index(const std::string& name) const;
};

// Row-major float32 vectors addressed by index; ids give the reverse map.
struct EmbeddingStore {
    std::size_t dim = 0;
    std::vector<std::string> ids;
    std::vector<float> data;

    std::size_t count() const { return ids.size(); }
    std::span<const float> row(std::size_t i) const {
        return std::span<const float>(data.data() + i * dim, dim);
    }
    std::optional<std::size_t> index_of(const std::string& id) const;
};

// Attribute view of an item or partial outfit, the shape rule expressions
// evaluate against.
struct AttributeSet {
    std::set<std::string> descriptors;
    std::map<std::string, double> numerics;
    std::map<std::string, std::string> strings;
};

// Minimum angular distance on the color wheel, in [0,180].
// Throws StepoError if an input is outside [0,360).
double hue_difference(double h1_deg, double h2_deg);

// Warm/cool band classification: warm = [315,360) u [0,135), cool = [135,315);
// chroma < 10 is neutral regardless of hue.
Temperature classify_temperature(double hue_deg, double chroma);

// Canonical discrete color label ("light blue", "dark grey", ...) used as a
// palette key and preference descriptor.
std::string color_name(const ColorSpec& c);

// Descriptor set an entity exposes for projection, preference statistics and
// candidate matching: tags plus derived category/color/silhouette descriptors.
std::set<std::string> effective_descriptors(const GarmentEntity& e);

// Full attribute view of one entity (descriptors + numeric + string fields).
// The numeric "formality" is derived from tags: formal=0.9, semi-formal=0.7,
// casual=0.3; absent otherwise.
AttributeSet attribute_set_for(const GarmentEntity& e);

// Attribute view of a top+bottom pair: descriptor union, role-prefixed string
// fields ("top.shape", "bottom.fit"), formality = mean of the sides that have it.
AttributeSet outfit_attributes(const GarmentEntity& top, const GarmentEntity& bottom);

// True when `attrs` knows the attribute the rule references.
bool rule_applicable(const RuleAttribute& rule, const AttributeSet& attrs);

// Evaluate one rule; throws StepoError naming the attribute when it is unknown.
bool evaluate_rule(const RuleAttribute& rule, const AttributeSet& attrs);

}  // namespace stepo
