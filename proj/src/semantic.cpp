// SPDX-License-Identifier: Apache-2.0

#include "stepo/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stepo {

const Case* CaseLibrary::find(const std::string& id) const {
    for (const auto& c : cases)
        if (c.id == id) return &c;
    return nullptr;
}

double edge_weight(double freq, double strength, double lambda) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(freq) || !in_unit(strength) || !in_unit(lambda))
        throw StepoError("edge_weight inputs must lie in [0,1]");
    return lambda * freq + (1.0 - lambda) * strength;
}

StyleRuleGraph build_graph(const CaseLibrary& cases,
                           const std::map<std::pair<std::string, std::string>, double>& strengths,
                           double lambda, double activation_threshold) {
    StyleRuleGraph g;
    g.lambda = lambda;
    g.activation_threshold = activation_threshold;
    g.strengths = strengths;

    std::set<std::string> styles, principles;
    for (const auto& c : cases.cases) {
        for (const auto& [s, v] : c.style_vector)
            if (v >= activation_threshold) styles.insert(s);
        for (const auto& [p, v] : c.principle_vector)
            if (v >= activation_threshold) principles.insert(p);
    }
    for (const auto& [key, v] : strengths) {
        styles.insert(key.first);
        principles.insert(key.second);
    }
    g.style_vertices.assign(styles.begin(), styles.end());
    g.principle_vertices.assign(principles.begin(), principles.end());

    double max_strength = 0.0;
    for (const auto& [key, v] : strengths) max_strength = std::max(max_strength, v);

    for (const auto& s : g.style_vertices) {
        std::size_t style_cases = 0;
        std::map<std::string, std::size_t> activating;
        for (const auto& c : cases.cases) {
            auto it = c.style_vector.find(s);
            if (it == c.style_vector.end() || it->second < activation_threshold) continue;
            ++style_cases;
            for (const auto& [p, v] : c.principle_vector)
                if (v >= activation_threshold) ++activating[p];
        }
        for (const auto& p : g.principle_vertices) {
            std::optional<double> freq;
            if (style_cases > 0 && activating.count(p))
                freq = static_cast<double>(activating[p]) / static_cast<double>(style_cases);
            else if (style_cases > 0)
                freq = 0.0;

            std::optional<double> strength;
            if (auto it = strengths.find({s, p}); it != strengths.end() && max_strength > 0.0)
                strength = it->second / max_strength;

            // Missing components fall back to the present one rather than
            // diluting it with an implicit zero.
            double w;
            if (freq && strength)
                w = edge_weight(*freq, *strength, lambda);
            else if (freq)
                w = *freq;
            else if (strength)
                w = *strength;
            else
                continue;
            if (w > 0.0) g.edges[{s, p}] = w;
        }
    }
    return g;
}

std::map<std::string, double> infer_styles(const StyleRuleGraph& graph,
                                           const std::map<std::string, double>& p_vec) {
    std::map<std::string, double> numerators;
    double denom = 0.0;
    for (const auto& s : graph.style_vertices) {
        double num = 0.0;
        for (const auto& [p, v] : p_vec) {
            auto it = graph.edges.find({s, p});
            if (it != graph.edges.end()) num += it->second * v;
        }
        numerators[s] = num;
        denom += num;
    }
    if (denom <= 0.0)
        throw NoEvidenceError("style inference: principle activations touch no weighted edge");
    for (auto& [s, v] : numerators) v /= denom;
    return numerators;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::vector<std::pair<std::string, double>> top_k_cases(
    std::vector<std::pair<std::string, double>> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

void check_nearest_pre(std::span<const float> query, const CaseLibrary& lib,
                       const EmbeddingStore& store) {
    if (lib.cases.empty()) throw StepoError("nearest_cases: empty case library");
    if (query.size() != store.dim)
        throw StepoError("nearest_cases: query dimension " + std::to_string(query.size()) +
                         " != store dimension " + std::to_string(store.dim));
}

}  // namespace

std::vector<std::pair<std::string, double>> nearest_cases_serial(std::span<const float> query,
                                                                 const CaseLibrary& lib,
                                                                 const EmbeddingStore& store,
                                                                 std::size_t k) {
    check_nearest_pre(query, lib, store);
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(lib.cases.size());
    for (const auto& c : lib.cases) {
        if (!c.embedding_ref || *c.embedding_ref >= store.count()) continue;
        scored.emplace_back(c.id, cosine_similarity(query, store.row(*c.embedding_ref)));
    }
    return top_k_cases(std::move(scored), k);
}

std::vector<std::pair<std::string, double>> nearest_cases(std::span<const float> query,
                                                          const CaseLibrary& lib,
                                                          const EmbeddingStore& store,
                                                          std::size_t k) {
    check_nearest_pre(query, lib, store);
    const std::size_t n = lib.cases.size();
    std::vector<double> sims(n, -2.0);  // sentinel: below any cosine
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto& c = lib.cases[static_cast<std::size_t>(i)];
        if (!c.embedding_ref || *c.embedding_ref >= store.count()) continue;
        sims[static_cast<std::size_t>(i)] =
            cosine_similarity(query, store.row(*c.embedding_ref));
    }
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (sims[i] > -1.5) scored.emplace_back(lib.cases[i].id, sims[i]);
    return top_k_cases(std::move(scored), k);
}

}  // namespace stepo
