// SPDX-License-Identifier: Apache-2.0

#include "stepo/explain.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace stepo {

std::string evidence_ref(const KnowledgeItem& item) {
    return to_string(item.source) + ":" + item.ref_id;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string dtype_label(const std::string& dtype) {
    std::string out = dtype;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

}  // namespace

NodeExplanation explain_node(const DecisionNode& node, const Context& context,
                             const std::map<std::string, double>& scores) {
    NodeExplanation ex;
    ex.node_id = node.id;
    ex.dtype = node.dtype;
    ex.chosen = node.chosen;

    for (const auto& [action, score] : scores) ex.alternatives.emplace_back(action, score);
    std::sort(ex.alternatives.begin(), ex.alternatives.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<const KnowledgeItem*> endorsing;
    for (const auto& item : context.knowledge.items)
        if (knowledge_endorses(item, node.dtype, node.chosen)) endorsing.push_back(&item);
    std::sort(endorsing.begin(), endorsing.end(), [](const KnowledgeItem* a,
                                                     const KnowledgeItem* b) {
        if (a->relevance != b->relevance) return a->relevance > b->relevance;
        if (source_priority(a->source) != source_priority(b->source))
            return source_priority(a->source) < source_priority(b->source);
        return a->ref_id < b->ref_id;
    });
    if (endorsing.size() > 3) endorsing.resize(3);
    for (const KnowledgeItem* item : endorsing) ex.evidence.push_back(evidence_ref(*item));

    std::string desc = decision_descriptor(node.dtype, node.chosen);
    double freq = 0.0;
    if (auto it = context.preferences.find(desc); it != context.preferences.end())
        freq = it->second;
    else if (auto it2 = context.preferences.find(node.chosen); it2 != context.preferences.end())
        freq = it2->second;
    if (context.preferences.empty())
        ex.preference_note = "no preference signal for this decision type";
    else if (freq > 0.0)
        ex.preference_note =
            "\"" + desc + "\" appears in " + fixed2(freq * 100.0) + "% of the user's history";
    else
        ex.preference_note = "no history support for \"" + desc + "\"";

    std::ostringstream text;
    text << "Chose " << node.chosen << " for " << dtype_label(node.dtype);
    if (!context.path_prefix.empty()) {
        text << " after ";
        for (std::size_t i = 0; i < context.path_prefix.size(); ++i) {
            if (i) text << ", ";
            text << dtype_label(context.path_prefix[i].first) << "="
                 << context.path_prefix[i].second;
        }
    }
    if (endorsing.empty()) {
        text << "; principle-only decision (no retrieved evidence endorses it)";
    } else {
        text << "; supported by ";
        for (std::size_t i = 0; i < endorsing.size(); ++i) {
            if (i) text << ", ";
            text << evidence_ref(*endorsing[i]) << " (relevance "
                 << fixed2(endorsing[i]->relevance) << ")";
        }
    }
    text << ". " << ex.preference_note << ".";
    ex.rationale_text = text.str();
    return ex;
}

ExplanationReport assemble_report(const std::vector<NodeExplanation>& explanations,
                                  const std::vector<std::string>& related_cases,
                                  const PreferenceProfile& profile,
                                  const json& request_summary) {
    ExplanationReport report;
    report.request_summary = request_summary;
    report.node_explanations = explanations;
    report.related_cases = related_cases;
    report.profile_summary = {{"user_id", profile.user_id},
                              {"history_size", profile.history_size},
                              {"trend_match_rate", profile.trend_match_rate},
                              {"cold_start", profile.cold_start()}};
    for (const auto& ex : explanations) {
        report.index_forward[ex.node_id] = ex.evidence;
        for (const auto& ref : ex.evidence) {
            auto& nodes = report.index_backward[ref];
            if (std::find(nodes.begin(), nodes.end(), ex.node_id) == nodes.end())
                nodes.push_back(ex.node_id);
        }
    }
    return report;
}

std::vector<std::string> trace_query(const ExplanationReport& report, const std::string& query) {
    if (auto it = report.index_forward.find(query); it != report.index_forward.end())
        return it->second;
    if (auto it = report.index_backward.find(query); it != report.index_backward.end())
        return it->second;
    throw StepoError("\"" + query + "\" not in report");
}

json report_to_json(const ExplanationReport& report) {
    json nodes = json::array();
    for (const auto& ex : report.node_explanations) {
        json alts = json::array();
        for (const auto& [action, score] : ex.alternatives)
            alts.push_back({{"action", action}, {"score", score}});
        nodes.push_back({{"node_id", ex.node_id},
                         {"type", ex.dtype},
                         {"chosen", ex.chosen},
                         {"alternatives", alts},
                         {"evidence", ex.evidence},
                         {"preference_note", ex.preference_note},
                         {"rationale", ex.rationale_text}});
    }
    return json{{"request", report.request_summary},
                {"nodes", nodes},
                {"related_cases", report.related_cases},
                {"profile", report.profile_summary},
                {"index_forward", report.index_forward},
                {"index_backward", report.index_backward}};
}

ExplanationReport report_from_json(const json& j) {
    ExplanationReport report;
    report.request_summary = j.value("request", json::object());
    for (const auto& n : j.at("nodes")) {
        NodeExplanation ex;
        ex.node_id = n.at("node_id").get<std::string>();
        ex.dtype = n.at("type").get<std::string>();
        ex.chosen = n.at("chosen").get<std::string>();
        for (const auto& a : n.at("alternatives"))
            ex.alternatives.emplace_back(a.at("action").get<std::string>(),
                                         a.at("score").get<double>());
        for (const auto& e : n.at("evidence")) ex.evidence.push_back(e.get<std::string>());
        ex.preference_note = n.value("preference_note", "");
        ex.rationale_text = n.value("rationale", "");
        report.node_explanations.push_back(std::move(ex));
    }
    for (const auto& c : j.value("related_cases", json::array()))
        report.related_cases.push_back(c.get<std::string>());
    report.profile_summary = j.value("profile", json::object());
    if (j.contains("index_forward"))
        report.index_forward =
            j.at("index_forward").get<std::map<std::string, std::vector<std::string>>>();
    if (j.contains("index_backward"))
        report.index_backward =
            j.at("index_backward").get<std::map<std::string, std::vector<std::string>>>();
    return report;
}

std::string report_to_text(const ExplanationReport& report) {
    std::ostringstream out;
    out << "Recommendation trace";
    if (report.profile_summary.contains("user_id"))
        out << " for user " << report.profile_summary.at("user_id").get<std::string>();
    out << "\n";
    for (const auto& ex : report.node_explanations) {
        out << "  [" << ex.node_id << "] " << dtype_label(ex.dtype) << " -> " << ex.chosen
            << "\n";
        out << "      " << ex.rationale_text << "\n";
        if (ex.alternatives.size() > 1) {
            out << "      alternatives:";
            for (const auto& [action, score] : ex.alternatives)
                out << " " << action << "=" << fixed2(score);
            out << "\n";
        }
    }
    if (!report.related_cases.empty()) {
        out << "  related cases:";
        for (const auto& c : report.related_cases) out << " " << c;
        out << "\n";
    }
    return out.str();
}

}  // namespace stepo
