// SPDX-License-Identifier: Apache-2.0
//
// Recommendation CLI: single recommendations with explanations, offline
// benchmark runs, and decision-trace queries. Exit codes: 0 ok, 1 domain
// errors (validation findings, no feasible outfit, unknown ids), 2 usage or
// I/O errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "stepo/eval.hpp"
#include "stepo/pipeline.hpp"
#include "stepo/policy.hpp"

namespace fs = std::filesystem;
using namespace stepo;

namespace {

KnowledgeBase load_or_die(const std::string& path, int& code) {
    if (!fs::is_directory(path)) {
        std::cerr << "not a directory: " << path << "\n";
        code = 2;
        return {};
    }
    try {
        code = 0;
        return load_kb(path);
    } catch (const KbError& e) {
        std::cerr << e.what() << "\n";
        code = 1;
        return {};
    }
}

std::unique_ptr<DecisionPolicy> make_policy(const std::string& kind, const std::string& endpoint,
                                            int timeout_ms, const KnowledgeBase& kb) {
    if (kind == "deterministic") return std::make_unique<DeterministicPolicy>(kb);
    if (kind != "external") throw StepoError("unknown policy \"" + kind + "\"");
    if (endpoint.empty()) throw StepoError("--policy external requires --endpoint");
    if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0)
        return std::make_unique<HttpPolicy>(endpoint, kb, timeout_ms);
    return std::make_unique<SubprocessPolicy>(endpoint, kb, timeout_ms);
}

json candidate_json(const ScoredCandidate& c) {
    json decisions = json::array();
    for (const auto& n : c.path.nodes)
        decisions.push_back(json{{"choice", n.chosen}, {"score", n.score}, {"type", n.dtype}});
    return json{{"attributes", c.path.attributes},
                {"decisions", decisions},
                {"final_score", c.final_score},
                {"path_score", c.path.path_score},
                {"preference", c.preference},
                {"trend", c.trend}};
}

int cmd_recommend(const std::string& kb_path, const std::string& user_id,
                  const std::string& anchor_id, const std::string& policy_kind,
                  const std::string& endpoint, int timeout_ms, std::size_t beam,
                  const std::string& format, const std::optional<std::string>& dataset,
                  const std::optional<std::string>& trace_out) {
    int code = 0;
    KnowledgeBase kb = load_or_die(kb_path, code);
    if (code) return code;

    const GarmentEntity* anchor = kb.find_entity(anchor_id);
    if (!anchor) {
        std::cerr << "unknown anchor id \"" << anchor_id << "\"\n";
        return 1;
    }

    PipelineOptions opts;
    opts.search.beam_width = beam;
    std::optional<fs::path> dataset_dir;
    if (dataset) dataset_dir = fs::path(*dataset);
    PreferenceProfile profile = profile_for_user(user_id, dataset_dir, kb);

    auto policy = make_policy(policy_kind, endpoint, timeout_ms, kb);
    RecommendationResult result;
    try {
        result = recommend(kb, *anchor, profile, *policy, opts);
    } catch (const NoFeasibleOutfitError& e) {
        std::cerr << e.what() << "\n";
        for (const auto& p : e.pruned())
            std::cerr << "  pruned at " << p.node_id << " (" << p.dtype << "): " << p.reason
                      << "\n";
        return 1;
    }

    if (trace_out) {
        std::ofstream out(*trace_out, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write trace file " << *trace_out << "\n";
            return 2;
        }
        out << report_to_json(result.report).dump(2) << "\n";
    }

    if (format == "json") {
        json candidates = json::array();
        for (const auto& c : result.ranked) candidates.push_back(candidate_json(c));
        json items = json::array();
        for (const auto& [id, match] : result.items)
            items.push_back(json{{"id", id}, {"match", match}});
        json out{{"anchor", anchor_id},
                 {"candidates", candidates},
                 {"cold_start", profile.cold_start()},
                 {"items", items},
                 {"policy_fallbacks", result.search.policy_fallbacks},
                 {"report", report_to_json(result.report)},
                 {"user", user_id},
                 {"weights", json{{"alpha", result.weights.alpha},
                                  {"beta", result.weights.beta}}}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::ostringstream out;
        out << "anchor: " << anchor_id << "  user: " << user_id
            << (profile.cold_start() ? " (cold start)" : "") << "\n";
        out << "weights: preference " << result.weights.alpha << ", trend "
            << result.weights.beta << "\n\n";
        for (std::size_t i = 0; i < result.ranked.size(); ++i) {
            const auto& c = result.ranked[i];
            out << (i + 1) << ". score " << c.final_score << " (tree " << c.path.path_score
                << ")\n   ";
            bool first = true;
            for (const auto& a : c.path.attributes) {
                out << (first ? "" : ", ") << a;
                first = false;
            }
            out << "\n";
        }
        if (!result.items.empty()) {
            out << "\nitems:\n";
            for (const auto& [id, match] : result.items)
                out << "  " << id << "  (match " << match << ")\n";
        }
        out << "\n" << report_to_text(result.report);
        std::cout << out.str();
    }
    if (!result.search.policy_fallbacks.empty() && format != "json") {
        std::cout << "\npolicy fallbacks:\n";
        for (const auto& e : result.search.policy_fallbacks) std::cout << "  " << e << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& kb_path, const std::string& dataset_path,
                 const std::string& configs_csv, const std::string& k_csv, std::uint64_t seed,
                 std::size_t min_outfits, double ratio, const std::optional<std::string>& out_dir) {
    int code = 0;
    KnowledgeBase kb = load_or_die(kb_path, code);
    if (code) return code;

    IngestOptions iopts;
    iopts.min_outfits = min_outfits;
    iopts.split_ratio = ratio;
    iopts.seed = seed;
    Dataset ds = ingest_dataset(dataset_path, iopts);

    BenchmarkOptions bopts;
    bopts.configs.clear();
    {
        std::stringstream ss(configs_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) bopts.configs.push_back(pipeline_config_from_string(tok));
    }
    if (bopts.configs.empty()) throw StepoError("--configs parsed to an empty list");
    bopts.ks.clear();
    {
        std::stringstream ss(k_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) bopts.ks.push_back(std::stoul(tok));
    }
    if (bopts.ks.empty()) throw StepoError("--k parsed to an empty list");

    auto reports = run_benchmark(ds, kb, bopts);
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(eval_report_to_json(r));
    std::cout << arr.dump(2) << "\n";
    if (out_dir) {
        fs::create_directories(*out_dir);
        for (const auto& r : reports) {
            std::ofstream f(fs::path(*out_dir) / (r.config + ".json"), std::ios::binary);
            if (!f) {
                std::cerr << "cannot write report for " << r.config << "\n";
                return 2;
            }
            f << eval_report_to_json(r).dump(2) << "\n";
        }
    }
    return 0;
}

int cmd_explain(const std::string& trace_path, const std::optional<std::string>& query) {
    std::ifstream in(trace_path);
    if (!in) {
        std::cerr << "cannot read trace file " << trace_path << "\n";
        return 2;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        std::cerr << "malformed trace file: " << e.what() << "\n";
        return 1;
    }
    ExplanationReport report;
    try {
        report = report_from_json(j.contains("report") ? j.at("report") : j);
    } catch (const std::exception& e) {
        std::cerr << "not a decision trace: " << e.what() << "\n";
        return 1;
    }
    if (query) {
        try {
            for (const auto& hit : trace_query(report, *query)) std::cout << hit << "\n";
        } catch (const StepoError& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
    } else {
        std::cout << report_to_text(report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-guided outfit recommendation"};
    app.require_subcommand(1);

    std::string kb_path, user_id, anchor_id, endpoint, format = "text";
    std::string policy_kind = "deterministic";
    std::string dataset_path, configs = "full,no-retrieval,no-rerank,reasoning-only";
    std::string ks = "1,3,5,10";
    std::string trace_path, query_id, trace_out, eval_out;
    std::uint64_t seed = 0;
    std::size_t beam = 3, min_outfits = 10;
    double ratio = 0.8;
    int timeout_ms = -1;

    auto* rec = app.add_subcommand("recommend", "recommend a complementary outfit");
    rec->add_option("--kb", kb_path, "KB directory")->required();
    rec->add_option("--user", user_id, "user id")->required();
    rec->add_option("--anchor", anchor_id, "anchor item id")->required();
    rec->add_option("--policy", policy_kind, "deterministic|external");
    rec->add_option("--endpoint", endpoint, "external policy URL or command");
    rec->add_option("--beam", beam, "beam width");
    rec->add_option("--format", format, "json|text");
    rec->add_option("--dataset", dataset_path, "dataset directory supplying user history");
    rec->add_option("--trace", trace_out, "write the explanation report JSON here");
    rec->add_option("--timeout-ms", timeout_ms, "external adapter timeout");

    auto* ev = app.add_subcommand("evaluate", "run the offline benchmark");
    ev->add_option("--kb", kb_path, "KB directory")->required();
    ev->add_option("--dataset", dataset_path, "dataset directory")->required();
    ev->add_option("--configs", configs, "comma-separated pipeline configs");
    ev->add_option("--k", ks, "comma-separated cutoffs");
    ev->add_option("--seed", seed, "split seed");
    ev->add_option("--min-outfits", min_outfits, "minimum usable outfits per user");
    ev->add_option("--ratio", ratio, "train fraction");
    ev->add_option("--out", eval_out, "directory for per-config report files");

    auto* ex = app.add_subcommand("explain", "query a saved decision trace");
    ex->add_option("--trace", trace_path, "report JSON written by recommend --trace")->required();
    ex->add_option("--query", query_id, "node id or evidence ref to trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rec->parsed()) {
            std::optional<std::string> ds, tr;
            if (!dataset_path.empty()) ds = dataset_path;
            if (!trace_out.empty()) tr = trace_out;
            if (format != "json" && format != "text") {
                std::cerr << "unknown format \"" << format << "\"\n";
                return 2;
            }
            return cmd_recommend(kb_path, user_id, anchor_id, policy_kind, endpoint, timeout_ms,
                                 beam, format, ds, tr);
        }
        if (ev->parsed()) {
            std::optional<std::string> out;
            if (!eval_out.empty()) out = eval_out;
            return cmd_evaluate(kb_path, dataset_path, configs, ks, seed, min_outfits, ratio,
                                out);
        }
        std::optional<std::string> q;
        if (!query_id.empty()) q = query_id;
        return cmd_explain(trace_path, q);
    } catch (const StepoError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
