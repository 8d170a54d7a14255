// SPDX-License-Identifier: Apache-2.0
//
// Knowledge-base builder and validator. Exit codes: 0 ok, 1 findings or
// domain errors, 2 usage or I/O errors.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "stepo/kb.hpp"

namespace fs = std::filesystem;
using namespace stepo;

namespace {

int report_findings(const ValidationReport& report) {
    for (const auto& f : report.findings)
        std::cout << f.locus << ": " << f.message << "\n";
    std::cout << (report.ok() ? "ok" : std::to_string(report.findings.size()) + " finding(s)")
              << "\n";
    return report.ok() ? 0 : 1;
}

int cmd_validate(const fs::path& kb_path) {
    if (!fs::is_directory(kb_path)) {
        std::cerr << "not a directory: " << kb_path << "\n";
        return 2;
    }
    KnowledgeBase kb;
    try {
        kb = load_kb_unchecked(kb_path);
    } catch (const KbError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return report_findings(validate_kb(kb));
}

int cmd_build(const fs::path& src, const fs::path& out) {
    if (!fs::is_directory(src)) {
        std::cerr << "not a directory: " << src << "\n";
        return 2;
    }
    KnowledgeBase kb;
    try {
        kb = load_kb_unchecked(src);
    } catch (const KbError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    ValidationReport report = validate_kb(kb);
    if (!report.ok()) return report_findings(report);
    try {
        fs::create_directories(out);
        serialize_kb(kb, out);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::cout << "built " << out.string() << " (" << kb.entities.size() << " entities, "
              << kb.cases.cases.size() << " cases, " << kb.graph.edges.size() << " graph edges)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge base builder and validator"};
    app.require_subcommand(1);

    std::string src, out, kb_path;
    auto* build = app.add_subcommand("build", "compile a KB source tree into canonical form");
    build->add_option("src", src, "source directory")->required();
    build->add_option("out", out, "output directory")->required();
    auto* validate = app.add_subcommand("validate", "check a KB directory, print findings");
    validate->add_option("kb", kb_path, "KB directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return cmd_build(src, out);
        return cmd_validate(kb_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
