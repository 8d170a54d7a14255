// SPDX-License-Identifier: Apache-2.0
//
// Writes the bundled demonstration KB to a directory (default data/sample_kb).

#include <iostream>

#include "sample_kb.hpp"

int main(int argc, char** argv) {
    std::string out = argc > 1 ? argv[1] : "data/sample_kb";
    try {
        stepo::KnowledgeBase kb = stepo::make_sample_kb();
        auto report = stepo::validate_kb(kb);
        if (!report.ok()) {
            for (const auto& f : report.findings)
                std::cerr << f.locus << ": " << f.message << "\n";
            return 1;
        }
        std::filesystem::create_directories(out);
        stepo::serialize_kb(kb, out);
        std::cout << "wrote " << out << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
