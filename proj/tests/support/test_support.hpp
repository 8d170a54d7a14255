// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test suites: a garment builder, hand-sized
// knowledge bases with fully countable decision spaces, an exhaustive
// reference search, a synthetic preference benchmark world, and temp-dir /
// child-process helpers for the CLI tests.

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "stepo/kb.hpp"
#include "stepo/reasoning.hpp"

namespace stepo::test {

// Entity with Lab and temperature derived from HCL exactly like the KB load
// path.
GarmentEntity make_garment(const std::string& id, const std::string& category, Role role,
                           double hue, double chroma, double lightness, Shape shape, Fit fit,
                           LengthClass length, std::set<std::string> tags = {},
                           double length_ratio = 1.0);

// Micro knowledge bases sized for exhaustive enumeration. Complete
// assignment counts under the default decision sequence and a branching cap
// of 8: A = 90, B = 360, C = 180 (see the .cpp for the layouts).
KnowledgeBase micro_kb_a();
KnowledgeBase micro_kb_b();
KnowledgeBase micro_kb_c();

struct OracleResult {
    std::size_t complete_count = 0;
    std::size_t pruned_count = 0;
    std::vector<DecisionPath> paths;  // sorted like SearchResult.paths
};

// Depth-exhaustive reference search: expands every node through the same
// public enumeration/transition/policy calls as the beam search, never
// truncating a level. Matching its output against run_tree_search with a
// beam at least as wide as the widest level is the equivalence check.
OracleResult exhaustive_search(const StylingRequest& request, DecisionPolicy& policy,
                               const KnowledgeBase& kb);

// Synthetic benchmark world: 25 achromatic garments (5 lightness steps x 5
// item kinds), one scenario, two styles, ten outfit cases, one
// cropped-length trend, and principle parameters tuned so planted per-user
// preferences are recoverable.
KnowledgeBase synth_kb();

// 50-user dataset over synth_kb ids, written in the ingestion layout
// (items.json + users/<id>/outfits.json). Users a00..a24 wear a single
// color and alternate tshirt+trousers with blouse+skirt outfits; users
// b00..b24 wear a single color and only cropped trousers.
void write_synth_dataset(const std::filesystem::path& dir);

// Anchor ids of synth_kb tops, for randomized pipeline sweeps.
std::vector<std::string> synth_anchor_ids();

// Self-deleting temporary directory under the system temp root.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Run an argv (absolute program path first) with optional "KEY=VALUE"
// environment assignments, capturing exit code, stdout and stderr.
RunResult run_process(const std::vector<std::string>& argv,
                      const std::vector<std::string>& env = {});

}  // namespace stepo::test
