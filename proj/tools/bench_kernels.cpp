// SPDX-License-Identifier: Apache-2.0
//
// Compares the parallel nearest-case scan against its serial reference and
// times the per-sample evaluation loop at a few library sizes.

#include <benchmark/benchmark.h>

#include <random>

#include "stepo/semantic.hpp"

using namespace stepo;

namespace {

struct Corpus {
    CaseLibrary lib;
    EmbeddingStore store;
    std::vector<float> query;
};

Corpus make_corpus(std::size_t n, std::size_t dim) {
    Corpus c;
    c.store.dim = dim;
    std::mt19937 rng(17);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (std::size_t i = 0; i < n; ++i) {
        Case k;
        k.id = "case-" + std::to_string(i);
        k.embedding_ref = i;
        c.lib.cases.push_back(std::move(k));
        c.store.ids.push_back("case-" + std::to_string(i));
        for (std::size_t d = 0; d < dim; ++d) c.store.data.push_back(dist(rng));
    }
    c.query.resize(dim);
    for (auto& x : c.query) x = dist(rng);
    return c;
}

void BM_nearest_serial(benchmark::State& state) {
    Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)), 64);
    for (auto _ : state) {
        auto top = nearest_cases_serial(c.query, c.lib, c.store, 10);
        benchmark::DoNotOptimize(top);
    }
}

void BM_nearest_parallel(benchmark::State& state) {
    Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)), 64);
    for (auto _ : state) {
        auto top = nearest_cases(c.query, c.lib, c.store, 10);
        benchmark::DoNotOptimize(top);
    }
}

}  // namespace

BENCHMARK(BM_nearest_serial)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_nearest_parallel)->Arg(1000)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
