// Parallel kernels against their serial references.
//   ./clarion_bench --benchmark_counters_tabular=true
// Set OMP_NUM_THREADS to vary the thread count.

#include "clarion/policy.hpp"
#include "clarion/synth.hpp"

#include <benchmark/benchmark.h>

using namespace clarion;

namespace {

const DomainDataset& corpus(std::size_t docs) {
    static std::map<std::size_t, DomainDataset> cache;
    auto it = cache.find(docs);
    if (it == cache.end()) {
        SynthProfile p;
        p.name = "bench";
        p.n_docs = docs;
        p.n_cases = 200;
        p.helpfulness = Helpfulness::Mixed;
        it = cache.emplace(docs, synth_domain(p, 1)).first;
    }
    return it->second;
}

std::string long_query(const DomainDataset& d) {
    std::string q;
    for (std::size_t i = 0; i < 12; ++i) q += d.documents()[(i * 37) % d.documents().size()].tokens[i % 5] + " ";
    return q;
}

template <auto Score>
void BM_Score(benchmark::State& state) {
    const auto& d = corpus(static_cast<std::size_t>(state.range(0)));
    const auto index = build_index(d.documents());
    const auto q = long_query(d);
    for (auto _ : state) benchmark::DoNotOptimize(Score(index, q));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Evaluate(benchmark::State& state) {
    const auto& d = corpus(300);
    const auto index = build_index(d.documents());
    const HashingEncoder encoder;
    const ScriptedQuestionGenerator questions;
    const ScriptedUserSimulator user;
    const Environment env{d, index, encoder, questions, user, {}};
    const PlannerPolicy policy(init_network(64, 5, 128, 3));
    const auto& cases = d.cases();
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? evaluate(env, cases, policy) : evaluate_serial(env, cases, policy));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cases.size()));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Score, score_all_serial)->Arg(1000)->Arg(20000)->Arg(100000);
BENCHMARK_TEMPLATE(BM_Score, score_all)->Arg(1000)->Arg(20000)->Arg(100000);
BENCHMARK_TEMPLATE(BM_Evaluate, false)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Evaluate, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
