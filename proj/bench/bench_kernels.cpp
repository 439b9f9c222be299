// Parallel (OpenMP) vs serial reference: gemm kernels and per-batch gradients.
#include <benchmark/benchmark.h>

#include "brk/kernels.hpp"
#include "brk/log.hpp"
#include "brk/rng.hpp"
#include "brk/synthetic.hpp"
#include "brk/trainer.hpp"

using namespace bnews;

namespace {

Matrix random(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& x : m.data()) x = rng.uniform(-1, 1);
    return m;
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random(n, n, 1), b = random(n, n, 2);
    Matrix out(n, n);
    for (auto _ : state) {
        Kernel(a, b, out);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
    state.counters["threads"] = kernels::max_threads();
}

struct BatchFixture {
    std::vector<EncodedArticle> articles;
    Batch batch;
    ParamStore store;

    BatchFixture() {
        SyntheticSpec spec;
        spec.n_articles = 64;
        TrainConfig cfg;
        articles = encode_all(generate_synthetic(spec).articles, cfg.hash_vectorizers());
        for (const auto& a : articles) batch.push_back(&a);
        store = init_params(cfg.shape(0), 1);
    }
};

void BM_batch_gradients(benchmark::State& state, Execution exec) {
    static BatchFixture f;
    for (auto _ : state) {
        f.store.zero_grads();
        auto loss = accumulate_batch_gradients(f.store, f.batch, Ablation::full, 1.0, 0.1, exec);
        benchmark::DoNotOptimize(loss);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
    state.counters["threads"] = kernels::max_threads();
}

}  // namespace

BENCHMARK(BM_gemm<kernels::gemm>)->Name("gemm/parallel")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gemm<kernels::serial::gemm>)->Name("gemm/serial")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gemm<kernels::gemm_tn>)->Name("gemm_tn/parallel")->Arg(256);
BENCHMARK(BM_gemm<kernels::serial::gemm_tn>)->Name("gemm_tn/serial")->Arg(256);
BENCHMARK_CAPTURE(BM_batch_gradients, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_batch_gradients, serial, Execution::serial)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    init_logging();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
