#include <benchmark/benchmark.h>

#include <filesystem>

#include "frl/ckpt.hpp"
#include "frl/factorized.hpp"
#include "frl/objectives.hpp"
#include "frl/optim.hpp"
#include "frl/rng.hpp"
#include "frl/spectra.hpp"

using frl::Matrix;

namespace {

Matrix random_matrix(frl::Index rows, frl::Index cols, std::uint64_t seed) {
  frl::CounterRng rng(seed);
  return rng.gaussian_matrix(rows, cols, 1.0);
}

void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<frl::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frl::svd(m));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Svd)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_SpectrumReport(benchmark::State& state) {
  const auto n = static_cast<frl::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frl::spectrum_report(m, 0.95));
  }
}
BENCHMARK(BM_SpectrumReport)->Arg(16)->Arg(64);

void BM_BalancedFactors(benchmark::State& state) {
  const auto n = static_cast<frl::Index>(state.range(0));
  const Matrix w = random_matrix(n, n / 2, 3) * random_matrix(n / 2, n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frl::balanced_factors_from(w, n / 2));
  }
}
BENCHMARK(BM_BalancedFactors)->Arg(16)->Arg(64);

void BM_FactorGradients(benchmark::State& state) {
  const auto n = static_cast<frl::Index>(state.range(0));
  const frl::LossPtr loss = frl::make_matrix_regression(random_matrix(n, n, 5), 0.5);
  const frl::Factorization f(random_matrix(n, n, 6), random_matrix(n, n, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(frl::factor_gradients(f, *loss, 0.1));
  }
}
BENCHMARK(BM_FactorGradients)->Arg(8)->Arg(32)->Arg(128);

void BM_TrainingSteps(benchmark::State& state) {
  const auto n = static_cast<frl::Index>(state.range(0));
  const frl::LossPtr loss = frl::make_matrix_regression(random_matrix(n, n, 8), 0.5);
  frl::OptimizerConfig cfg;
  cfg.step_size = 1e-3;
  for (auto _ : state) {
    frl::Factorization f(random_matrix(n, n, 9), random_matrix(n, n, 10));
    benchmark::DoNotOptimize(frl::run_training(f, *loss, 0.1, cfg, 100, 100));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_TrainingSteps)->Arg(8)->Arg(32);

void BM_ArchiveLoad(benchmark::State& state) {
  const auto dm = static_cast<frl::Index>(state.range(0));
  const auto path =
      (std::filesystem::temp_directory_path() / "frl_bench_archive.safetensors").string();
  frl::write_tensor_archive(path, {{"w", random_matrix(dm, dm, 11)}}, "F32");
  for (auto _ : state) {
    const frl::TensorArchive archive = frl::TensorArchive::load(path);
    benchmark::DoNotOptimize(archive.matrix("w"));
  }
}
BENCHMARK(BM_ArchiveLoad)->Arg(64)->Arg(512);

void BM_AttentionHead(benchmark::State& state) {
  const auto dm = static_cast<frl::Index>(state.range(0));
  const frl::Index dk = dm / 8;
  const auto path =
      (std::filesystem::temp_directory_path() / "frl_bench_head.safetensors").string();
  frl::write_tensor_archive(path, {{"layers.0.attn.q", random_matrix(dk, dm, 12)},
                                   {"layers.0.attn.k", random_matrix(dk, dm, 13)},
                                   {"layers.0.attn.v", random_matrix(dk, dm, 14)},
                                   {"layers.0.attn.o", random_matrix(dm, dk, 15)}},
                            "F32");
  frl::AttentionLayout layout;
  layout.q_template = "layers.{layer}.attn.q";
  layout.k_template = "layers.{layer}.attn.k";
  layout.v_template = "layers.{layer}.attn.v";
  layout.o_template = "layers.{layer}.attn.o";
  layout.d_model = dm;
  layout.d_head = dk;
  layout.num_heads = 1;
  layout.num_layers = 1;
  const frl::TensorArchive archive = frl::TensorArchive::load(path);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frl::attention_products(archive, layout, 0, 0));
  }
}
BENCHMARK(BM_AttentionHead)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
