#include <benchmark/benchmark.h>

#include "qcorr/channel.hpp"
#include "qcorr/eig.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"

using namespace qcorr;

namespace {

SystemLayout qubits(std::size_t n) {
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < n; ++i) subs.push_back({"Q" + std::to_string(i), 2});
  return SystemLayout(std::move(subs));
}

}  // namespace

static void BM_HermitianEig(benchmark::State& state) {
  CounterRng rng(7);
  const ComplexMatrix m = random_hermitian(state.range(0), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_eig(m, 1e-8));
  }
}
BENCHMARK(BM_HermitianEig)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_Eigenvalues(benchmark::State& state) {
  CounterRng rng(7);
  const ComplexMatrix m = random_hermitian(state.range(0), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_eigenvalues(m, 1e-8));
  }
}
BENCHMARK(BM_Eigenvalues)->Arg(16)->Arg(64);

static void BM_PartialTrace(benchmark::State& state) {
  const std::size_t n = state.range(0);
  CounterRng rng(3);
  const DensityMatrix rho = random_density(qubits(n), 0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_trace(rho, {"Q0", "Q1"}));
  }
}
BENCHMARK(BM_PartialTrace)->Arg(4)->Arg(6);

static void BM_Entropy(benchmark::State& state) {
  CounterRng rng(9);
  const DensityMatrix rho = random_density(qubits(state.range(0)), 0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(von_neumann_entropy(rho));
  }
}
BENCHMARK(BM_Entropy)->Arg(4)->Arg(6);

static void BM_MultipartiteInformation(benchmark::State& state) {
  CounterRng rng(13);
  const DensityMatrix rho = random_density(qubits(6), 0, rng);
  const std::vector<std::vector<std::string>> parts{
      {"Q0", "Q1"}, {"Q2", "Q3"}, {"Q4", "Q5"}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(multipartite_information(rho, parts));
  }
}
BENCHMARK(BM_MultipartiteInformation);

static void BM_PetzRecoveryBuild(benchmark::State& state) {
  CounterRng rng(17);
  const DensityMatrix rho = random_density(qubits(2), 0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(petz_recovery(rho, {"Q1"}, 0.0));
  }
}
BENCHMARK(BM_PetzRecoveryBuild);

static void BM_ApplyChannel(benchmark::State& state) {
  CounterRng rng(19);
  const DensityMatrix rho = random_density(qubits(3), 0, rng);
  const DensityMatrix marginal = partial_trace(rho, {"Q0", "Q2"});
  const Channel recovery = petz_recovery(marginal, {"Q2"}, 0.0);
  const DensityMatrix input = partial_trace(rho, {"Q1", "Q2"});
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_channel(recovery, input));
  }
}
BENCHMARK(BM_ApplyChannel);

static void BM_Fidelity(benchmark::State& state) {
  CounterRng rng(23);
  const DensityMatrix a = random_density(qubits(3), 0, rng);
  const DensityMatrix b = random_density(qubits(3), 0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fidelity(a, b));
  }
}
BENCHMARK(BM_Fidelity);

BENCHMARK_MAIN();
