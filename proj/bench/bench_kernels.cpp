// Serial reference vs OpenMP kernels: cell-local stiffness assembly and the
// Gamma0-column solves of the reduced eigenproblem.

#include <map>

#include <benchmark/benchmark.h>

#include "steklov/eig.hpp"
#include "steklov/meshgen.hpp"
#include "steklov/vem.hpp"

namespace {

using steklov::ExecutionMode;

const steklov::PolygonalMesh& mesh_for(int n) {
  static std::map<int, steklov::PolygonalMesh> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, steklov::gen_square_perturbed_triangles(n)).first;
  return it->second;
}

void assemble(benchmark::State& state, ExecutionMode mode) {
  const auto& mesh = mesh_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sys = steklov::assemble_global(mesh, {1.0}, {mode, false});
    benchmark::DoNotOptimize(sys.A.nonZeros());
  }
  state.counters["cells"] = static_cast<double>(mesh.num_cells());
}

void solve(benchmark::State& state, ExecutionMode mode) {
  const auto& mesh = mesh_for(static_cast<int>(state.range(0)));
  const auto sys = steklov::assemble_global(mesh, {1.0});
  for (auto _ : state) {
    auto res = steklov::solve_steklov(sys, 6, mode);
    benchmark::DoNotOptimize(res.lambdas.data());
  }
  state.counters["dofs"] = static_cast<double>(sys.n_dofs);
}

void BM_AssembleSerial(benchmark::State& s) { assemble(s, ExecutionMode::Serial); }
void BM_AssembleParallel(benchmark::State& s) { assemble(s, ExecutionMode::Parallel); }
void BM_SolveSerial(benchmark::State& s) { solve(s, ExecutionMode::Serial); }
void BM_SolveParallel(benchmark::State& s) { solve(s, ExecutionMode::Parallel); }

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
