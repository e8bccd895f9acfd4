#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "blowup/hermite.hpp"
#include "blowup/kernels.hpp"
#include "blowup/physical.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"

using namespace blowup;

namespace {

const ProblemParams& params() {
  static const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  return pp;
}

const PhiSolution& phi() {
  static const auto sol = solve_phi_ode(params(), 5.0, 200.0);
  return sol;
}

}  // namespace

static void BM_PhiOde(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_phi_ode(params(), 5.0, double(state.range(0))));
}
BENCHMARK(BM_PhiOde)->Arg(200)->Arg(10000);

static void BM_Decompose(benchmark::State& state) {
  const double s = 20.0, K = 4.0;
  const auto rule = QuadratureRule::gauss_hermite(200);
  const Grid grid = Grid::symmetric(3.0 * K * std::sqrt(s), 0.05);
  const auto q = make_initial_data(0.01, 0.005, s, phi(), grid);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(q, K, rule));
}
BENCHMARK(BM_Decompose);

static void BM_StepQ(benchmark::State& state) {
  const double s = 20.0;
  const Grid grid = Grid::symmetric(12.0 * std::sqrt(s), 0.05);
  const auto q = make_initial_data(0.01, 0.005, s, phi(), grid);
  for (auto _ : state) benchmark::DoNotOptimize(step_q(q, 1e-4, phi()));
}
BENCHMARK(BM_StepQ);

static void BM_PropagateK(benchmark::State& state) {
  const double sigma = 30.0, s = 31.0, K = 4.0;
  const Grid grid = Grid::symmetric(3.0 * K * std::sqrt(s), 0.05);
  const auto psi = make_kernel_probe(KernelProbe::MinusBump, grid, sigma, K);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_K(sigma, s, psi, phi()));
}
BENCHMARK(BM_PropagateK)->Unit(benchmark::kMillisecond);

static void BM_PhysicalSteps(benchmark::State& state) {
  const auto mesh = PhysicalMesh::uniform(2.0, 0.01);
  std::vector<double> u0;
  for (double x : mesh.nodes()) u0.push_back(1.0 + 0.1 * std::exp(-x * x));
  PhysicalConfig c;
  c.max_steps = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_physical(u0, mesh, params(), PerturbationFamily::for_params(params()), c));
  }
}
BENCHMARK(BM_PhysicalSteps)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
