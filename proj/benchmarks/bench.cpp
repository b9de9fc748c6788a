#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <smfg/solver.hpp>

namespace {

smfg::ProblemData make_problem(std::shared_ptr<const smfg::Mesh> mesh, double eps) {
  auto models = smfg::prototype_models(2.0, 2.0);
  auto inflow = smfg::nodal_inflow(*mesh, 1.0);
  return smfg::ProblemData(std::move(mesh), models.hamiltonian, models.coupling, models.exponents, std::move(inflow),
                           eps);
}

std::shared_ptr<const smfg::Mesh> interval(std::size_t n) {
  return std::make_shared<const smfg::Mesh>(
      smfg::build_interval_mesh(0.0, 1.0, n, smfg::BoundaryTag::neumann, smfg::BoundaryTag::dirichlet));
}

std::shared_ptr<const smfg::Mesh> square(std::size_t n) {
  return std::make_shared<const smfg::Mesh>(smfg::build_rect_mesh(1.0, 1.0, n, n, smfg::RectTags{}));
}

void run_energy_and_gradient(benchmark::State& state, const smfg::ProblemData& data) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> u(data.mesh().vertex_count());
  for (double& v : u) v = normal(rng);
  std::vector<double> g(u.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(smfg::energy_and_gradient(data, u, g));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.mesh().element_count()));
}

void BM_EnergyGradient1D(benchmark::State& state) {
  const auto data = make_problem(interval(static_cast<std::size_t>(state.range(0))), 0.1);
  run_energy_and_gradient(state, data);
}
BENCHMARK(BM_EnergyGradient1D)->Arg(64)->Arg(1024);

void BM_EnergyGradient2D(benchmark::State& state) {
  const auto data = make_problem(square(static_cast<std::size_t>(state.range(0))), 0.1);
  run_energy_and_gradient(state, data);
}
BENCHMARK(BM_EnergyGradient2D)->Arg(16)->Arg(64);

void BM_Solve1D(benchmark::State& state) {
  const auto mesh = interval(64);
  const auto data = make_problem(mesh, 0.1);
  smfg::SolverOptions opts;
  opts.tol_grad = 1e-11;
  for (auto _ : state) {
    auto r = smfg::minimize_energy(data, smfg::FeFunction(*mesh), opts);
    benchmark::DoNotOptimize(r.grad_norm);
  }
}
BENCHMARK(BM_Solve1D)->Unit(benchmark::kMillisecond);

void BM_Continuation2D(benchmark::State& state) {
  const auto data = make_problem(square(16), 0.2);
  smfg::ContinuationSchedule schedule;
  schedule.eps_count = 4;
  smfg::SolverOptions opts;
  opts.tol_grad = 1e-11;
  smfg::DiagnosticsOptions diag;
  diag.minty_samples = 0;
  diag.monotonicity_samples = 0;
  for (auto _ : state) {
    auto stages = smfg::continuation(data, schedule, opts, diag);
    benchmark::DoNotOptimize(stages.back().iterations);
  }
}
BENCHMARK(BM_Continuation2D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
