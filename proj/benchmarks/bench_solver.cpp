#include <benchmark/benchmark.h>

#include <gave/baselines.hpp>
#include <gave/generators.hpp>
#include <gave/sketch.hpp>
#include <gave/solver.hpp>

using namespace gave;

namespace {

GaveProblem make_problem(int m, int n) {
  GeneratorSpec spec;
  spec.m = m;
  spec.n = n;
  spec.a_min = 2.0;
  spec.b_max = 1.0;
  spec.kappa_a = 2.0;
  spec.kappa_b = 2.0;
  spec.seed = 1;
  return generate_spectral(spec);
}

void BM_RowKaczmarzStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  GaveProblem p = make_problem(m, m / 2);
  SketchDistribution dist(SketchKind::RowKaczmarz, p.A());
  RngStream rng(2);
  Vector x = Vector::Zero(p.n());
  for (auto _ : state) {
    SketchSample s = dist.draw(p.A(), rng);
    Vector abs_x = x.cwiseAbs();
    x.noalias() -= dist.scaled_direction(s, p, x, abs_x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RowKaczmarzStep)->Arg(128)->Arg(512)->Arg(1024);

void BM_AverageBlockStep(benchmark::State& state) {
  GaveProblem p = make_problem(512, 256);
  SketchDistribution::Options opts;
  opts.p = static_cast<int>(state.range(0));
  SketchDistribution dist(SketchKind::AverageBlock, p.A(), opts, RngStream(3));
  RngStream rng(4);
  Vector x = Vector::Zero(p.n());
  for (auto _ : state) {
    SketchSample s = dist.draw(p.A(), rng);
    Vector abs_x = x.cwiseAbs();
    x.noalias() -= dist.scaled_direction(s, p, x, abs_x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AverageBlockStep)->Arg(1)->Arg(8)->Arg(64)->Arg(512);

void BM_Fwht(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  RngStream rng(5);
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.normal();
  for (auto _ : state) {
    Vector w = v;
    fwht(w);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_Fwht)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SrhtDraw(benchmark::State& state) {
  GaveProblem p = make_problem(512, 256);
  SketchDistribution::Options opts;
  opts.p = static_cast<int>(state.range(0));
  SketchDistribution dist(SketchKind::Srht, p.A(), opts, RngStream(6));
  RngStream rng(7);
  for (auto _ : state) {
    SketchSample s = dist.draw(p.A(), rng);
    benchmark::DoNotOptimize(s.norm_sq_sa);
  }
}
BENCHMARK(BM_SrhtDraw)->Arg(4)->Arg(16);

void BM_NewtonSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GaveProblem p = make_problem(n, n);
  StopRule stop{StopMetric::Rre, 1e-20, 100};
  for (auto _ : state) {
    SolveReport rep = gnm_solve(p, stop, Vector::Zero(n));
    benchmark::DoNotOptimize(rep.final_x.data());
  }
}
BENCHMARK(BM_NewtonSolve)->Arg(64)->Arg(256);

void BM_BuildPaving(benchmark::State& state) {
  GaveProblem p = make_problem(512, 256);
  for (auto _ : state) {
    RngStream rng(8);
    Paving paving = build_paving(p.A(), static_cast<int>(state.range(0)), rng);
    benchmark::DoNotOptimize(paving.beta2);
  }
}
BENCHMARK(BM_BuildPaving)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
