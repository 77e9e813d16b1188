#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mirp/algebra.hpp"
#include "mirp/flow.hpp"
#include "mirp/roughpath.hpp"
#include "mirp/translation.hpp"

using namespace mirp;

namespace {

std::vector<std::vector<double>> sine_rows(unsigned level) {
  const std::size_t n = std::size_t{1} << level;
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    rows.push_back({t, std::sin(t)});
  }
  return rows;
}

PolynomialField smooth_field() {
  return PolynomialField({Polynomial({Rational(1, 2), Rational(0), Rational(-1, 4)}),
                          Polynomial({Rational(1), Rational(0), Rational(-1, 2), Rational(0), Rational(1, 24)})});
}

}  // namespace

static void BM_EnumeratePopulated(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_populated(2, n));
}
BENCHMARK(BM_EnumeratePopulated)->DenseRange(2, 5);

static void BM_GlProduct(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto forests = enumerate_forests(2, n);
  for (auto _ : state) {
    for (std::size_t a = 1; a < forests.size(); a += 3)
      for (std::size_t b = 1; b < forests.size(); b += 5)
        benchmark::DoNotOptimize(gl_product(forests[a], forests[b], n));
  }
}
BENCHMARK(BM_GlProduct)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_CoproductMinus(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto mis = enumerate_populated(2, n);
  for (auto _ : state)
    for (const auto& m : mis) benchmark::DoNotOptimize(coproduct_minus(m));
}
BENCHMARK(BM_CoproductMinus)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_BasisTables(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Basis(2, n));
}
BENCHMARK(BM_BasisTables)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_ExpLog(benchmark::State& state) {
  const Grading g(3, Rational(1, 3));
  LieElement l(2, g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(log_element(exp_element(l)));
}
BENCHMARK(BM_ExpLog);

static void BM_LiftBrownian(benchmark::State& state) {
  BrownianConfig cfg;
  cfg.d = 2;
  cfg.n_steps = static_cast<std::size_t>(state.range(0));
  cfg.stride = 16;
  const Grading g(3, Rational(1, 3));
  for (auto _ : state) {
    ++cfg.seed;
    benchmark::DoNotOptimize(lift_brownian(cfg, g));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_LiftBrownian)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

static void BM_LiftPiecewiseLinear(benchmark::State& state) {
  const auto rows = sine_rows(static_cast<unsigned>(state.range(0)));
  const Grading g(2, Rational(1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(lift_piecewise_linear(rows, g));
}
BENCHMARK(BM_LiftPiecewiseLinear)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

static void BM_LogOdeStep(benchmark::State& state) {
  const Grading g(2, Rational(1, 2));
  const auto path = lift_piecewise_linear(sine_rows(4), g);
  const auto f = smooth_field();
  const LieElement l = log_element(path.increments().front());
  const auto substeps = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(logode_step(l, f, 0.3, substeps, 1e12));
}
BENCHMARK(BM_LogOdeStep)->RangeMultiplier(2)->Range(1, 32);

static void BM_SolveFlow(benchmark::State& state) {
  const Grading g(2, Rational(1, 2));
  const auto path = lift_piecewise_linear(sine_rows(10), g);
  const auto f = smooth_field();
  SolveConfig cfg;
  cfg.mesh_level = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_flow(path, f, 0.3, cfg));
}
BENCHMARK(BM_SolveFlow)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_TranslateRoughPath(benchmark::State& state) {
  BrownianConfig cfg;
  cfg.d = 1;
  cfg.n_steps = 1 << 12;
  cfg.stride = 64;
  cfg.mode = BrownianMode::ito;
  const Grading g(3, Rational(1, 2));
  const auto path = lift_brownian(cfg, g);
  const Translation ell({ito_strat_character(1)}, 1);
  const Grading out(2, Rational(1, 4));
  for (auto _ : state) benchmark::DoNotOptimize(translate_roughpath(ell, path, out));
}
BENCHMARK(BM_TranslateRoughPath)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
