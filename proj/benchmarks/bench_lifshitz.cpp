#include <benchmark/benchmark.h>

#include "casimir/lifshitz.hpp"
#include "casimir/materials.hpp"

namespace {

using namespace casimir;

FilmStack bench_stack() {
  FilmStack s;
  s.plate = gold_drude();
  s.film.poles.push_back({0.0, 1e15, 1e14});
  s.film.poles.push_back({1e15, 4e15, 4e14});
  s.substrate = gold_drude();
  s.thickness = 100e-9;
  return s;
}

void BM_EpsImagAxis(benchmark::State& state) {
  const LorentzDrudeModel gold = gold_drude();
  double xi = 2.5e14;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_eps_imag_axis(gold, xi));
    xi += 1.0;
  }
}
BENCHMARK(BM_EpsImagAxis);

void BM_FilmReflection(benchmark::State& state) {
  const FilmStack stack = bench_stack();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        film_reflection(stack, 2.5e14, 1e7, Polarization::P));
  }
}
BENCHMARK(BM_FilmReflection);

void BM_CasimirPressure(benchmark::State& state) {
  const FilmStack stack = bench_stack();
  const double d = static_cast<double>(state.range(0)) * 1e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(casimir_pressure(stack, d));
  }
}
BENCHMARK(BM_CasimirPressure)->Arg(5)->Arg(100)->Arg(1000);

void BM_PressureWithDerivative(benchmark::State& state) {
  const FilmStack stack = bench_stack();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pressure_with_gap_derivative(stack, 100e-9));
  }
}
BENCHMARK(BM_PressureWithDerivative);

}  // namespace

BENCHMARK_MAIN();
