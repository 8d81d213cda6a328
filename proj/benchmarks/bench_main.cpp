#include <benchmark/benchmark.h>

#include "qpic/qpic.hpp"

namespace {

using namespace qpic;

const CircuitSpec& chip() {
  static const CircuitSpec c = reference_chip();
  return c;
}

void BM_BuildJsa(benchmark::State& state) {
  GridSpec g;
  g.points = static_cast<std::size_t>(state.range(0));
  const auto& s = chip().source;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_jsa(chip().material, s.pump, s.phase_match, g));
  }
}
BENCHMARK(BM_BuildJsa)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Compose(benchmark::State& state) {
  const double w = wavelength_to_omega(1.53);
  for (auto _ : state) benchmark::DoNotOptimize(compose(chip(), w));
}
BENCHMARK(BM_Compose);

void BM_Coincidence(benchmark::State& state) {
  GridSpec g;
  g.points = static_cast<std::size_t>(state.range(0));
  const auto& s = chip().source;
  const auto jsa = build_jsa(chip().material, s.pump, s.phase_match, g);
  const RoutingTable table(jsa, chip());
  for (auto _ : state) benchmark::DoNotOptimize(coincidence(jsa, table, {}));
}
BENCHMARK(BM_Coincidence)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_HomScan(benchmark::State& state) {
  GridSpec g;
  g.points = 512;
  const auto& s = chip().source;
  const auto jsa = build_jsa(chip().material, s.pump, s.phase_match, g);
  HomScanSpec scan;
  scan.points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hom_scan(jsa, chip(), scan));
}
BENCHMARK(BM_HomScan)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_PcSpectrum(benchmark::State& state) {
  const MaterialModel m = default_material();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pc_spectrum(m, 21.4, 7600, kPi / 15200, 24.5, 1.54, 1.60, 2001));
  }
}
BENCHMARK(BM_PcSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
