#include <benchmark/benchmark.h>

#include "pbe/geometry.hpp"

using namespace pbe;

namespace {

VoxelGrid square_grid(double half, int n) {
  const double h = 2.0 * half / n;
  return VoxelGrid({-half + 0.5 * h, -half + 0.5 * h, 0}, h, n, n);
}

BallUnion three_balls() {
  BallUnion u;
  u.balls = {{{-1.2, 0.0, 0}, 1.0}, {{1.3, 0.2, 0}, 0.9}, {{0.1, 1.4, 0}, 0.8}};
  return u;
}

void BM_UnionMask(benchmark::State &state) {
  const VoxelGrid g = square_grid(4.0, static_cast<int>(state.range(0)));
  const BallUnion u = three_balls();
  for (auto _ : state)
    benchmark::DoNotOptimize(union_mask(u, g));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_UnionMask)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_DistanceTransform(benchmark::State &state) {
  const VoxelGrid g = square_grid(4.0, static_cast<int>(state.range(0)));
  const Mask seeds = union_mask(three_balls(), g);
  for (auto _ : state)
    benchmark::DoNotOptimize(edt_squared(seeds, g));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_DistanceTransform)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_RollingBallClose(benchmark::State &state) {
  const VoxelGrid g = square_grid(5.0, static_cast<int>(state.range(0)));
  const BallUnion u = three_balls();
  for (auto _ : state)
    benchmark::DoNotOptimize(rolling_ball_close(u, 0.7, g));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_RollingBallClose)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_RegionMap(benchmark::State &state) {
  const VoxelGrid g = square_grid(6.0, static_cast<int>(state.range(0)));
  const BallUnion u = three_balls();
  for (auto _ : state)
    benchmark::DoNotOptimize(build_region_map(u, 0.7, 1.2, g));
}
BENCHMARK(BM_RegionMap)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
