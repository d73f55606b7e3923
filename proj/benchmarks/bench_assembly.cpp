#include <benchmark/benchmark.h>

#include "pbe/fem.hpp"
#include "pbe/mesh.hpp"

using namespace pbe;

namespace {

Mesh disk(int refinements) {
  Mesh m = generate_disk_mesh(1.0, 1.5, 3.0, 16);
  for (int i = 0; i < refinements; ++i)
    m = refine_uniform(m);
  return m;
}

CoulombField dipole(const Mesh &m) {
  ChargeSystem s;
  s.charges = {{{0.3, 0.1, 0}, 1.0, 0.0}, {{-0.35, -0.2, 0}, -1.0, 0.0}};
  return CoulombField(s, 1.0, m.diameter());
}

PBEProblem problem() {
  PBEProblem p;
  p.species = {{0.5, 1}, {0.5, -1}};
  return p;
}

void BM_Stiffness(benchmark::State &state) {
  const Mesh m = disk(static_cast<int>(state.range(0)));
  const PBEProblem p = problem();
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_stiffness(m, p));
  state.SetItemsProcessed(state.iterations() * m.num_triangles());
}
BENCHMARK(BM_Stiffness)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_TwoTermRhs(benchmark::State &state) {
  const Mesh m = disk(static_cast<int>(state.range(0)));
  const CoulombField f = dipole(m);
  const PBEProblem p = problem();
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_two_term_rhs(m, f, p));
  state.SetItemsProcessed(state.iterations() * m.num_triangles());
}
BENCHMARK(BM_TwoTermRhs)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_Semilinear(benchmark::State &state) {
  const Mesh m = disk(static_cast<int>(state.range(0)));
  const CoulombField f = dipole(m);
  const PBEProblem p = problem();
  const SemilinearContext ctx = make_semilinear_context(m, p, &f);
  const std::vector<double> u(m.num_nodes(), 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_semilinear(ctx, u));
  state.SetItemsProcessed(state.iterations() * m.num_triangles());
}
BENCHMARK(BM_Semilinear)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State &state) {
  const Mesh m = disk(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(refine_uniform(m));
}
BENCHMARK(BM_Refine)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

} // namespace
