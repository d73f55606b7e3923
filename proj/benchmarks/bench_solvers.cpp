#include <benchmark/benchmark.h>

#include "pbe/solver.hpp"

using namespace pbe;

namespace {

struct Fixture {
  Mesh mesh;
  CoulombField field;
  PBEProblem problem;

  explicit Fixture(int refinements, std::vector<IonSpecies> species = {{0.5, 1}, {0.5, -1}}) {
    mesh = generate_disk_mesh(1.0, 1.5, 3.0, 16);
    for (int i = 0; i < refinements; ++i)
      mesh = refine_uniform(mesh);
    ChargeSystem s;
    s.charges = {{{0.3, 0.1, 0}, 1.0, 0.0}, {{-0.35, -0.2, 0}, -1.0, 0.0}};
    field = CoulombField(s, 1.0, mesh.diameter());
    problem.species = std::move(species);
  }
};

const BoundarySpec kBc{BoundaryMode::RestrictedG, 0.0, 80.0, 2.0};

void BM_CG_Stiffness(benchmark::State &state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const Preconditioner pc = state.range(1) ? Preconditioner::Jacobi : Preconditioner::None;
  const SparseMatrix A = assemble_stiffness(fx.mesh, fx.problem);
  std::vector<std::pair<int, double>> bc;
  for (int i : fx.mesh.boundary_nodes)
    bc.emplace_back(i, 0.0);
  const AssembledSystem sys =
      apply_dirichlet(A, assemble_two_term_rhs(fx.mesh, fx.field, fx.problem), bc);
  int its = 0;
  for (auto _ : state) {
    std::vector<double> x(sys.rhs.size(), 0.0);
    its = cg_solve(sys.matrix, sys.rhs, x, 1e-10, 100000, pc).iterations;
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["cg_iterations"] = its;
  state.counters["unknowns"] = static_cast<double>(sys.rhs.size());
}
BENCHMARK(BM_CG_Stiffness)
    ->ArgsProduct({{0, 1, 2, 3}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_HarmonicComponent(benchmark::State &state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_uH(fx.mesh, fx.field));
}
BENCHMARK(BM_HarmonicComponent)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_LGPBE(benchmark::State &state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_lgpbe(fx.problem, fx.mesh, fx.field, Splitting::TwoTerm, kBc));
}
BENCHMARK(BM_LGPBE)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_GPBE_Newton(benchmark::State &state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  const Splitting s = state.range(1) ? Splitting::ThreeTerm : Splitting::TwoTerm;
  int its = 0;
  for (auto _ : state) {
    const SplitSolution sol = solve_gpbe_regular(fx.problem, fx.mesh, fx.field, s, kBc);
    its = sol.report.newton_iterations;
    benchmark::DoNotOptimize(sol.u.values.data());
  }
  state.counters["newton_iterations"] = its;
}
BENCHMARK(BM_GPBE_Newton)->ArgsProduct({{0, 1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GPBE_CellModel(benchmark::State &state) {
  const Fixture fx(static_cast<int>(state.range(0)), {{1.0, 1}});
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_gpbe_regular(fx.problem, fx.mesh, fx.field, Splitting::TwoTerm, kBc));
}
BENCHMARK(BM_GPBE_CellModel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

} // namespace
