#include <benchmark/benchmark.h>

#include <random>

#include "sbppml/diagnostics.hpp"
#include "sbppml/pml.hpp"
#include "sbppml/rk4.hpp"

using namespace sbppml;

namespace {

StackedField random_field(std::size_t nx, std::size_t ny) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StackedField f(nx, ny);
  for (double& v : f.values) v = u(rng);
  return f;
}

Discretization cavity(std::size_t n, int order) {
  const auto g = Grid2D::from_counts(-60.0, 60.0, n, -50.0, 50.0, n);
  return Discretization(g, order, DampingProfile::make(g, 50.0, 10.0, 1.84), {}, {2.0, 2.0, 0.0, 0.0});
}

void BM_ApplyDerivative(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  const Axis axis = state.range(2) == 0 ? Axis::X : Axis::Y;
  const auto op = SbpOperator1D::build(order, n, 1.0);
  const auto u = random_field(n, n);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    apply_derivative_into(op, u.values, n, n, axis, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.size()));
}
BENCHMARK(BM_ApplyDerivative)->ArgsProduct({{121, 401}, {2, 4, 6}, {0, 1}});

void BM_EvaluateRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kind = static_cast<ModelKind>(state.range(1));
  const auto d = cavity(n, 4);
  const ModelSpec spec{kind, 1.0};
  FieldState u = FieldState::zeros(field_model(kind), n, n);
  for (std::size_t c = 0; c < u.component_count(); ++c) u.component(c) = random_field(n, n);
  FieldState out;
  RhsWorkspace ws;
  for (auto _ : state) {
    evaluate_rhs_into(spec, u, d, 0.0, out, ws);
    benchmark::DoNotOptimize(out.ez.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_EvaluateRhs)
    ->ArgsProduct({{121, 401},
                   {static_cast<int>(ModelKind::Interior), static_cast<int>(ModelKind::ModalUnsplit),
                    static_cast<int>(ModelKind::PhysicallyMotivated),
                    static_cast<int>(ModelKind::SplitFieldStable)}});

void BM_Rk4Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = cavity(n, 4);
  const ModelSpec spec{ModelKind::ModalUnsplit, 1.0};
  FieldState u = FieldState::zeros(FieldModel::ModalUnsplit, n, n);
  u.ez = random_field(n, n);
  u.scale(1e-3);
  RhsWorkspace ws;
  Rk4Workspace<FieldState> rk;
  auto rhs = [&](double t, const FieldState& s, FieldState& o) { evaluate_rhs_into(spec, s, d, t, o, ws); };
  double t = 0.0;
  for (auto _ : state) {
    rk4_step(rhs, u, t, 0.01, rk);
    t += 0.01;
  }
}
BENCHMARK(BM_Rk4Step)->Arg(121);

}  // namespace

BENCHMARK_MAIN();
