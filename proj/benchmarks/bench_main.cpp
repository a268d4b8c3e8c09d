#include <benchmark/benchmark.h>

#include <nbspectra/nbspectra.hpp>

using namespace nbspectra;

namespace {

std::shared_ptr<const Graph> load(const char* name) {
  return std::make_shared<const Graph>(
      load_graph(std::string(NBSPECTRA_DATA_DIR) + "/" + name + ".nbg"));
}

void BM_NbSpectrumCompanion(benchmark::State& st) {
  const auto g = load("p122");
  const Graph lift = random_lift(*g, static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(nb_spectrum_finite(lift));
  st.SetLabel(std::to_string(2 * lift.n_vertices()) + "x companion");
}
BENCHMARK(BM_NbSpectrumCompanion)->Arg(5)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_NbSpectrumDirect(benchmark::State& st) {
  const auto g = load("p122");
  const Graph lift = random_lift(*g, static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(nb_spectrum_direct(lift));
}
BENCHMARK(BM_NbSpectrumDirect)->Arg(5)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_VerifyBass(benchmark::State& st) {
  const auto g = load("petersen");
  for (auto _ : st) benchmark::DoNotOptimize(verify_bass(*g, 20, 1));
}
BENCHMARK(BM_VerifyBass)->Unit(benchmark::kMillisecond);

void BM_TreeBall(benchmark::State& st) {
  const auto g = load("p122");
  for (auto _ : st) benchmark::DoNotOptimize(tree_ball(*g, 0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_TreeBall)->Arg(8)->Arg(14);

void BM_Alpha(benchmark::State& st) {
  const auto g = load("petersen");
  const auto M = make_family(g, OperatorKind::QLambda).evaluate({1.1, 0.9});
  const auto r = RatioAssignment::constant(g->n_directed(), 1.0 / cplx(1.1, 0.9));
  for (auto _ : st) benchmark::DoNotOptimize(alpha(r, M));
}
BENCHMARK(BM_Alpha);

void BM_FixedPoint(benchmark::State& st) {
  const auto g = load("p122");
  const auto M = make_family(g, OperatorKind::QLambda).evaluate({1.6, 0.4});
  for (auto _ : st) benchmark::DoNotOptimize(fixed_point_solve(M, std::nullopt));
}
BENCHMARK(BM_FixedPoint);

void BM_NewtonMultistart(benchmark::State& st) {
  const auto g = load("p122");
  const auto M = make_family(g, OperatorKind::QLambda).evaluate({0.9, 0.7});
  for (auto _ : st)
    benchmark::DoNotOptimize(newton_multistart(M, static_cast<int>(st.range(0)), 3));
}
BENCHMARK(BM_NewtonMultistart)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

// Membership inside the two-dimensional region, where every stage runs.
void BM_MembershipInside(benchmark::State& st) {
  const OperatorFamily f(load("p122"), OperatorKind::QLambda);
  for (auto _ : st) benchmark::DoNotOptimize(membership(f, {0.2, 1.15}));
}
BENCHMARK(BM_MembershipInside)->Unit(benchmark::kMillisecond);

void BM_MembershipOutside(benchmark::State& st) {
  const OperatorFamily f(load("p122"), OperatorKind::QLambda);
  for (auto _ : st) benchmark::DoNotOptimize(membership(f, {1.2, 0.5}));
}
BENCHMARK(BM_MembershipOutside)->Unit(benchmark::kMillisecond);

void BM_ScanP122(benchmark::State& st) {
  const OperatorFamily f(load("p122"), OperatorKind::QLambda);
  ScanOptions o;
  o.region = {-1.5, 1.5, -1.5, 1.5};
  o.n_re = o.n_im = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(scan(f, o));
}
BENCHMARK(BM_ScanP122)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
