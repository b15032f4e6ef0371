// Serial reference vs OpenMP batch for the ray integrations behind a frame.
#include <benchmark/benchmark.h>

#include "stokes_mutant/quantum.hpp"

using namespace sm;

namespace {

struct Batch {
  QuantumData q;
  std::vector<RayJob> jobs;
};

Batch make_batch(const CompleteIntersection& ci, int angles) {
  Batch b{QuantumData(ci), {}};
  const auto& C = b.q.exponents;
  double top = 0;
  for (int c = 0; c < C.size(); ++c) top = std::max(top, std::abs(C.value(c)));
  for (int c = 0; c < C.size(); ++c) {
    if (c == b.q.zero_index()) continue;
    const auto fs = formal_solution(b.q.U, b.q.mu, C.value(c), 20);
    for (int k = 0; k < angles; ++k) {
      RayJob j;
      j.theta = 0.1 + 2 * kPi * k / angles;
      j.r0 = 0.25;
      j.r1 = 10 * top;
      j.u = fs.u;
      j.w0 = fs.scaled(j.r0, j.theta);
      b.jobs.push_back(std::move(j));
    }
  }
  return b;
}

void run(benchmark::State& st, const CompleteIntersection& ci, Exec exec) {
  const Batch b = make_batch(ci, static_cast<int>(st.range(0)));
  const IntegratorConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_rays(b.q.U, b.q.mu, b.jobs, cfg, exec));
  st.counters["rays"] = static_cast<double>(b.jobs.size());
}

void BM_P3_serial(benchmark::State& st) { run(st, CompleteIntersection::projective(3), Exec::serial); }
void BM_P3_parallel(benchmark::State& st) { run(st, CompleteIntersection::projective(3), Exec::parallel); }
void BM_cubic_serial(benchmark::State& st) { run(st, {4, {3}}, Exec::serial); }
void BM_cubic_parallel(benchmark::State& st) { run(st, {4, {3}}, Exec::parallel); }

}  // namespace

BENCHMARK(BM_P3_serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_P3_parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cubic_serial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cubic_parallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
