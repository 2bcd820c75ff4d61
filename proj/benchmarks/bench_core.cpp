#include <benchmark/benchmark.h>

#include "deeprf/bloch.hpp"
#include "deeprf/policy.hpp"
#include "deeprf/roots.hpp"
#include "deeprf/slr.hpp"

using namespace deeprf;

namespace {

DesignSpec toy_spec() {
  DesignSpec spec;
  spec.nb = 2;
  spec.tbw = 4.0;
  spec.band_gap = 6.0;
  spec.n_points = 256;
  return spec;
}

const ProblemContext& toy_ctx() {
  static const ProblemContext ctx = ProblemContext::build(toy_spec());
  return ctx;
}

DesignSpec full_spec() {
  DesignSpec spec;
  spec.nb = 3;
  spec.tbw = 6.0;
  spec.band_gap = 6.0;
  spec.n_points = 512;
  return spec;
}

const ProblemContext& full_ctx() {
  static const ProblemContext ctx = ProblemContext::build(full_spec());
  return ctx;
}

RfPulse random_pulse(int n, std::uint64_t seed) {
  Rng rng(seed);
  RfPulse p;
  for (int i = 0; i < n; ++i)
    p.samples.push_back(std::polar(0.05 * rng.uniform01(),
                                   rng.uniform_symmetric(3.0)));
  return p;
}

}  // namespace

// the inner loop of every search strategy: one pattern evaluation
static void BM_PatternEval(benchmark::State& state,
                           const ProblemContext& ctx) {
  Rng rng(7);
  const int n = ctx.root_set.n_root();
  RootPattern pattern(n, 0);
  for (auto _ : state) {
    state.PauseTiming();
    for (int s = 0; s < n; ++s)
      pattern[s] = std::uint8_t(rng.next_u64() & 1);
    state.ResumeTiming();
    benchmark::DoNotOptimize(ctx.pattern_to_pulse(pattern).peak);
  }
}
BENCHMARK_CAPTURE(BM_PatternEval, toy_n256, toy_ctx());
BENCHMARK_CAPTURE(BM_PatternEval, three_band_n512, full_ctx());

static void BM_ForwardSlr(benchmark::State& state) {
  const auto pulse = random_pulse(int(state.range(0)), 11);
  for (auto _ : state) benchmark::DoNotOptimize(forward_slr(pulse));
}
BENCHMARK(BM_ForwardSlr)->Arg(64)->Arg(256)->Arg(512);

static void BM_InverseSlr(benchmark::State& state) {
  const auto polys = forward_slr(random_pulse(int(state.range(0)), 13));
  for (auto _ : state) benchmark::DoNotOptimize(inverse_slr(polys));
}
BENCHMARK(BM_InverseSlr)->Arg(64)->Arg(256)->Arg(512);

static void BM_MinPhaseAlpha(benchmark::State& state) {
  const auto& ctx = full_ctx();
  std::vector<Complex> b(ctx.b_min.begin(), ctx.b_min.end());
  for (auto _ : state) benchmark::DoNotOptimize(min_phase_alpha(b));
}
BENCHMARK(BM_MinPhaseAlpha);

static void BM_PolicyForward(benchmark::State& state) {
  Rng rng(3);
  auto net = PolicyNetwork::standard(512, 18, rng);
  std::vector<double> input(512, 0.25);
  std::vector<std::uint8_t> mask(18, 0);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, input, mask));
}
BENCHMARK(BM_PolicyForward);

static void BM_BlochPosition(benchmark::State& state) {
  const auto& ctx = full_ctx();
  auto res = ctx.pattern_to_pulse(RootPattern(ctx.root_set.n_root(), 0));
  RfPulse pulse = res.pulse;
  scale_to_peak(pulse, ctx.spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_pulse(pulse, 0.2, 1.3));
}
BENCHMARK(BM_BlochPosition);

BENCHMARK_MAIN();
