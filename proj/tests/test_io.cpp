#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "deeprf/io.hpp"
#include "fixtures.hpp"

using namespace deeprf;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "deeprf_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RfPulse sample_pulse(std::uint64_t seed, int n = 48) {
  Rng rng(seed);
  RfPulse p;
  for (int i = 0; i < n; ++i)
    p.samples.push_back(std::polar(0.2 * rng.uniform01() + 1e-4,
                                   rng.uniform_symmetric(3.0)));
  p.dwell_s = 7.3e-6;
  return p;
}

}  // namespace

TEST_CASE("pulse CSV round trip preserves the waveform") {
  const auto path = temp_path("pulse.csv");
  auto p = sample_pulse(1);
  write_pulse_csv(path, p);
  auto q = read_pulse_csv(path);
  REQUIRE(q.n_points() == p.n_points());
  CHECK(q.dwell_s == p.dwell_s);
  CHECK(q.gamma_hz_per_gauss == p.gamma_hz_per_gauss);
  for (int i = 0; i < p.n_points(); ++i)
    CHECK(std::abs(q.samples[i] - p.samples[i]) <= 1e-12);
}

TEST_CASE("pulse CSV refuses unscaled pulses") {
  auto p = sample_pulse(2);
  p.dwell_s = 0.0;
  CHECK_THROWS_AS(write_pulse_csv(temp_path("unscaled.csv"), p),
                  UnscaledPulse);
}

TEST_CASE("pattern file round trip and validation") {
  const auto path = temp_path("pattern.txt");
  RootPattern p{1, 0, 0, 1, 1, 0, 1};
  write_pattern(path, p);
  CHECK(read_pattern(path) == p);

  std::ofstream(temp_path("bad.txt")) << "01012\n";
  CHECK_THROWS_AS(read_pattern(temp_path("bad.txt")), Error);
  std::ofstream(temp_path("empty.txt")) << "";
  CHECK_THROWS_AS(read_pattern(temp_path("empty.txt")), Error);
}

TEST_CASE("trace CSV lists one row per improvement") {
  SearchOutcome out;
  out.trace = {{1, 0.4}, {5, 0.3}, {17, 0.25}};
  DesignSpec spec;
  const auto path = temp_path("trace.csv");
  write_trace_csv(path, out, spec);
  const auto text = slurp(path);
  CHECK(text.rfind("evaluation,best_peak_rad,best_duration_ms\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("17,0.25,") != std::string::npos);
}

TEST_CASE("root CSV covers every root and marks the flipped ones") {
  const auto& ctx = deeprf::testing::toy_ctx();
  RootPattern p(ctx.root_set.n_root(), 0);
  p[0] = p[3] = 1;
  const auto path = temp_path("roots.csv");
  write_root_csv(path, ctx.root_set, p);
  const auto text = slurp(path);
  // header + one row per root
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        1 + std::ptrdiff_t(ctx.root_set.roots.size()));
  CHECK_THROWS_AS(
      write_root_csv(path, ctx.root_set, RootPattern(3, 0)), Error);
}

TEST_CASE("outcome JSON is byte-stable and wall time is excludable") {
  SearchOutcome out;
  out.best_pattern = {1, 0, 1};
  out.best_peak = 0.0625;
  out.evaluations_used = 123;
  out.trace = {{1, 0.08}, {7, 0.0625}};
  out.wall_time_s = 1.5;
  DesignSpec spec;
  const auto a = outcome_to_json(out, spec, "mc", 9);
  const auto b = outcome_to_json(out, spec, "mc", 9);
  CHECK(a == b);
  CHECK(a.find("wall_time_s") != std::string::npos);

  auto faster = out;
  faster.wall_time_s = 0.9;
  CHECK(outcome_to_json(out, spec, "mc", 9, false) ==
        outcome_to_json(faster, spec, "mc", 9, false));
  CHECK(outcome_to_json(out, spec, "mc", 9, false).find("wall_time_s") ==
        std::string::npos);
}

TEST_CASE("checkpoint round trip is exact") {
  Rng rng(77);
  auto net = PolicyNetwork::create({6, 5, 4}, rng);
  net.adam_steps = 3;
  net.m_w[0][2] = 0.123456789012345678;
  net.v_b[1][1] = 1e-17;

  LoopCheckpoint ckpt;
  ckpt.net = net;
  ckpt.rng_state = rng.state();
  ckpt.iteration = 11;
  ckpt.progress.best_pattern = {0, 1, 1, 0};
  ckpt.progress.best_peak = 0.07071067811865476;
  ckpt.progress.evaluations_used = 321;
  ckpt.progress.trace = {{2, 0.09}, {40, 0.07071067811865476}};
  ckpt.baseline = sample_pulse(5, 12);
  ckpt.cache[{0, 1, 1, 0}] = 0.07071067811865476;
  ckpt.cache[{1, 1, 1, 1}] = 0.25;

  const auto path = temp_path("ckpt.json");
  save_checkpoint(path, ckpt);
  auto back = load_checkpoint(path);

  CHECK(back.iteration == ckpt.iteration);
  CHECK(back.rng_state == ckpt.rng_state);
  CHECK(back.net.layer_sizes == net.layer_sizes);
  CHECK(back.net.adam_steps == net.adam_steps);
  CHECK(back.net.weights == net.weights);
  CHECK(back.net.biases == net.biases);
  CHECK(back.net.m_w == net.m_w);
  CHECK(back.net.v_w == net.v_w);
  CHECK(back.net.m_b == net.m_b);
  CHECK(back.net.v_b == net.v_b);
  CHECK(back.progress.best_pattern == ckpt.progress.best_pattern);
  CHECK(back.progress.best_peak == ckpt.progress.best_peak);
  CHECK(back.progress.evaluations_used == ckpt.progress.evaluations_used);
  REQUIRE(back.progress.trace.size() == ckpt.progress.trace.size());
  for (std::size_t i = 0; i < ckpt.progress.trace.size(); ++i) {
    CHECK(back.progress.trace[i].evaluation ==
          ckpt.progress.trace[i].evaluation);
    CHECK(back.progress.trace[i].best_peak ==
          ckpt.progress.trace[i].best_peak);
  }
  CHECK(back.baseline.dwell_s == ckpt.baseline.dwell_s);
  CHECK(back.baseline.samples == ckpt.baseline.samples);
  CHECK(back.cache == ckpt.cache);

  // saving the reloaded checkpoint reproduces the file byte for byte
  const auto path2 = temp_path("ckpt2.json");
  save_checkpoint(path2, back);
  CHECK(slurp(path2) == slurp(path));
}

TEST_CASE("missing files raise Error") {
  CHECK_THROWS_AS(read_pulse_csv(temp_path("nope.csv")), Error);
  CHECK_THROWS_AS(read_pattern(temp_path("nope.txt")), Error);
  CHECK_THROWS_AS(load_checkpoint(temp_path("nope.json")), Error);
}
