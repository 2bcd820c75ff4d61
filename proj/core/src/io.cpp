#include "deeprf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace deeprf {

using json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open for reading: " + path);
  return f;
}

/// Shortest decimal form that parses back to the same double.
std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json complex_vec_to_json(const std::vector<Complex>& v) {
  json arr = json::array();
  for (const auto& c : v) arr.push_back(json::array({c.real(), c.imag()}));
  return arr;
}

std::vector<Complex> complex_vec_from_json(const json& arr) {
  std::vector<Complex> v;
  v.reserve(arr.size());
  for (const auto& e : arr) v.emplace_back(e[0].get<double>(), e[1].get<double>());
  return v;
}

json spec_to_json(const DesignSpec& spec) {
  return json{{"nb", spec.nb},
              {"tbw", spec.tbw},
              {"passband_ripple", spec.passband_ripple},
              {"stopband_ripple", spec.stopband_ripple},
              {"band_gap", spec.band_gap},
              {"n_points", spec.n_points},
              {"peak_constraint_gauss", spec.peak_constraint_gauss},
              {"pulse_role",
               spec.pulse_role == PulseRole::kRefocusing ? "refocusing"
                                                         : "excitation"}};
}

}  // namespace

void write_pulse_csv(const std::string& path, const RfPulse& pulse) {
  if (!pulse.scaled()) throw UnscaledPulse();
  auto f = open_out(path);
  f << "# dwell_s=" << fmt(pulse.dwell_s) << "\n";
  f << "# gamma=" << fmt(pulse.gamma_hz_per_gauss) << "\n";
  f << "index,amplitude_gauss,phase_rad\n";
  const double to_gauss =
      1.0 / (2.0 * 3.14159265358979323846 * pulse.gamma_hz_per_gauss *
             pulse.dwell_s);
  for (int i = 0; i < pulse.n_points(); ++i) {
    const auto& s = pulse.samples[i];
    f << i << ',' << fmt(std::abs(s) * to_gauss) << ',' << fmt(std::arg(s))
      << "\n";
  }
}

RfPulse read_pulse_csv(const std::string& path) {
  auto f = open_in(path);
  RfPulse pulse;
  std::string line;
  double gamma = kDefaultGamma, dwell = 0.0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error("malformed header: " + line);
      const std::string key = line.substr(2, eq - 2);
      const double val = std::stod(line.substr(eq + 1));
      if (key == "dwell_s")
        dwell = val;
      else if (key == "gamma")
        gamma = val;
      continue;
    }
    if (line.rfind("index,", 0) == 0) continue;
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) throw Error("malformed row: " + line);
    if (!std::getline(row, cell, ',')) throw Error("malformed row: " + line);
    const double amp = std::stod(cell);
    if (!std::getline(row, cell, ',')) throw Error("malformed row: " + line);
    const double phase = std::stod(cell);
    pulse.samples.push_back(std::polar(amp, phase));
  }
  if (dwell <= 0.0) throw Error("pulse file missing dwell_s header");
  pulse.dwell_s = dwell;
  pulse.gamma_hz_per_gauss = gamma;
  // stored amplitudes are Gauss; convert back to nutation radians
  const double to_rad = 2.0 * 3.14159265358979323846 * gamma * dwell;
  for (auto& s : pulse.samples) s *= to_rad;
  return pulse;
}

void write_pattern(const std::string& path, const RootPattern& pattern) {
  auto f = open_out(path);
  for (auto b : pattern) f << (b ? '1' : '0');
  f << "\n";
}

RootPattern read_pattern(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw Error("empty pattern file: " + path);
  RootPattern pattern;
  for (char c : line) {
    if (c == '0')
      pattern.push_back(0);
    else if (c == '1')
      pattern.push_back(1);
    else if (c != '\r')
      throw Error("pattern file has a character other than 0/1");
  }
  return pattern;
}

void write_trace_csv(const std::string& path, const SearchOutcome& outcome,
                     const DesignSpec& spec) {
  auto f = open_out(path);
  f << "evaluation,best_peak_rad,best_duration_ms\n";
  for (const auto& pt : outcome.trace)
    f << pt.evaluation << ',' << fmt(pt.best_peak) << ','
      << fmt(duration_ms_at_peak(pt.best_peak, spec)) << "\n";
}

void write_root_csv(const std::string& path, const RootSet& root_set,
                    const RootPattern& pattern) {
  if (int(pattern.size()) != root_set.n_root())
    throw Error("pattern length does not match eligible root count");
  std::vector<int> slot_of(root_set.roots.size(), -1);
  for (int s = 0; s < root_set.n_root(); ++s)
    slot_of[root_set.eligible_indices[s]] = s;
  auto f = open_out(path);
  f << "index,re,im,eligible,flipped\n";
  for (std::size_t i = 0; i < root_set.roots.size(); ++i) {
    const int s = slot_of[i];
    Complex r = root_set.roots[i];
    const bool flipped = s >= 0 && pattern[s];
    if (flipped) r = flip_root(r);
    f << i << ',' << fmt(r.real()) << ',' << fmt(r.imag()) << ','
      << (s >= 0 ? 1 : 0) << ',' << (flipped ? 1 : 0) << "\n";
  }
}

std::string outcome_to_json(const SearchOutcome& outcome,
                            const DesignSpec& spec, const std::string& strategy,
                            std::uint64_t seed, bool include_wall_time) {
  std::string pattern;
  for (auto b : outcome.best_pattern) pattern.push_back(b ? '1' : '0');
  json j{{"strategy", strategy},
         {"seed", seed},
         {"best_pattern", pattern},
         {"best_peak_rad", outcome.best_peak},
         {"best_duration_ms", duration_ms_at_peak(outcome.best_peak, spec)},
         {"evaluations_used", outcome.evaluations_used},
         {"config", spec_to_json(spec)}};
  if (include_wall_time) j["wall_time_s"] = outcome.wall_time_s;
  json trace = json::array();
  for (const auto& pt : outcome.trace)
    trace.push_back(json::array({pt.evaluation, pt.best_peak}));
  j["trace"] = std::move(trace);
  return j.dump(2) + "\n";
}

void write_outcome_json(const std::string& path, const SearchOutcome& outcome,
                        const DesignSpec& spec, const std::string& strategy,
                        std::uint64_t seed) {
  open_out(path) << outcome_to_json(outcome, spec, strategy, seed);
}

void save_checkpoint(const std::string& path, const LoopCheckpoint& ckpt) {
  json j;
  j["version"] = 1;
  j["iteration"] = ckpt.iteration;
  j["rng_state"] = {ckpt.rng_state[0], ckpt.rng_state[1], ckpt.rng_state[2],
                    ckpt.rng_state[3]};

  const auto& net = ckpt.net;
  json jn;
  jn["layer_sizes"] = net.layer_sizes;
  jn["leaky_slope"] = net.leaky_slope;
  jn["adam_steps"] = net.adam_steps;
  jn["adam"] = {{"learning_rate", net.adam.learning_rate},
                {"beta1", net.adam.beta1},
                {"beta2", net.adam.beta2},
                {"epsilon", net.adam.epsilon}};
  jn["weights"] = net.weights;
  jn["biases"] = net.biases;
  jn["m_w"] = net.m_w;
  jn["v_w"] = net.v_w;
  jn["m_b"] = net.m_b;
  jn["v_b"] = net.v_b;
  j["network"] = std::move(jn);

  json jp;
  std::string pattern;
  for (auto b : ckpt.progress.best_pattern) pattern.push_back(b ? '1' : '0');
  jp["best_pattern"] = pattern;
  jp["best_peak"] = ckpt.progress.best_peak;
  jp["evaluations_used"] = ckpt.progress.evaluations_used;
  json trace = json::array();
  for (const auto& pt : ckpt.progress.trace)
    trace.push_back(json::array({pt.evaluation, pt.best_peak}));
  jp["trace"] = std::move(trace);
  j["progress"] = std::move(jp);

  json jb;
  jb["dwell_s"] = ckpt.baseline.dwell_s;
  jb["gamma"] = ckpt.baseline.gamma_hz_per_gauss;
  jb["samples"] = complex_vec_to_json(ckpt.baseline.samples);
  j["baseline"] = std::move(jb);

  std::string polished_bits;
  for (auto b : ckpt.polished) polished_bits.push_back(b ? '1' : '0');
  j["polished"] = polished_bits;

  // NaN marks "no episode yet"; JSON has no NaN literal, use null
  if (std::isnan(ckpt.reward_baseline))
    j["reward_baseline"] = nullptr;
  else
    j["reward_baseline"] = ckpt.reward_baseline;

  json jc = json::array();
  for (const auto& [pat, peak] : ckpt.cache) {
    std::string bits;
    for (auto b : pat) bits.push_back(b ? '1' : '0');
    jc.push_back(json::array({std::move(bits), peak}));
  }
  j["cache"] = std::move(jc);

  open_out(path) << j.dump() << "\n";
}

LoopCheckpoint load_checkpoint(const std::string& path) {
  json j;
  open_in(path) >> j;
  if (j.at("version").get<int>() != 1)
    throw Error("unknown checkpoint version");

  LoopCheckpoint ckpt;
  ckpt.iteration = j.at("iteration").get<std::int64_t>();
  for (int i = 0; i < 4; ++i)
    ckpt.rng_state[i] = j.at("rng_state")[i].get<std::uint64_t>();

  const auto& jn = j.at("network");
  auto& net = ckpt.net;
  net.layer_sizes = jn.at("layer_sizes").get<std::vector<int>>();
  net.leaky_slope = jn.at("leaky_slope").get<double>();
  net.adam_steps = jn.at("adam_steps").get<std::int64_t>();
  net.adam.learning_rate = jn.at("adam").at("learning_rate").get<double>();
  net.adam.beta1 = jn.at("adam").at("beta1").get<double>();
  net.adam.beta2 = jn.at("adam").at("beta2").get<double>();
  net.adam.epsilon = jn.at("adam").at("epsilon").get<double>();
  using Mat = std::vector<std::vector<double>>;
  net.weights = jn.at("weights").get<Mat>();
  net.biases = jn.at("biases").get<Mat>();
  net.m_w = jn.at("m_w").get<Mat>();
  net.v_w = jn.at("v_w").get<Mat>();
  net.m_b = jn.at("m_b").get<Mat>();
  net.v_b = jn.at("v_b").get<Mat>();

  const auto& jp = j.at("progress");
  for (char c : jp.at("best_pattern").get<std::string>())
    ckpt.progress.best_pattern.push_back(c == '1');
  ckpt.progress.best_peak = jp.at("best_peak").get<double>();
  ckpt.progress.evaluations_used =
      jp.at("evaluations_used").get<std::int64_t>();
  for (const auto& pt : jp.at("trace"))
    ckpt.progress.trace.push_back(
        {pt[0].get<std::int64_t>(), pt[1].get<double>()});

  const auto& jb = j.at("baseline");
  ckpt.baseline.dwell_s = jb.at("dwell_s").get<double>();
  ckpt.baseline.gamma_hz_per_gauss = jb.at("gamma").get<double>();
  ckpt.baseline.samples = complex_vec_from_json(jb.at("samples"));

  for (char c : j.at("polished").get<std::string>())
    ckpt.polished.push_back(c == '1');

  if (!j.at("reward_baseline").is_null())
    ckpt.reward_baseline = j.at("reward_baseline").get<double>();

  for (const auto& entry : j.at("cache")) {
    RootPattern pat;
    for (char c : entry[0].get<std::string>()) pat.push_back(c == '1');
    ckpt.cache.emplace(std::move(pat), entry[1].get<double>());
  }
  return ckpt;
}

}  // namespace deeprf
