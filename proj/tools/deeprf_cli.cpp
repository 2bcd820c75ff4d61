// Batch front end: design multiband refocusing pulses, sweep design
// parameters, and verify designed pulses against the Bloch simulator.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure,
// 4 budget/resource cap exceeded.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "deeprf/bloch.hpp"
#include "deeprf/io.hpp"
#include "deeprf/policy.hpp"
#include "deeprf/search.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace deeprf;

namespace {

struct RunConfig {
  DesignSpec spec;
  std::string strategy = "deeprf";
  std::int64_t budget = 500000;
  std::uint64_t seed = 1;
  bool greedy_enabled = true;
  bool normalize_state = true;
  bool memoize = false;  // MC / explicit deeprf override
  /// Paper-faithful minimal loop: no memoization, no reward baseline.
  bool reproduction_mode = false;
  double learning_rate = 1e-4;
  std::string out_dir = "out";
  std::string checkpoint_path;
  int checkpoint_after_iteration = 0;
  std::string resume_from;
};

void apply_json_config(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  f >> j;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
  };
  get("nb", cfg.spec.nb);
  get("tbw", cfg.spec.tbw);
  get("passband_ripple", cfg.spec.passband_ripple);
  get("stopband_ripple", cfg.spec.stopband_ripple);
  get("band_gap", cfg.spec.band_gap);
  get("n_points", cfg.spec.n_points);
  get("peak_constraint_gauss", cfg.spec.peak_constraint_gauss);
  get("strategy", cfg.strategy);
  get("budget", cfg.budget);
  get("seed", cfg.seed);
  get("greedy_enabled", cfg.greedy_enabled);
  get("normalize_state", cfg.normalize_state);
  get("memoize", cfg.memoize);
  get("reproduction_mode", cfg.reproduction_mode);
  get("learning_rate", cfg.learning_rate);
  get("out_dir", cfg.out_dir);
}

// CLI flags > config file > defaults; the config file is applied first and
// CLI11 then overwrites whatever was given explicitly.
void add_common_options(CLI::App* cmd, RunConfig& cfg,
                        std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--nb", cfg.spec.nb, "number of bands");
  cmd->add_option("--tbw", cfg.spec.tbw, "time-bandwidth product");
  cmd->add_option("--band-gap", cfg.spec.band_gap,
                  "band spacing in slice thicknesses");
  cmd->add_option("--n-points", cfg.spec.n_points, "pulse samples");
  cmd->add_option("--passband-ripple", cfg.spec.passband_ripple);
  cmd->add_option("--stopband-ripple", cfg.spec.stopband_ripple);
  cmd->add_option("--peak", cfg.spec.peak_constraint_gauss,
                  "peak B1 constraint in Gauss");
  cmd->add_option("--out-dir", cfg.out_dir, "output directory");
  cmd->add_flag_callback(
      "--ci-profile",
      [&cfg] {
        cfg.spec.n_points = 256;
        cfg.spec.nb = 2;
        cfg.spec.tbw = 4.0;
        cfg.budget = std::min<std::int64_t>(cfg.budget, 5000);
      },
      "reduced problem for minutes-scale runs");
}

void finalize_config(RunConfig& cfg, const std::string& config_path,
                     CLI::App* cmd) {
  if (!config_path.empty()) {
    // re-apply CLI values on top of the file: remember what was set
    RunConfig file_cfg = cfg;
    apply_json_config(file_cfg, config_path);
    auto keep = [&](const char* flag, auto member) {
      if (cmd->count(flag) == 0) cfg.*member = file_cfg.*member;
    };
    if (cmd->count("--nb") == 0) cfg.spec.nb = file_cfg.spec.nb;
    if (cmd->count("--tbw") == 0) cfg.spec.tbw = file_cfg.spec.tbw;
    if (cmd->count("--band-gap") == 0) cfg.spec.band_gap = file_cfg.spec.band_gap;
    if (cmd->count("--n-points") == 0) cfg.spec.n_points = file_cfg.spec.n_points;
    if (cmd->count("--passband-ripple") == 0)
      cfg.spec.passband_ripple = file_cfg.spec.passband_ripple;
    if (cmd->count("--stopband-ripple") == 0)
      cfg.spec.stopband_ripple = file_cfg.spec.stopband_ripple;
    if (cmd->count("--peak") == 0)
      cfg.spec.peak_constraint_gauss = file_cfg.spec.peak_constraint_gauss;
    if (cmd->count("--out-dir") == 0) cfg.out_dir = file_cfg.out_dir;
    keep("--strategy", &RunConfig::strategy);
    keep("--budget", &RunConfig::budget);
    keep("--seed", &RunConfig::seed);
    keep("--learning-rate", &RunConfig::learning_rate);
    auto flag_given = [&](const char* name) {
      const auto* opt = cmd->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (!flag_given("--no-greedy"))
      cfg.greedy_enabled = file_cfg.greedy_enabled;
    if (!flag_given("--no-normalize"))
      cfg.normalize_state = file_cfg.normalize_state;
    if (!flag_given("--memoize")) cfg.memoize = file_cfg.memoize;
    if (!flag_given("--reproduction-mode"))
      cfg.reproduction_mode = file_cfg.reproduction_mode;
  }
  if (const char* env = std::getenv("DEEPRF_OUT_DIR")) cfg.out_dir = env;
  cfg.spec.validate();
}

SearchOutcome run_strategy(const RunConfig& cfg, const ProblemContext& ctx) {
  SearchOptions sopts;
  sopts.memoize = cfg.memoize;
  if (cfg.strategy == "exhaustive") return exhaustive_search(ctx, sopts);
  if (cfg.strategy == "mc")
    return monte_carlo_search(ctx, cfg.budget, cfg.seed, sopts);
  if (cfg.strategy == "greedy")
    return greedy_tree_search(RootPattern(ctx.root_set.n_root(), 0), ctx,
                              cfg.budget);
  if (cfg.strategy == "deeprf") {
    DeepRfOptions opts;
    opts.greedy_enabled = cfg.greedy_enabled;
    // reproduction mode strips the engineering improvements; --memoize can
    // still switch the cache back on explicitly
    opts.memoize = cfg.reproduction_mode ? cfg.memoize : true;
    opts.baseline_subtraction = !cfg.reproduction_mode;
    if (cfg.reproduction_mode) opts.incumbent_polish_depth = 1;
    opts.learning_rate = cfg.learning_rate;
    opts.episode.normalize_state = cfg.normalize_state;
    opts.checkpoint_path = cfg.checkpoint_path;
    opts.checkpoint_after_iteration = cfg.checkpoint_after_iteration;
    LoopCheckpoint resume;
    if (!cfg.resume_from.empty()) {
      resume = load_checkpoint(cfg.resume_from);
      opts.resume = &resume;
    }
    return deeprf_slr_loop(ctx, cfg.budget, cfg.seed, opts);
  }
  throw CLI::ValidationError("--strategy", "unknown strategy " + cfg.strategy);
}

void write_artifacts(const RunConfig& cfg, const ProblemContext& ctx,
                     const SearchOutcome& outcome) {
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  auto result = ctx.pattern_to_pulse(outcome.best_pattern);
  RfPulse pulse = result.pulse;
  scale_to_peak(pulse, ctx.spec);
  write_pulse_csv((dir / "pulse.csv").string(), pulse);
  write_pattern((dir / "pattern.txt").string(), outcome.best_pattern);
  write_trace_csv((dir / "trace.csv").string(), outcome, ctx.spec);
  write_root_csv((dir / "roots.csv").string(), ctx.root_set,
                 outcome.best_pattern);
  write_outcome_json((dir / "outcome.json").string(), outcome, ctx.spec,
                     cfg.strategy, cfg.seed);
}

int cmd_design(RunConfig& cfg) {
  auto ctx = ProblemContext::build(cfg.spec);
  auto outcome = run_strategy(cfg, ctx);
  write_artifacts(cfg, ctx, outcome);
  std::cout << "best peak " << outcome.best_peak << " rad, duration "
            << duration_ms_at_peak(outcome.best_peak, cfg.spec) << " ms, "
            << outcome.evaluations_used << " evaluations\n";
  return 0;
}

int cmd_sweep(RunConfig& cfg, const std::string& axis,
              std::vector<double>& values) {
  if (values.empty())
    throw CLI::ValidationError("--values", "axis values list is empty");
  fs::create_directories(cfg.out_dir);
  std::ofstream agg(fs::path(cfg.out_dir) / ("sweep_" + axis + ".csv"));
  agg << axis
      << ",deeprf_duration_ms,mc_duration_ms,duration_gain,status\n";
  for (double v : values) {
    DesignSpec spec = cfg.spec;
    if (axis == "tbw")
      spec.tbw = v;
    else if (axis == "band_gap")
      spec.band_gap = v;
    else if (axis == "peak")
      spec.peak_constraint_gauss = v;
    else
      throw CLI::ValidationError("--axis", "unknown axis " + axis);
    try {
      auto ctx = ProblemContext::build(spec);
      DeepRfOptions dopts;
      dopts.episode.normalize_state = cfg.normalize_state;
      auto deeprf = deeprf_slr_loop(ctx, cfg.budget, cfg.seed, dopts);
      auto mc = monte_carlo_search(ctx, cfg.budget, cfg.seed);
      const double d_rf = duration_ms_at_peak(deeprf.best_peak, spec);
      const double d_mc = duration_ms_at_peak(mc.best_peak, spec);
      agg << v << ',' << d_rf << ',' << d_mc << ',' << d_mc / d_rf
          << ",ok\n";
    } catch (const Error& e) {
      agg << v << ",,,,failed: " << e.what() << "\n";
    }
    agg.flush();
  }
  std::cout << "sweep written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_verify(RunConfig& cfg, const std::string& pulse_path) {
  auto ctx = ProblemContext::build(cfg.spec);
  RfPulse ref;
  if (!pulse_path.empty()) {
    ref = read_pulse_csv(pulse_path);
  } else {
    auto res = ctx.pattern_to_pulse(RootPattern(ctx.root_set.n_root(), 0));
    ref = res.pulse;
    scale_to_peak(ref, cfg.spec);
  }

  auto profile = refocusing_profile(ctx.b_min, default_grid_size(cfg.spec.n_points));
  auto [pass_dev, stop_max] = measure_ripples(profile, ctx.layout);

  // Bloch vs analytic on the echo profile
  SpinGrid grid = SpinGrid::standard(cfg.spec, ref);
  double max_dev = 0.0;
  for (double z : grid.positions_cm) {
    const double w = 2.0 * 3.14159265358979323846 * ref.gamma_hz_per_gauss *
                     grid.gradient_g_per_cm * z * ref.dwell_s;
    if (std::abs(w) > 3.14159265358979323846) continue;
    auto s = simulate_pulse(ref, grid.gradient_g_per_cm, z);
    // evaluate B exactly at w
    Complex bval(0.0);
    Complex zk(1.0);
    const Complex zstep = std::polar(1.0, -w);
    for (double c : ctx.b_min) {
      bval += c * zk;
      zk *= zstep;
    }
    // |b| of the simulated refocusing block vs |B|
    max_dev = std::max(max_dev, std::abs(std::norm(s.b) - std::norm(bval)));
  }

  const double ripple_bound = 1.25 * 2.0 * cfg.spec.passband_ripple;
  const bool pass = pass_dev <= ripple_bound &&
                    stop_max <= 1.25 * cfg.spec.stopband_ripple &&
                    max_dev <= 1e-3;
  json report{{"passband_profile_dev", pass_dev},
              {"stopband_profile_level", stop_max},
              {"bloch_vs_analytic_max_dev", max_dev},
              {"pass", pass}};
  fs::create_directories(cfg.out_dir);
  std::ofstream(fs::path(cfg.out_dir) / "verify.json") << report.dump(2)
                                                       << "\n";
  std::cout << report.dump(2) << "\n";
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiband refocusing pulse design via root flipping"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, axis = "tbw", pulse_path;
  std::vector<double> axis_values;

  auto* design = app.add_subcommand("design", "run one search strategy");
  add_common_options(design, cfg, config_path);
  design->add_option("--strategy", cfg.strategy,
                     "deeprf | mc | exhaustive | greedy");
  design->add_option("--budget", cfg.budget, "evaluation budget");
  design->add_option("--seed", cfg.seed, "RNG seed");
  design->add_option("--learning-rate", cfg.learning_rate);
  design->add_flag("!--no-greedy", cfg.greedy_enabled,
                   "disable the greedy descent phase");
  design->add_flag("!--no-normalize", cfg.normalize_state,
                   "disable state normalization");
  design->add_flag("--memoize", cfg.memoize);
  design->add_flag("--reproduction-mode", cfg.reproduction_mode,
                   "paper-faithful loop: no memoization or reward baseline");
  design->add_option("--checkpoint", cfg.checkpoint_path);
  design->add_option("--checkpoint-after", cfg.checkpoint_after_iteration);
  design->add_option("--resume", cfg.resume_from)->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "sweep a design axis");
  add_common_options(sweep, cfg, config_path);
  sweep->add_option("--strategy", cfg.strategy);
  sweep->add_option("--budget", cfg.budget);
  sweep->add_option("--seed", cfg.seed);
  sweep->add_option("--learning-rate", cfg.learning_rate);
  sweep->add_option("--axis", axis, "tbw | band_gap | peak");
  sweep->add_option("--values", axis_values, "axis values")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "check a pulse or design");
  add_common_options(verify, cfg, config_path);
  verify->add_option("--strategy", cfg.strategy);
  verify->add_option("--budget", cfg.budget);
  verify->add_option("--seed", cfg.seed);
  verify->add_option("--learning-rate", cfg.learning_rate);
  verify->add_option("--pulse", pulse_path, "pulse CSV to verify")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
    CLI::App* active = app.get_subcommands().front();
    finalize_config(cfg, config_path, active);
    if (design->parsed()) return cmd_design(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, axis, axis_values);
    if (verify->parsed()) return cmd_verify(cfg, pulse_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const TooLarge& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "resource_cap"}}.dump()
              << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "numerical"}}.dump()
              << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "validation"}}.dump()
              << "\n";
    return 2;
  }
  return 0;
}
