#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "deeprf/rng.hpp"
#include "deeprf/search.hpp"

namespace deeprf {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update over a flat parameter block. `step` is the
/// 1-based step counter value for this update; m and v are the running
/// first/second moments, updated in place.
void adam_step(std::span<double> params, std::span<const double> grads,
               std::span<double> m, std::span<double> v, std::int64_t step,
               const AdamConfig& cfg);

/// Fully-connected policy net: leaky-ReLU hidden layers, softmax output
/// over flip actions. Parameters, Adam moments, and the step counter live
/// in flat per-tensor vectors so checkpoints are plain arrays.
struct PolicyNetwork {
  std::vector<int> layer_sizes;  // [input, hidden..., n_actions]
  std::vector<std::vector<double>> weights;  // per layer, row-major out x in
  std::vector<std::vector<double>> biases;
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;  // Adam moments
  std::int64_t adam_steps = 0;
  double leaky_slope = 0.3;
  AdamConfig adam;

  int n_layers() const { return int(weights.size()); }
  int n_inputs() const { return layer_sizes.front(); }
  int n_actions() const { return layer_sizes.back(); }
  std::int64_t n_params() const;

  /// Scaled-uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static PolicyNetwork create(std::vector<int> sizes, Rng& rng);
  /// The standard shape: n_points inputs, 7 hidden layers of 256, n_root
  /// actions.
  static PolicyNetwork standard(int n_points, int n_root, Rng& rng);

  std::vector<double> flatten() const;       // [W1,b1,W2,b2,...]
  void unflatten(std::span<const double> p); // inverse of flatten
};

/// Action distribution for a state. Masked actions get probability exactly
/// 0, the rest renormalize; throws AllMasked if nothing is available.
std::vector<double> forward(const PolicyNetwork& net,
                            std::span<const double> state,
                            const std::vector<std::uint8_t>& mask);

/// Categorical sample from a probability vector.
int sample_action(std::span<const double> probs, Rng& rng);

struct EpisodeRecord {
  std::vector<std::vector<double>> states;  // input to each step's forward
  std::vector<int> actions;                 // pairwise distinct
  std::vector<double> log_probs;            // of the taken actions
  std::vector<double> peaks;                // peak after each flip, radians
  std::vector<RootPattern> patterns;        // cumulative pattern per step
  double reward = 0.0;                      // 1 / min(peaks)
};

struct EpisodeOptions {
  /// Divide amplitude states by the minimum-phase peak so the first state
  /// has max 1.
  bool normalize_state = true;
};

/// One rollout: n_root sequential flips without repetition, starting from
/// the minimum-phase pulse amplitude. `baseline` is the all-zero pattern's
/// pulse (evaluated once by the caller); every step costs one evaluation.
EpisodeRecord run_episode(const PolicyNetwork& net, Evaluator& ev,
                          const RfPulse& baseline, Rng& rng,
                          const EpisodeOptions& opts = {});

/// Gradient of the REINFORCE loss -reward * sum_t log pi(a_t | s_t), in
/// flatten() layout.
std::vector<double> policy_gradient(const PolicyNetwork& net,
                                    const EpisodeRecord& episode);

/// The differentiated scalar, recomputable from states/actions alone (for
/// finite-difference checks).
double episode_loss(const PolicyNetwork& net, const EpisodeRecord& episode);

/// policy_gradient + one Adam step. Throws NonFinite if any parameter
/// leaves the finite range. `advantage` replaces the episode reward as the
/// gradient weight when finite (reward-baseline subtraction); by default
/// the raw reward is used.
void reinforce_update(
    PolicyNetwork& net, const EpisodeRecord& episode,
    double advantage = std::numeric_limits<double>::quiet_NaN());

struct LoopCheckpoint {
  PolicyNetwork net;
  std::array<std::uint64_t, 4> rng_state{};
  SearchOutcome progress;    // evaluator snapshot at the iteration boundary
  std::int64_t iteration = 0;
  RfPulse baseline;          // min-phase pulse (skips re-evaluating it)
  /// Memoization cache; restoring it keeps resumed runs evaluation-count
  /// identical to uninterrupted ones.
  std::map<RootPattern, double> cache;
  /// Running reward baseline (NaN until the first episode).
  double reward_baseline = std::numeric_limits<double>::quiet_NaN();
  /// Incumbent the loop last deep-polished (empty = none yet).
  RootPattern polished;
  /// Evaluation count at the last stall-triggered policy restart.
  std::int64_t last_restart_eval = 0;
};

struct DeepRfOptions {
  bool greedy_enabled = true;
  /// Neighborhood depth for the greedy phase; 1 is the plain Hamming-1
  /// descent (see greedy_tree_search).
  int greedy_flip_depth = 1;
  /// Each time the overall best pattern changes, continue the descent from
  /// it once at this depth (2 = sweep bit pairs on stall). The single-flip
  /// basins here often stop two flips short of a better one; polishing only
  /// the incumbent fixes that without redirecting the rest of the search.
  /// 0 or 1 disables.
  int incumbent_polish_depth = 2;
  /// Fraction of the budget reserved for the endgame: once the remaining
  /// budget drops below this share, episodes stop and the best distinct
  /// patterns seen so far (ascending peak, from the memoization cache) get
  /// the deep polish. A near-incumbent local optimum can sit one pair flip
  /// from a pattern better than the incumbent itself; doing this sweep only
  /// at the end leaves the explorative trajectory untouched. Requires
  /// memoize; 0 disables.
  double endgame_frac = 0.125;
  /// Endgame candidates worse than incumbent * margin are skipped.
  double polish_margin = 1.01;
  /// Re-initialize the policy network (fresh draw from the run's RNG
  /// stream) when the incumbent has not improved for this many
  /// evaluations. The learning rate is small enough that a policy mostly
  /// keeps its initial exploration bias for a whole run; restarting on
  /// stall gives the run several independent exploration phases instead of
  /// one. 0 disables.
  std::int64_t stall_restart_evals = 2500;
  /// Skip re-evaluating repeated patterns in the greedy layers. Episode
  /// steps always count. Saves most of the budget once the policy has
  /// converged; turned off in reproduction mode.
  bool memoize = true;
  /// Weight policy updates by reward minus a running-average baseline
  /// instead of the raw reward. Rewards here differ by a fraction of a
  /// percent between episodes, so without the baseline every update pushes
  /// in nearly the same direction regardless of episode quality; turned off
  /// in reproduction mode.
  bool baseline_subtraction = true;
  /// Smoothing factor of the running reward average.
  double baseline_ema = 0.25;
  /// Adam learning rate for fresh runs (resumed runs keep the checkpoint's).
  double learning_rate = 1e-4;
  EpisodeOptions episode;
  /// Write a checkpoint after this iteration completes (0 = never).
  int checkpoint_after_iteration = 0;
  std::string checkpoint_path;
  /// Resume from a saved checkpoint instead of starting fresh.
  const LoopCheckpoint* resume = nullptr;
};

/// The full alternation: episode -> policy update -> greedy descent from
/// the episode's best pattern, repeated until the evaluation budget is
/// spent (phases in progress complete). Deterministic given (seed, ctx,
/// budget).
SearchOutcome deeprf_slr_loop(const ProblemContext& ctx,
                              std::int64_t flip_budget, std::uint64_t seed,
                              const DeepRfOptions& opts = {});

}  // namespace deeprf
