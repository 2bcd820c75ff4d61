#pragma once

#include <cstdint>
#include <limits>
#include <map>

#include "deeprf/rng.hpp"
#include "deeprf/roots.hpp"

namespace deeprf {

struct TracePoint {
  std::int64_t evaluation = 0;  // 1-based evaluation count at improvement
  double best_peak = 0.0;       // incumbent peak, radians
};

struct SearchOutcome {
  RootPattern best_pattern;
  double best_peak = std::numeric_limits<double>::infinity();
  std::int64_t evaluations_used = 0;
  std::vector<TracePoint> trace;  // best_peak strictly decreasing
  double wall_time_s = 0.0;
};

struct SearchOptions {
  int exhaustive_cap = 20;  // exhaustive_search refuses larger N_root
  bool descending = false;  // enumerate patterns high-to-low (order oracle)
  bool memoize = false;     // cache repeated patterns (off: every call counts)
};

/// Budgeted objective shared by every strategy: counts pattern_to_pulse
/// calls, tracks the incumbent, and records a trace point at each
/// improvement. A negative budget means unlimited. With memoization on,
/// cache hits cost nothing and do not advance the count.
class Evaluator {
 public:
  Evaluator(const ProblemContext& ctx, std::int64_t budget,
            bool memoize = false)
      : ctx_(&ctx), budget_(budget), memoize_(memoize) {}

  bool budget_left() const {
    return budget_ < 0 || outcome_.evaluations_used < budget_;
  }
  std::int64_t used() const { return outcome_.evaluations_used; }

  /// Evaluates the pattern's peak nutation. Throws Error if called with the
  /// budget exhausted (strategies must check budget_left first).
  double evaluate(const RootPattern& pattern);

  /// Same accounting, but returns the synthesized pulse as well (episode
  /// rollouts need the amplitude waveform as the next state). Bypasses the
  /// memoization cache.
  PatternResult evaluate_full(const RootPattern& pattern);

  /// Folds an externally evaluated (pattern, peak) into the incumbent
  /// without spending budget — used when a strategy starts from a point
  /// whose objective another evaluator already paid for.
  void seed_incumbent(const RootPattern& pattern, double peak) {
    if (peak < outcome_.best_peak) {
      outcome_.best_peak = peak;
      outcome_.best_pattern = pattern;
      outcome_.trace.push_back({outcome_.evaluations_used, peak});
    }
  }

  /// Snapshot of the best-so-far state. wall_time_s is left at 0; the
  /// strategy fills it in.
  SearchOutcome outcome() const { return outcome_; }

  /// Restores a snapshot (checkpoint resume). With memoization on, restore
  /// the cache as well or the resumed run's evaluation count will drift.
  void restore(const SearchOutcome& snapshot) { outcome_ = snapshot; }

  const std::map<RootPattern, double>& cache() const { return cache_; }
  void restore_cache(std::map<RootPattern, double> cache) {
    cache_ = std::move(cache);
  }

  const ProblemContext& ctx() const { return *ctx_; }

 private:
  const ProblemContext* ctx_;
  std::int64_t budget_;
  bool memoize_;
  SearchOutcome outcome_;
  std::map<RootPattern, double> cache_;
};

/// Evaluates all 2^N_root patterns in ascending (or descending) integer
/// order, bit s = eligible slot s. Throws TooLarge beyond the cap.
SearchOutcome exhaustive_search(const ProblemContext& ctx,
                                const SearchOptions& opts = {});

/// Random search: trial 0 is the all-zero (minimum-phase) baseline, trials
/// 1..budget-1 draw independent uniform patterns with no duplicate
/// suppression. budget = 0 still evaluates the baseline once.
SearchOutcome monte_carlo_search(const ProblemContext& ctx,
                                 std::int64_t budget, std::uint64_t seed,
                                 const SearchOptions& opts = {});

/// Layered best-improvement descent over Hamming-1 neighborhoods, ties
/// broken by lowest neighbor index; stops at a local optimum or when the
/// budget runs out. Pass the start's peak if already known (NaN = evaluate
/// it first, costing one evaluation). With max_flip_depth = 2 a stalled
/// descent sweeps two-bit moves before giving up and resumes single-bit
/// layers on any improvement. The returned outcome reflects the
/// evaluator's global best, which may predate `start`; the descent's own
/// resting point is reported through `terminal`/`terminal_peak` when
/// non-null (it may differ from the global best).
SearchOutcome greedy_tree_search(
    const RootPattern& start, Evaluator& ev,
    double start_peak = std::numeric_limits<double>::quiet_NaN(),
    int max_flip_depth = 1, RootPattern* terminal = nullptr,
    double* terminal_peak = nullptr);

/// Convenience wrapper owning its evaluator.
SearchOutcome greedy_tree_search(const RootPattern& start,
                                 const ProblemContext& ctx,
                                 std::int64_t budget_remaining);

}  // namespace deeprf
