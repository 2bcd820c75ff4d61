#include "deeprf/search.hpp"

#include <chrono>
#include <cmath>

namespace deeprf {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

}  // namespace

double Evaluator::evaluate(const RootPattern& pattern) {
  if (memoize_) {
    auto it = cache_.find(pattern);
    if (it != cache_.end()) return it->second;
  }
  const double peak = evaluate_full(pattern).peak;
  if (memoize_) cache_.emplace(pattern, peak);
  return peak;
}

PatternResult Evaluator::evaluate_full(const RootPattern& pattern) {
  if (!budget_left()) throw Error("evaluation budget exhausted");
  PatternResult result = ctx_->pattern_to_pulse(pattern);
  ++outcome_.evaluations_used;
  if (memoize_) cache_.insert_or_assign(pattern, result.peak);
  if (result.peak < outcome_.best_peak) {
    outcome_.best_peak = result.peak;
    outcome_.best_pattern = pattern;
    outcome_.trace.push_back({outcome_.evaluations_used, result.peak});
  }
  return result;
}

SearchOutcome exhaustive_search(const ProblemContext& ctx,
                                const SearchOptions& opts) {
  const int n = ctx.root_set.n_root();
  if (n > opts.exhaustive_cap)
    throw TooLarge("2^" + std::to_string(n) +
                   " patterns exceed the exhaustive cap");
  Stopwatch timer;
  const std::uint64_t total = std::uint64_t(1) << n;
  Evaluator ev(ctx, -1);
  RootPattern pattern(n, 0);
  for (std::uint64_t i = 0; i < total; ++i) {
    const std::uint64_t mask = opts.descending ? total - 1 - i : i;
    for (int s = 0; s < n; ++s) pattern[s] = (mask >> s) & 1;
    ev.evaluate(pattern);
  }
  auto out = ev.outcome();
  out.wall_time_s = timer.seconds();
  return out;
}

SearchOutcome monte_carlo_search(const ProblemContext& ctx,
                                 std::int64_t budget, std::uint64_t seed,
                                 const SearchOptions& opts) {
  Stopwatch timer;
  const int n = ctx.root_set.n_root();
  Evaluator ev(ctx, std::max<std::int64_t>(budget, 1), opts.memoize);
  Rng rng(seed);
  RootPattern pattern(n, 0);
  ev.evaluate(pattern);  // trial 0: the minimum-phase baseline
  while (ev.budget_left()) {
    for (int s = 0; s < n; ++s) pattern[s] = std::uint8_t(rng.next_u64() & 1);
    ev.evaluate(pattern);
  }
  auto out = ev.outcome();
  out.wall_time_s = timer.seconds();
  return out;
}

SearchOutcome greedy_tree_search(const RootPattern& start, Evaluator& ev,
                                 double start_peak, int max_flip_depth,
                                 RootPattern* terminal,
                                 double* terminal_peak) {
  Stopwatch timer;
  const int n = int(start.size());
  RootPattern current = start;
  double current_peak = start_peak;
  if (std::isnan(current_peak)) {
    if (!ev.budget_left()) {
      if (terminal) *terminal = current;
      if (terminal_peak) *terminal_peak = current_peak;  // NaN: never ran
      auto out = ev.outcome();
      out.wall_time_s = timer.seconds();
      return out;
    }
    current_peak = ev.evaluate(current);
  } else {
    ev.seed_incumbent(current, current_peak);
  }

  bool improved = true;
  while (improved && ev.budget_left()) {
    improved = false;
    int best_flip = -1;
    double best_peak = current_peak;
    for (int s = 0; s < n && ev.budget_left(); ++s) {
      current[s] ^= 1;
      const double peak = ev.evaluate(current);
      current[s] ^= 1;
      if (peak < best_peak) {  // strict: ties keep the earlier choice
        best_peak = peak;
        best_flip = s;
      }
    }
    if (best_flip >= 0) {
      current[best_flip] ^= 1;
      current_peak = best_peak;
      improved = true;
      continue;
    }
    if (max_flip_depth < 2) break;
    // stalled: sweep two-bit moves; the first strict improvement (lowest
    // pair) resumes the single-bit descent
    for (int i = 0; i < n - 1 && !improved && ev.budget_left(); ++i)
      for (int j = i + 1; j < n && !improved && ev.budget_left(); ++j) {
        current[i] ^= 1;
        current[j] ^= 1;
        const double peak = ev.evaluate(current);
        if (peak < current_peak) {
          current_peak = peak;
          improved = true;
        } else {
          current[i] ^= 1;
          current[j] ^= 1;
        }
      }
    // still stalled: sweep conjugate quads {i, j, m(i), m(j)} — a pair
    // flip applied symmetrically to both half-planes. Neighboring basins
    // are often separated by exactly this move (the objective treats
    // mirror-related patterns alike), which no pair flip reaches without a
    // worse intermediate.
    const auto& mirror = ev.ctx().root_set.mirror_map;
    for (int i = 0; i < n - 1 && !improved && ev.budget_left(); ++i) {
      if (mirror[i] <= i) continue;  // lower member of a mirror pair only
      for (int j = i + 1; j < n && !improved && ev.budget_left(); ++j) {
        if (mirror[j] <= j || j == mirror[i]) continue;
        current[i] ^= 1;
        current[j] ^= 1;
        current[mirror[i]] ^= 1;
        current[mirror[j]] ^= 1;
        const double peak = ev.evaluate(current);
        if (peak < current_peak) {
          current_peak = peak;
          improved = true;
        } else {
          current[i] ^= 1;
          current[j] ^= 1;
          current[mirror[i]] ^= 1;
          current[mirror[j]] ^= 1;
        }
      }
    }
  }
  if (terminal) *terminal = current;
  if (terminal_peak) *terminal_peak = current_peak;
  auto out = ev.outcome();
  out.wall_time_s = timer.seconds();
  return out;
}

SearchOutcome greedy_tree_search(const RootPattern& start,
                                 const ProblemContext& ctx,
                                 std::int64_t budget_remaining) {
  Evaluator ev(ctx, budget_remaining);
  return greedy_tree_search(start, ev);
}

}  // namespace deeprf
