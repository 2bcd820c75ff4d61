#pragma once

#include <string>

#include "deeprf/policy.hpp"
#include "deeprf/search.hpp"

namespace deeprf {

/// Pulse CSV: `# dwell_s=` / `# gamma=` header lines, then
/// `index,amplitude_gauss,phase_rad` rows at full double precision.
/// Requires a scaled pulse (throws UnscaledPulse).
void write_pulse_csv(const std::string& path, const RfPulse& pulse);
RfPulse read_pulse_csv(const std::string& path);

/// One line of 0/1 characters, length N_root.
void write_pattern(const std::string& path, const RootPattern& pattern);
RootPattern read_pattern(const std::string& path);

/// `evaluation,best_peak_rad,best_duration_ms`; durations use the spec's
/// peak constraint.
void write_trace_csv(const std::string& path, const SearchOutcome& outcome,
                     const DesignSpec& spec);

/// Root dump: `index,re,im,eligible,flipped` for every root.
void write_root_csv(const std::string& path, const RootSet& root_set,
                    const RootPattern& pattern);

/// Outcome JSON: pattern string, peak, duration, evaluations, wall time,
/// seed, and the full design spec embedded under "config". Key order and
/// float formatting are deterministic, so identical runs give identical
/// bytes apart from the wall_time_s field; pass include_wall_time = false
/// to drop it for byte-level replay comparisons.
std::string outcome_to_json(const SearchOutcome& outcome,
                            const DesignSpec& spec, const std::string& strategy,
                            std::uint64_t seed, bool include_wall_time = true);
void write_outcome_json(const std::string& path, const SearchOutcome& outcome,
                        const DesignSpec& spec, const std::string& strategy,
                        std::uint64_t seed);

/// Checkpoint: network parameters, Adam state, RNG words, evaluator
/// snapshot, iteration counter, baseline pulse. Doubles round-trip exactly,
/// so resuming reproduces the uninterrupted run bit for bit.
void save_checkpoint(const std::string& path, const LoopCheckpoint& ckpt);
LoopCheckpoint load_checkpoint(const std::string& path);

}  // namespace deeprf
