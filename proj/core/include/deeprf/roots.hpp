#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deeprf/multiband.hpp"
#include "deeprf/pulse.hpp"
#include "deeprf/slr.hpp"

namespace deeprf {

/// Binary flip decisions, one per eligible root (1 = flipped).
using RootPattern = std::vector<std::uint8_t>;

struct RootClassifyOptions {
  /// Angular eligibility window around each passband center, in band widths.
  double angular_window_bw = 3.0;
  /// Radial window on |1 - |r||: below the minimum a root is treated as a
  /// stopband zero pinned to the unit circle; above the maximum it is an
  /// inter-band artifact of the factorization. Both are excluded.
  double min_radial_offset = 5e-3;
  double max_radial_offset = 4e-2;
  /// Tolerance for pairing a root with its conjugate partner.
  double mirror_tol = 1e-6;
};

struct RootSet {
  std::vector<Complex> roots;        // all N-1 roots, sorted by angle
  std::vector<int> eligible_indices; // indices into roots
  std::vector<int> mirror_map;       // per eligible slot: slot of the
                                     // conjugate partner (self for real roots)
  double reference_max_b = 0.0;      // max grid |B| of the unflipped beta

  int n_root() const { return int(eligible_indices.size()); }
};

/// All roots of the polynomial sum_k b[k] y^k via the companion matrix
/// (reversed when that improves conditioning), sorted by angle then modulus.
/// Verifies that the monic polynomial re-expanded from the roots matches the
/// input within 1e-6 relative coefficient error; throws IllConditioned.
std::vector<Complex> find_roots(std::span<const double> b_coeffs);
std::vector<Complex> find_roots(std::span<const Complex> b_coeffs);

/// Leja ordering: greedily maximizes the distance product to the already
/// placed roots. Sequential expansion of a high-degree polynomial from roots
/// clustered near the unit circle is numerically hopeless in index order;
/// this ordering keeps the intermediate coefficient growth bounded.
std::vector<Complex> leja_order(std::vector<Complex> roots);

/// Reflection across the unit circle; |B| on the circle is invariant under
/// it after renormalization. Throws ZeroRoot.
Complex flip_root(Complex r);

/// Classifies the flippable roots of a multiband beta: off-circle roots
/// within the angular window of a passband center (both half-planes; each
/// band contributes its conjugate-symmetric set), paired with their
/// conjugate partners in mirror_map.
RootSet identify_eligible(std::vector<Complex> roots, const BandLayout& layout,
                          std::span<const double> b_coeffs,
                          const RootClassifyOptions& opts = {});

/// Applies a flip pattern: every set bit reflects exactly its own root.
/// Bits act independently, so the pattern space has the full 2^N_root
/// distinct states; the output is conjugate-closed only when the pattern is
/// symmetric under mirror_map (such patterns give real betas / AM pulses,
/// the rest give phase-modulated pulses).
std::vector<Complex> apply_pattern(const RootSet& root_set,
                                   const RootPattern& pattern);

/// Expands the polynomial from roots (Leja-ordered), scaled so the max grid
/// |B'| equals reference_max_b. Conjugate-closed root sets give real
/// coefficients up to rounding. Throws IllConditioned on overflow.
std::vector<Complex> reconstruct_beta(const std::vector<Complex>& roots,
                                      const RootSet& root_set,
                                      int grid_size = 0);

struct PatternResult {
  RfPulse pulse;
  double peak = 0.0;  // radians
};

/// Immutable per-problem state: the filter design, its roots, and the
/// eligibility classification, computed once. pattern_to_pulse is reentrant
/// and deterministic; the search layer calls it for every candidate.
struct ProblemContext {
  DesignSpec spec;
  BandLayout layout;
  std::vector<double> b_min;  // unflipped minimum-phase beta
  RootSet root_set;

  static ProblemContext build(const DesignSpec& spec,
                              const BetaDesignOptions& design_opts = {},
                              const RootClassifyOptions& classify_opts = {});

  /// apply_pattern -> reconstruct_beta -> min-phase alpha -> inverse SLR.
  /// Real-coefficient betas get a global i phase so the pulse is purely
  /// amplitude-modulated.
  PatternResult pattern_to_pulse(const RootPattern& pattern) const;
};

}  // namespace deeprf
