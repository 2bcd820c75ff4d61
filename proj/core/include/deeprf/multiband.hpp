#pragma once

#include <vector>

#include "deeprf/pulse.hpp"
#include "deeprf/slr.hpp"

namespace deeprf {

/// Normalized-frequency geometry of the multiband profile. All quantities
/// are radians/sample; the layout is symmetric about w = 0 so the beta
/// polynomial can be real-coefficient.
struct BandLayout {
  std::vector<double> centers;  // ascending, symmetric about 0
  double band_width = 0.0;      // full passband width, 2 pi tbw / n_points
  double transition_frac = 0.0; // transition half-width / band half-width

  double pass_half_width() const {
    return 0.5 * band_width * (1.0 - transition_frac);
  }
  double stop_edge() const {
    return 0.5 * band_width * (1.0 + transition_frac);
  }
  /// Distance from w to the nearest band center.
  double distance_to_center(double w) const;
  bool in_passband(double w) const {
    return distance_to_center(w) <= pass_half_width();
  }
  bool in_stopband(double w) const {
    return distance_to_center(w) >= stop_edge();
  }
};

/// Empirical equiripple transition-width parameter D_inf(d1, d2).
double dinf(double d1, double d2);

/// Lays out nb band centers spaced by band_gap slice thicknesses, symmetric
/// about 0 (odd nb includes 0). The transition width comes from the D_inf
/// relation for the magnitude-squared prototype; pass a positive
/// transition_frac_override to pin it instead.
BandLayout band_edges(const DesignSpec& spec,
                      double transition_frac_override = 0.0);

/// Effective ripples on |B| for a profile-level (d1, d2) constraint. The
/// refocusing profile is |B|^2 and the excitation profile is 2 Re(a b*),
/// which maps the spec ripples onto the beta polynomial differently per
/// role.
struct BetaRipples {
  double passband = 0.0;  // half-ripple of |B| about its target level
  double stopband = 0.0;  // ceiling on |B| in stopbands
};
BetaRipples map_ripples(const DesignSpec& spec);

struct BetaDesignOptions {
  double transition_frac_override = 0.0;
  int ls_grid = 4096;      // least-squares grid on [0, pi]
  int lawson_iters = 40;   // reweighting steps toward the equiripple fit
  int factor_grid = 32768; // spectral factorization grid
  /// Headroom below 1 kept for max |B| so 1-|B|^2 stays well conditioned.
  double max_b_headroom = 2e-3;
};

/// Designs the minimum-phase multiband beta: weighted least squares on the
/// magnitude-squared (linear-phase) prototype, then spectral factorization.
/// Real coefficients; passband level within the ripple bounds of the role
/// target (1 for refocusing, sin(45 deg) for excitation); max grid |B| < 1.
/// Throws RippleViolation if the measured ripples miss the bounds by > 25%.
std::vector<double> design_min_phase_beta(const DesignSpec& spec,
                                          const BetaDesignOptions& opts = {});

/// Passband target level for a role: sin(flip/2).
double role_target_level(PulseRole role);

struct MatchedExcitation {
  std::vector<double> b;   // excitation beta coefficients
  RfPulse pulse;           // unscaled excitation pulse
  double max_phase_dev_rad = 0.0;  // worst in-band spin-echo phase deviation
};

/// Designs the 90-degree excitation companion whose beta phase tracks
/// angle(B_ref^2) in each passband, so the crushed spin-echo profile
/// 2 a_ex conj(b_ex) b_ref^2 has near-flat in-band phase. Throws
/// DesignFailure if the deviation exceeds 0.1 rad after refinement.
MatchedExcitation design_matched_excitation(const std::vector<double>& b_ref,
                                            const DesignSpec& spec);

}  // namespace deeprf
