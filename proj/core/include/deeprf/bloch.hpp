#pragma once

#include <span>
#include <utility>
#include <vector>

#include "deeprf/multiband.hpp"
#include "deeprf/pulse.hpp"
#include "deeprf/slr.hpp"

namespace deeprf {

/// Spatial sampling and gradient context for slice simulations.
struct SpinGrid {
  std::vector<double> positions_cm;   // symmetric about 0
  double gradient_g_per_cm = 0.0;     // slice-select amplitude
  double crusher_area_gs_per_cm = 0.0;  // each crusher lobe

  /// 1001 spins over +-10 cm; the gradient maps the design bandwidth of
  /// `ref` (which must be scaled) onto the given slice thickness, and the
  /// crusher area gives >= 8 dephasing cycles across one slice.
  static SpinGrid standard(const DesignSpec& spec, const RfPulse& ref,
                           int count = 1001, double span_cm = 10.0,
                           double thickness_cm = 0.7);
};

/// Cayley-Klein spin-domain state; (1, 0) is equilibrium +z.
struct SpinState {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  double norm() const { return std::norm(a) + std::norm(b); }
};

/// One hard-pulse step: rotation about the effective field with transverse
/// component b1 (complex nutation, radians) and longitudinal component from
/// gradient * position over the dwell. No relaxation; exactly unitary up to
/// rounding.
SpinState hard_pulse_step(const SpinState& s, Complex b1_rad,
                          double gradient_g_per_cm, double z_cm,
                          double dwell_s,
                          double gamma_hz_per_gauss = kDefaultGamma);

/// Runs every sample of a scaled pulse from equilibrium at position z,
/// returning the net (a, b). Throws UnscaledPulse.
SpinState simulate_pulse(const RfPulse& pulse, double gradient_g_per_cm,
                         double z_cm);

struct EchoProfile {
  std::vector<double> z_cm;
  std::vector<double> mxy_mag;
  std::vector<double> mxy_phase_rad;
};

/// Crushed spin echo: excitation, crusher, refocusing, crusher, all with
/// the slice gradient on during the pulses. The crushers isolate the
/// refocused coherence pathway 2 a_exc conj(b_exc) b_ref^2, whose magnitude
/// and phase per position form the profile. Spins start at +z.
EchoProfile simulate_spin_echo(const RfPulse& exc, const RfPulse& ref,
                               const SpinGrid& grid);

/// Analytic refocusing efficiency |B(e^{i w})|^2 on the standard grid
/// w_k = -pi + 2 pi k / n_grid.
std::vector<double> refocusing_profile(std::span<const double> b_coeffs,
                                       int n_grid);

/// (max passband deviation from the band's target level, max stopband
/// level); transitions are ignored. The passband target is the median
/// in-band value's ideal, i.e. deviation is measured from the profile
/// nominal 1 for refocusing.
std::pair<double, double> measure_ripples(std::span<const double> profile,
                                          const BandLayout& layout);

}  // namespace deeprf
