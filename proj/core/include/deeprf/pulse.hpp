#pragma once

#include <complex>
#include <vector>

#include "deeprf/errors.hpp"

namespace deeprf {

/// Proton gyromagnetic ratio in Hz/Gauss.
inline constexpr double kDefaultGamma = 4257.6;

/// Hard-pulse RF waveform. Samples are complex nutation angles in radians;
/// the physical amplitude scale (dwell time, Gauss) is attached only after
/// scale_to_peak.
struct RfPulse {
  std::vector<std::complex<double>> samples;
  double dwell_s = 0.0;  // 0 means unscaled
  double gamma_hz_per_gauss = kDefaultGamma;

  int n_points() const { return int(samples.size()); }
  bool scaled() const { return dwell_s > 0.0; }
  double duration_ms() const { return n_points() * dwell_s * 1e3; }
  /// Peak B1 in Gauss; requires a dwell time.
  double peak_gauss() const;
};

enum class PulseRole { kRefocusing, kExcitation };

/// Target slice-profile parameters for a multiband design.
struct DesignSpec {
  int nb = 7;                    // number of bands
  double tbw = 6.0;              // time-bandwidth product
  double passband_ripple = 0.01;
  double stopband_ripple = 0.01;
  double band_gap = 6.0;         // adjacent band centers, in slice thicknesses
  int n_points = 512;
  double peak_constraint_gauss = 0.2;
  PulseRole pulse_role = PulseRole::kRefocusing;

  /// Throws Error on any violated field constraint.
  void validate() const;
};

/// Max over samples of |sample|, in radians.
double peak_nutation(const RfPulse& pulse);

struct PulseScaling {
  double dwell_s = 0.0;
  double duration_ms = 0.0;
  double peak_gauss = 0.0;
};

/// Chooses the dwell time so the physical peak equals the spec's peak
/// constraint, i.e. the shortest duration admitted by the B1 cap. Sets
/// pulse.dwell_s. Duration is proportional to peak nutation at fixed length,
/// so ranking pulses by nutation or by scaled duration is equivalent.
PulseScaling scale_to_peak(RfPulse& pulse, const DesignSpec& spec);

/// Duration (ms) an n_points pulse with the given peak nutation would have
/// after scale_to_peak — the quantity searches minimize.
double duration_ms_at_peak(double peak_nutation_rad, const DesignSpec& spec,
                           double gamma_hz_per_gauss = kDefaultGamma);

}  // namespace deeprf
