#include "deeprf/pulse.hpp"

#include <cmath>
#include <numbers>

namespace deeprf {

double RfPulse::peak_gauss() const {
  if (!scaled()) throw UnscaledPulse();
  const double peak = peak_nutation(*this);
  return peak / (2.0 * std::numbers::pi * gamma_hz_per_gauss * dwell_s);
}

void DesignSpec::validate() const {
  if (nb < 1) throw Error("nb must be >= 1");
  if (!(tbw > 0.0)) throw Error("tbw must be positive");
  if (!(passband_ripple > 0.0 && passband_ripple < 0.5))
    throw Error("passband_ripple must be in (0, 0.5)");
  if (!(stopband_ripple > 0.0 && stopband_ripple < 0.5))
    throw Error("stopband_ripple must be in (0, 0.5)");
  if (!(band_gap > 1.0)) throw Error("band_gap must be > 1");
  if (n_points < 8) throw Error("n_points must be >= 8");
  if (!(peak_constraint_gauss > 0.0))
    throw Error("peak_constraint_gauss must be positive");
}

double peak_nutation(const RfPulse& pulse) {
  double peak = 0.0;
  for (const auto& s : pulse.samples) peak = std::max(peak, std::abs(s));
  return peak;
}

PulseScaling scale_to_peak(RfPulse& pulse, const DesignSpec& spec) {
  const double peak = peak_nutation(pulse);
  if (peak == 0.0) throw ZeroPulse();
  PulseScaling out;
  out.dwell_s = peak / (2.0 * std::numbers::pi * pulse.gamma_hz_per_gauss *
                        spec.peak_constraint_gauss);
  out.duration_ms = pulse.n_points() * out.dwell_s * 1e3;
  out.peak_gauss = spec.peak_constraint_gauss;
  pulse.dwell_s = out.dwell_s;
  return out;
}

double duration_ms_at_peak(double peak_nutation_rad, const DesignSpec& spec,
                           double gamma_hz_per_gauss) {
  return spec.n_points * peak_nutation_rad * 1e3 /
         (2.0 * std::numbers::pi * gamma_hz_per_gauss *
          spec.peak_constraint_gauss);
}

}  // namespace deeprf
