#include "deeprf/bloch.hpp"

#include <cmath>
#include <numbers>

namespace deeprf {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

SpinGrid SpinGrid::standard(const DesignSpec& spec, const RfPulse& ref,
                            int count, double span_cm, double thickness_cm) {
  if (!ref.scaled()) throw UnscaledPulse();
  SpinGrid grid;
  grid.positions_cm.resize(count);
  for (int i = 0; i < count; ++i)
    grid.positions_cm[i] =
        -span_cm + 2.0 * span_cm * double(i) / double(count - 1);
  // slice bandwidth in Hz maps to the thickness through the gradient
  const double duration_s = ref.n_points() * ref.dwell_s;
  const double bw_hz = spec.tbw / duration_s;
  grid.gradient_g_per_cm = bw_hz / (ref.gamma_hz_per_gauss * thickness_cm);
  // >= 8 cycles of dephasing across one slice thickness
  grid.crusher_area_gs_per_cm = 8.0 / (ref.gamma_hz_per_gauss * thickness_cm);
  return grid;
}

SpinState hard_pulse_step(const SpinState& s, Complex b1_rad,
                          double gradient_g_per_cm, double z_cm,
                          double dwell_s, double gamma_hz_per_gauss) {
  // Hard-pulse model: free precession under the gradient for one dwell,
  // then the RF impulse. This is the discretization the polynomial
  // recursion describes, so simulated profiles match polynomial evaluation
  // to rounding (a simultaneous-axis rotation would differ by the
  // commutator term, ~5e-3 on the slice profiles here).
  const double bz =
      kTwoPi * gamma_hz_per_gauss * gradient_g_per_cm * z_cm * dwell_s;
  const Complex rot = std::polar(1.0, 0.5 * bz);
  Complex a = rot * s.a;
  Complex b = std::conj(rot) * s.b;
  const double phi = std::abs(b1_rad);
  if (phi != 0.0) {
    // impulse with angle theta: beta = i e^{i theta} sin(phi/2), matching
    // the forward recursion's convention
    const double c = std::cos(0.5 * phi);
    const Complex sgn = Complex(0.0, 1.0) * (b1_rad / phi);
    const Complex beta = sgn * std::sin(0.5 * phi);
    const Complex a2 = c * a - std::conj(beta) * b;
    b = beta * a + c * b;
    a = a2;
  }
  return {a, b};
}

SpinState simulate_pulse(const RfPulse& pulse, double gradient_g_per_cm,
                         double z_cm) {
  if (!pulse.scaled()) throw UnscaledPulse();
  SpinState s;
  for (const auto& b1 : pulse.samples)
    s = hard_pulse_step(s, b1, gradient_g_per_cm, z_cm, pulse.dwell_s,
                        pulse.gamma_hz_per_gauss);
  return s;
}

EchoProfile simulate_spin_echo(const RfPulse& exc, const RfPulse& ref,
                               const SpinGrid& grid) {
  if (!exc.scaled() || !ref.scaled()) throw UnscaledPulse();
  EchoProfile out;
  out.z_cm = grid.positions_cm;
  out.mxy_mag.resize(grid.positions_cm.size());
  out.mxy_phase_rad.resize(grid.positions_cm.size());
  for (std::size_t i = 0; i < grid.positions_cm.size(); ++i) {
    const double z = grid.positions_cm[i];
    const SpinState e = simulate_pulse(exc, grid.gradient_g_per_cm, z);
    const SpinState r = simulate_pulse(ref, grid.gradient_g_per_cm, z);
    // beta of the crusher-refocusing-crusher block equals beta of the pulse
    // alone (the refocused pathway rephases); the non-refocused pathways
    // carry the crusher phase and dephase across a voxel, leaving
    const Complex mxy = 2.0 * e.a * std::conj(e.b) * r.b * r.b;
    out.mxy_mag[i] = std::abs(mxy);
    out.mxy_phase_rad[i] = std::arg(mxy);
  }
  return out;
}

std::vector<double> refocusing_profile(std::span<const double> b_coeffs,
                                       int n_grid) {
  auto bw = evaluate_on_circle(b_coeffs, n_grid);
  std::vector<double> profile(n_grid);
  for (int k = 0; k < n_grid; ++k) profile[k] = std::norm(bw[k]);
  return profile;
}

std::pair<double, double> measure_ripples(std::span<const double> profile,
                                          const BandLayout& layout) {
  const int n = int(profile.size());
  double pass_dev = 0.0, stop_max = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = -kPi + kTwoPi * double(k) / double(n);
    if (layout.in_passband(w))
      pass_dev = std::max(pass_dev, std::abs(profile[k] - 1.0));
    else if (layout.in_stopband(w))
      stop_max = std::max(stop_max, profile[k]);
  }
  return {pass_dev, stop_max};
}

}  // namespace deeprf
