#include "deeprf/multiband.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "deeprf/fft.hpp"

namespace deeprf {

namespace {
constexpr double kPi = std::numbers::pi;
}

double BandLayout::distance_to_center(double w) const {
  double d = std::numeric_limits<double>::infinity();
  for (double c : centers) d = std::min(d, std::abs(w - c));
  return d;
}

double dinf(double d1, double d2) {
  // Empirical equiripple relation for transition width x filter length.
  const double a1 = 5.309e-3, a2 = 7.114e-2, a3 = -4.761e-1;
  const double a4 = -2.66e-3, a5 = -5.941e-1, a6 = -4.278e-1;
  const double l1 = std::log10(d1), l2 = std::log10(d2);
  return (a1 * l1 * l1 + a2 * l1 + a3) * l2 + (a4 * l1 * l1 + a5 * l1 + a6);
}

BetaRipples map_ripples(const DesignSpec& spec) {
  const double d1 = spec.passband_ripple, d2 = spec.stopband_ripple;
  BetaRipples r;
  if (spec.pulse_role == PulseRole::kRefocusing) {
    r.passband = d1 / 4.0;
    r.stopband = std::sqrt(d2);
  } else {
    r.passband = std::sqrt(d1 / 2.0);
    r.stopband = d2 / std::sqrt(2.0);
  }
  return r;
}

BandLayout band_edges(const DesignSpec& spec, double transition_frac_override) {
  spec.validate();
  BandLayout layout;
  layout.band_width = 2.0 * kPi * spec.tbw / spec.n_points;
  if (transition_frac_override > 0.0) {
    layout.transition_frac = transition_frac_override;
  } else {
    // equiripple transition width for the linear-phase beta prototype at
    // the role-mapped ripples; n_points is then the minimal filter length
    const BetaRipples r = map_ripples(spec);
    layout.transition_frac = dinf(r.passband, r.stopband) / spec.tbw;
  }
  for (int i = 0; i < spec.nb; ++i) {
    const double offset = double(i) - 0.5 * double(spec.nb - 1);
    layout.centers.push_back(offset * spec.band_gap * layout.band_width);
  }
  const double outer = layout.centers.back() + layout.stop_edge();
  if (outer >= kPi)
    throw LayoutOverflow("bands exceed the Nyquist range");
  if (spec.nb > 1) {
    const double spacing = spec.band_gap * layout.band_width;
    if (spacing <= 2.0 * layout.stop_edge())
      throw LayoutOverflow("adjacent bands overlap through their transitions");
  }
  return layout;
}

double role_target_level(PulseRole role) {
  return role == PulseRole::kRefocusing ? 1.0 : std::sin(kPi / 4.0);
}

std::vector<double> design_min_phase_beta(const DesignSpec& spec,
                                          const BetaDesignOptions& opts) {
  const BandLayout layout = band_edges(spec, opts.transition_frac_override);
  const int n = spec.n_points;
  const double target = role_target_level(spec.pulse_role);
  const BetaRipples rip = map_ripples(spec);

  // --- weighted least-squares design of the linear-phase prototype ---
  // The transition relation makes n_points the minimal linear-phase length
  // for the mapped ripples, so the fit is tight and the transitions stay
  // monotone. The symmetric length-n filter has amplitude response
  // G(w) = sum_j g_j cos(nu_j w) with nu_j = j + 1/2 for even n (type II)
  // or nu_j = j for odd n (type I), designed on [0, pi] (the layout is
  // symmetric). The design works at unit passband level, so the mapped
  // beta ripples scale by 1/target.
  const double eps_pass = rip.passband / target;  // |B| half-ripple
  const double eps_stop = rip.stopband / target;  // |B| stopband ceiling
  const int nc = (n + 1) / 2;
  const bool half_integer = (n % 2 == 0);
  const double nu0 = half_integer ? 0.5 : 0.0;

  std::vector<double> omegas, targets, scales;
  const int ng = opts.ls_grid;
  for (int i = 0; i < ng; ++i) {
    const double w = kPi * (double(i) + 0.5) / double(ng);
    if (layout.in_passband(w)) {
      omegas.push_back(w);
      targets.push_back(1.0);
      scales.push_back(1.0 / eps_pass);
    } else if (layout.in_stopband(w)) {
      omegas.push_back(w);
      targets.push_back(0.0);
      scales.push_back(1.0 / eps_stop);
    }
  }
  const int rows = int(omegas.size());

  // Weighted least squares with Lawson reweighting drives the solution
  // toward the minimax (equiripple) fit with ripples proportional to the
  // per-band targets. Products of basis cosines reduce to integer-frequency
  // cosines, so each refit needs only the trig moments
  // m_d = sum_i w_i cos(d w_i).
  std::vector<double> weights(rows);
  for (int i = 0; i < rows; ++i) weights[i] = scales[i] * scales[i];

  const int n_moments = 2 * nc + (half_integer ? 1 : 0);
  Eigen::VectorXd g(nc);
  std::vector<double> response(rows);
  const int n_iters = std::max(opts.lawson_iters, 1);
  for (int iter = 0; iter < n_iters; ++iter) {
    std::vector<double> moments(n_moments, 0.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc);
    for (int i = 0; i < rows; ++i) {
      const double w = weights[i];
      const double cw = std::cos(omegas[i]);
      double cm1 = 1.0, cm0 = cw;
      moments[0] += w;
      moments[1] += w * cw;
      for (int d = 2; d < n_moments; ++d) {
        const double cd = 2.0 * cw * cm0 - cm1;
        moments[d] += w * cd;
        cm1 = cm0;
        cm0 = cd;
      }
      if (targets[i] != 0.0) {
        const double wd = w * targets[i];
        double t0 = std::cos(nu0 * omegas[i]);
        double tm1 = half_integer ? t0 : cw;  // cos((nu0 - 1) w)
        for (int j = 0; j < nc; ++j) {
          rhs(j) += wd * t0;
          const double tn = 2.0 * cw * t0 - tm1;
          tm1 = t0;
          t0 = tn;
        }
      }
    }
    Eigen::MatrixXd gram(nc, nc);
    for (int k = 0; k < nc; ++k)
      for (int l = 0; l < nc; ++l) {
        // cos(nu_k w) cos(nu_l w) -> frequencies |k-l| and k+l+2*nu0
        const int sum_idx = k + l + (half_integer ? 1 : 0);
        gram(k, l) = 0.5 * (moments[std::abs(k - l)] + moments[sum_idx]);
      }
    g = gram.ldlt().solve(rhs);

    if (iter + 1 == n_iters) break;
    // envelope update from the scaled residuals
    double max_scaled = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double cw = std::cos(omegas[i]);
      double t0 = std::cos(nu0 * omegas[i]);
      double tm1 = half_integer ? t0 : cw;
      double acc = 0.0;
      for (int j = 0; j < nc; ++j) {
        acc += g(j) * t0;
        const double tn = 2.0 * cw * t0 - tm1;
        tm1 = t0;
        t0 = tn;
      }
      response[i] = acc;
      max_scaled = std::max(max_scaled,
                            std::abs(acc - targets[i]) * scales[i]);
    }
    // scaled deviation <= 1 means every point already meets its ripple
    // target; further reweighting only degrades conditioning
    if (max_scaled <= 1.0) break;
    double mean = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double scaled = std::abs(response[i] - targets[i]) * scales[i];
      weights[i] *= (scaled + 0.05 * max_scaled) / max_scaled;
      mean += weights[i];
    }
    mean /= double(rows);
    for (int i = 0; i < rows; ++i) weights[i] /= mean;
  }

  // --- square the amplitude response and spectral-factorize ---
  // |B|^2 = G^2 is nonnegative by construction, so no lift is needed and
  // the minimum-phase factor shares the linear-phase design's magnitude.
  const int m = opts.factor_grid;
  std::vector<double> p(m);
  for (int k = 0; k < m; ++k) {
    const double w = 2.0 * kPi * double(k) / double(m);
    const double cw = std::cos(w);
    double t0 = std::cos(nu0 * w);
    double tm1 = half_integer ? t0 : cw;
    double acc = 0.0;
    for (int j = 0; j < nc; ++j) {
      acc += g(j) * t0;
      const double tn = 2.0 * cw * t0 - tm1;
      tm1 = t0;
      t0 = tn;
    }
    p[k] = acc * acc;
  }

  auto b_complex = spectral_factor(p, n);
  std::vector<double> b(n);
  double max_abs = 0.0, max_imag = 0.0;
  for (int k = 0; k < n; ++k) {
    b[k] = b_complex[k].real();
    max_abs = std::max(max_abs, std::abs(b_complex[k]));
    max_imag = std::max(max_imag, std::abs(b_complex[k].imag()));
  }
  if (max_imag > 1e-8 * max_abs)
    throw FactorizationFailure("factor has non-real coefficients");

  // --- scale to the role target with headroom below 1 ---
  const int grid = default_grid_size(n);
  auto bw = evaluate_on_circle(std::span<const double>(b), grid);
  double pb_min = std::numeric_limits<double>::infinity();
  double pb_max = 0.0, all_max = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double w = -kPi + 2.0 * kPi * double(k) / double(grid);
    const double mag = std::abs(bw[k]);
    all_max = std::max(all_max, mag);
    if (layout.in_passband(w)) {
      pb_min = std::min(pb_min, mag);
      pb_max = std::max(pb_max, mag);
    }
  }
  double scale = 2.0 * target / (pb_min + pb_max);
  scale = std::min(scale, (1.0 - opts.max_b_headroom) / all_max);
  for (double& v : b) v *= scale;

  // --- verify the ripple contract (25% slack on each bound) ---
  // Capping max |B| below 1 can push the whole passband down by up to the
  // headroom plus the ripple, so the deviation bound also admits the spec
  // ripple where it is looser than the mapped one.
  const double pass_bound = std::max(rip.passband, spec.passband_ripple);
  const double stop_bound = std::max(rip.stopband, spec.stopband_ripple);
  double pass_dev = 0.0, stop_level = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double w = -kPi + 2.0 * kPi * double(k) / double(grid);
    const double mag = scale * std::abs(bw[k]);
    if (layout.in_passband(w))
      pass_dev = std::max(pass_dev, std::abs(mag - target));
    else if (layout.in_stopband(w))
      stop_level = std::max(stop_level, mag);
  }
  if (pass_dev > 1.25 * pass_bound || stop_level > 1.25 * stop_bound)
    throw RippleViolation("designed filter misses ripple bounds: pass dev " +
                          std::to_string(pass_dev) + ", stop level " +
                          std::to_string(stop_level));
  return b;
}

MatchedExcitation design_matched_excitation(const std::vector<double>& b_ref,
                                            const DesignSpec& spec) {
  const BandLayout layout = band_edges(spec);
  const int n = spec.n_points;
  const int m = 2048;
  const double s_level = std::sin(kPi / 4.0);
  const double d1 = spec.passband_ripple, d2 = spec.stopband_ripple;

  auto bref_w = evaluate_on_circle(std::span<const double>(b_ref), m);

  std::vector<double> w_ls(m, 0.0);
  std::vector<int> pass_idx;
  for (int j = 0; j < m; ++j) {
    const double w = -kPi + 2.0 * kPi * double(j) / double(m);
    if (layout.in_passband(w)) {
      w_ls[j] = 1.0 / (d1 * d1);
      pass_idx.push_back(j);
    } else if (layout.in_stopband(w)) {
      w_ls[j] = 1.0 / (d2 * d2);
    }
  }

  // Normal-equation matrix is Toeplitz in k-l; build its first column via FFT.
  std::vector<Complex> wv(w_ls.begin(), w_ls.end());
  std::vector<Complex> wf(wv);
  fft::inverse(wf);  // wf[k] = (1/M) sum_j w_j e^{+i 2 pi j k / M}
  Eigen::MatrixXcd gram(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const int dm = k - l;
      const int idx = ((dm % m) + m) % m;
      const double sgn = (dm % 2 == 0) ? 1.0 : -1.0;
      gram(k, l) = sgn * double(m) * wf[idx];
    }
  Eigen::LDLT<Eigen::MatrixXcd> solver(gram);

  std::vector<Complex> b_ex(n, 0.0);
  std::vector<Complex> alpha;
  std::vector<Complex> alpha_w(m, 1.0);
  for (int iter = 0; iter < 3; ++iter) {
    // target: magnitude s_level, phase tracking angle(alpha) + 2 angle(B_ref)
    std::vector<Complex> y(m, 0.0);
    for (int j : pass_idx) {
      Complex phase = alpha_w[j] * bref_w[j] * bref_w[j];
      const double mag = std::abs(phase);
      phase = mag > 0.0 ? phase / mag : Complex(1.0);
      y[j] = w_ls[j] * s_level * phase;
    }
    fft::inverse(y);  // y[k] = (1/M) sum_j w_j d_j e^{+i 2 pi j k / M}
    Eigen::VectorXcd rhs(n);
    for (int k = 0; k < n; ++k)
      rhs(k) = ((k % 2 == 0) ? 1.0 : -1.0) * double(m) * y[k];
    Eigen::VectorXcd sol = solver.solve(rhs);
    for (int k = 0; k < n; ++k) b_ex[k] = sol(k);

    alpha = min_phase_alpha(b_ex);
    auto aw = evaluate_on_circle(std::span<const Complex>(alpha), m);
    alpha_w = std::move(aw);
  }

  // enforce the real-coefficient (amplitude-modulated) solution
  std::vector<double> b_real(n);
  for (int k = 0; k < n; ++k) b_real[k] = b_ex[k].real();

  // measure in-band spin-echo phase flatness of 2 a_ex conj(b_ex) b_ref^2
  auto bexw = evaluate_on_circle(std::span<const double>(b_real), m);
  std::vector<Complex> bex_c(b_real.begin(), b_real.end());
  alpha = min_phase_alpha(bex_c);
  auto aw = evaluate_on_circle(std::span<const Complex>(alpha), m);
  double max_dev = 0.0;
  for (double center : layout.centers) {
    Complex mean(0.0);
    std::vector<Complex> vals;
    for (int j : pass_idx) {
      const double w = -kPi + 2.0 * kPi * double(j) / double(m);
      if (std::abs(w - center) > layout.pass_half_width()) continue;
      Complex se = 2.0 * aw[j] * std::conj(bexw[j]) * bref_w[j] * bref_w[j];
      se /= std::abs(se);
      vals.push_back(se);
      mean += se;
    }
    if (vals.empty()) continue;
    mean /= std::abs(mean);
    for (const auto& v : vals)
      max_dev = std::max(max_dev, std::abs(std::arg(v * std::conj(mean))));
  }
  if (max_dev > 0.1)
    throw DesignFailure("matched excitation in-band phase deviation " +
                        std::to_string(max_dev) + " rad");

  // synthesize the pulse; the global i phase makes the waveform real
  SlrPolynomials polys;
  polys.b.resize(n);
  for (int k = 0; k < n; ++k) polys.b[k] = Complex(0.0, 1.0) * b_real[k];
  polys.a = min_phase_alpha(polys.b);
  MatchedExcitation out;
  out.b = std::move(b_real);
  out.pulse = inverse_slr(polys);
  out.max_phase_dev_rad = max_dev;
  return out;
}

}  // namespace deeprf
