#include "deeprf/slr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "deeprf/fft.hpp"

namespace deeprf {

namespace {
constexpr double kPi = std::numbers::pi;

int next_pow2(int n) {
  return int(std::bit_ceil(unsigned(std::max(n, 1))));
}
}  // namespace

int default_grid_size(int len) { return next_pow2(std::max(8 * len, 4096)); }

SlrPolynomials forward_slr(const RfPulse& pulse) {
  const int n = pulse.n_points();
  SlrPolynomials p;
  p.a.assign(std::max(n, 1), 0.0);
  p.b.assign(std::max(n, 1), 0.0);
  p.a[0] = 1.0;
  if (n == 0) return p;

  std::vector<Complex> a_next(n), b_next(n);
  int len = 1;
  for (int j = 0; j < n; ++j) {
    const Complex s = pulse.samples[j];
    const double phi = std::abs(s);
    const double theta = phi > 0.0 ? std::arg(s) : 0.0;
    const double c = std::cos(phi / 2.0);
    const Complex sr = Complex(0.0, 1.0) * std::polar(std::sin(phi / 2.0), theta);

    const int m = std::min(len + 1, n);
    for (int k = 0; k < m; ++k) {
      const Complex ak = k < len ? p.a[k] : Complex(0.0);
      const Complex b_delay = k > 0 ? p.b[k - 1] : Complex(0.0);
      a_next[k] = c * ak - std::conj(sr) * b_delay;
      b_next[k] = sr * ak + c * b_delay;
    }
    std::copy(a_next.begin(), a_next.begin() + m, p.a.begin());
    std::copy(b_next.begin(), b_next.begin() + m, p.b.begin());
    len = m;
  }
  return p;
}

RfPulse inverse_slr(const SlrPolynomials& polys, double tol) {
  const int n = int(polys.a.size());
  if (int(polys.b.size()) != n) throw Error("alpha/beta length mismatch");
  const double dev = unimodularity_error(polys);
  if (dev > tol) throw NotUnimodular(dev);

  std::vector<Complex> a(polys.a), b(polys.b);
  RfPulse pulse;
  pulse.samples.assign(n, 0.0);

  int len = n;
  for (int j = n - 1; j >= 0; --j) {
    const Complex a0 = a[0], b0 = b[0];
    const double phi = 2.0 * std::atan2(std::abs(b0), std::abs(a0));
    double theta = 0.0;
    if (std::abs(b0) > 0.0) {
      // b0/a0 = i e^{i theta} tan(phi/2)
      theta = (std::abs(a0) > 0.0 ? std::arg(b0 * std::conj(a0))
                                  : std::arg(b0)) -
              kPi / 2.0;
    }
    pulse.samples[j] = std::polar(phi, theta);

    const double c = std::cos(phi / 2.0);
    const Complex sr = Complex(0.0, 1.0) * std::polar(std::sin(phi / 2.0), theta);
    for (int k = 0; k < len; ++k) {
      const Complex ak = a[k], bk = b[k];
      a[k] = c * ak + std::conj(sr) * bk;
      b[k] = -sr * ak + c * bk;
    }
    // undo the one-sample delay on the B branch
    for (int k = 0; k + 1 < len; ++k) b[k] = b[k + 1];
    --len;
    if (len > 0) {
      a[len] = 0.0;
      b[len] = 0.0;
    }
  }
  return pulse;
}

std::vector<Complex> spectral_factor(std::span<const double> p_grid,
                                     int out_len) {
  const int m = int(p_grid.size());
  std::vector<std::complex<double>> data(m);
  for (int k = 0; k < m; ++k)
    data[k] = 0.5 * std::log(std::max(p_grid[k], 1e-14));
  fft::inverse(data);
  // keep the causal half of the cepstrum
  for (int k = 1; k < m / 2; ++k) data[k] *= 2.0;
  for (int k = m / 2 + 1; k < m; ++k) data[k] = 0.0;
  fft::forward(data);
  for (auto& v : data) v = std::exp(v);
  fft::inverse(data);
  return std::vector<Complex>(data.begin(), data.begin() + out_len);
}

std::vector<Complex> min_phase_alpha(std::span<const Complex> b, int fft_size) {
  const int len = int(b.size());
  const int m = fft_size > 0 ? next_pow2(fft_size)
                             : next_pow2(std::max(64 * len, 32768));

  auto spec = fft::forward_padded(b, m);
  std::vector<double> p(m);
  for (int k = 0; k < m; ++k) {
    p[k] = 1.0 - std::norm(spec[k]);
    if (p[k] < -1e-10)
      throw FactorizationFailure("|B| exceeds 1 on the unit circle");
  }
  return spectral_factor(p, len);
}

std::vector<Complex> evaluate_on_circle(std::span<const Complex> coeffs,
                                        int n_grid) {
  if (n_grid < int(coeffs.size()))
    throw Error("evaluation grid smaller than polynomial");
  std::vector<Complex> data(n_grid);
  // pre-rotation by (-1)^n shifts the DFT frequencies to [-pi, pi)
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    data[i] = (i % 2 == 0) ? coeffs[i] : -coeffs[i];
  fft::forward(data);
  return data;
}

std::vector<Complex> evaluate_on_circle(std::span<const double> coeffs,
                                        int n_grid) {
  std::vector<Complex> c(coeffs.begin(), coeffs.end());
  return evaluate_on_circle(std::span<const Complex>(c), n_grid);
}

double unimodularity_error(const SlrPolynomials& polys) {
  const int len = int(std::max(polys.a.size(), polys.b.size()));
  const int grid = default_grid_size(len);
  auto aw = evaluate_on_circle(std::span<const Complex>(polys.a), grid);
  auto bw = evaluate_on_circle(std::span<const Complex>(polys.b), grid);
  double dev = 0.0;
  for (int k = 0; k < grid; ++k)
    dev = std::max(dev, std::abs(std::norm(aw[k]) + std::norm(bw[k]) - 1.0));
  return dev;
}

}  // namespace deeprf
