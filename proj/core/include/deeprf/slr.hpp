#pragma once

#include <complex>
#include <span>
#include <vector>

#include "deeprf/pulse.hpp"

namespace deeprf {

using Complex = std::complex<double>;

/// The (alpha, beta) Cayley-Klein polynomial pair of a hard-pulse waveform.
/// Coefficients ascend in powers of z^-1; on the unit circle
/// |A|^2 + |B|^2 = 1.
struct SlrPolynomials {
  std::vector<Complex> a;
  std::vector<Complex> b;
};

/// Grid used for unit-circle checks: 8x the polynomial length, at least 4096,
/// rounded up to a power of two.
int default_grid_size(int len);

/// Hard-pulse recursion. For a sample with modulus phi and angle theta the
/// rotation is C = cos(phi/2), S = i e^{i theta} sin(phi/2), with a
/// one-sample delay on the B branch:
///   A' = C A - conj(S) z^-1 B
///   B' = S A +       C z^-1 B
SlrPolynomials forward_slr(const RfPulse& pulse);

/// Inverse recursion; peels one sample per step from the constant
/// coefficients of A and B. Throws NotUnimodular if |A|^2+|B|^2 deviates
/// from 1 beyond `tol` on the default grid.
RfPulse inverse_slr(const SlrPolynomials& polys, double tol = 1e-7);

/// Minimum-phase spectral factor of 1 - |B|^2, computed with the cepstral
/// (log-FFT) method. The returned A has length `b.size()`, satisfies
/// |A|^2 + |B|^2 = 1 on the circle, and its energy is maximally
/// front-loaded. Throws FactorizationFailure if 1 - |B|^2 < -1e-10 anywhere.
std::vector<Complex> min_phase_alpha(std::span<const Complex> b,
                                     int fft_size = 0);

/// Minimum-phase spectral factor of a nonnegative spectrum sampled at the
/// plain DFT frequencies 2 pi k / M. Returns the first `out_len`
/// coefficients of the causal factor F with |F(e^{i w})|^2 = p_grid.
std::vector<Complex> spectral_factor(std::span<const double> p_grid,
                                     int out_len);

/// Polynomial evaluation at e^{-i w_k}, w_k = -pi + 2 pi k / n_grid,
/// k = 0 .. n_grid-1. Equals zero-padded discrete Fourier evaluation.
std::vector<Complex> evaluate_on_circle(std::span<const Complex> coeffs,
                                        int n_grid);
std::vector<Complex> evaluate_on_circle(std::span<const double> coeffs,
                                        int n_grid);

/// Max over the default grid of | |A|^2 + |B|^2 - 1 |.
double unimodularity_error(const SlrPolynomials& polys);

}  // namespace deeprf
