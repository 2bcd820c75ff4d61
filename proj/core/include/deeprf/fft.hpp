#pragma once

#include <complex>
#include <span>
#include <vector>

namespace deeprf {

/// Thin FFTW wrapper. Plans are cached per transform size and shared; plan
/// creation is serialized, execution is reentrant.
namespace fft {

/// In-place forward DFT (e^{-i 2 pi k n / N} kernel).
void forward(std::span<std::complex<double>> data);

/// In-place inverse DFT, scaled by 1/N.
void inverse(std::span<std::complex<double>> data);

/// DFT of `coeffs` zero-padded to `n`, forward kernel.
std::vector<std::complex<double>> forward_padded(
    std::span<const std::complex<double>> coeffs, int n);

}  // namespace fft
}  // namespace deeprf
