#include "deeprf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace deeprf::fft {
namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  // FFTW_ESTIMATE keeps planning deterministic and does not touch the array.
  std::vector<std::complex<double>> scratch(n);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE);
  plan_cache.emplace(key, p);
  return p;
}

void execute(std::span<std::complex<double>> data, int sign) {
  fftw_plan p = plan_for(int(data.size()), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

void forward(std::span<std::complex<double>> data) {
  execute(data, FFTW_FORWARD);
}

void inverse(std::span<std::complex<double>> data) {
  execute(data, FFTW_BACKWARD);
  const double scale = 1.0 / double(data.size());
  for (auto& v : data) v *= scale;
}

std::vector<std::complex<double>> forward_padded(
    std::span<const std::complex<double>> coeffs, int n) {
  std::vector<std::complex<double>> data(n);
  std::copy(coeffs.begin(), coeffs.end(), data.begin());
  forward(data);
  return data;
}

}  // namespace deeprf::fft
