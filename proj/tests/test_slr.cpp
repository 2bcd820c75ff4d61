#include <doctest.h>

#include <numbers>

#include "deeprf/rng.hpp"
#include "deeprf/slr.hpp"

using namespace deeprf;
namespace {
constexpr double kPi = std::numbers::pi;

// Random pulse with per-sample nutation up to `scale` radians. The inverse
// recursion reads the product of cos(phi_j/2) out of the constant
// coefficient, so per-sample angles near pi for many samples push that
// product below double precision; realistic pulses keep it O(1).
RfPulse random_pulse(int n, double scale, Rng& rng) {
  RfPulse p;
  p.samples.resize(n);
  for (auto& s : p.samples)
    s = std::polar(rng.uniform01() * scale, rng.uniform_symmetric(kPi));
  return p;
}
}  // namespace

TEST_CASE("forward_slr of the zero pulse is the identity rotation") {
  RfPulse p;
  p.samples.assign(16, 0.0);
  auto polys = forward_slr(p);
  CHECK(std::abs(polys.a[0] - 1.0) == 0.0);
  for (int k = 1; k < 16; ++k) CHECK(std::abs(polys.a[k]) == 0.0);
  for (int k = 0; k < 16; ++k) CHECK(std::abs(polys.b[k]) == 0.0);
}

TEST_CASE("single hard 180 sample") {
  RfPulse p;
  p.samples = {std::complex<double>(kPi, 0.0)};
  auto polys = forward_slr(p);
  CHECK(std::abs(polys.a[0]) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(polys.b[0]) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("forward output satisfies the unimodularity invariant") {
  Rng rng(7);
  auto p = random_pulse(32, 0.5, rng);
  auto polys = forward_slr(p);
  CHECK(unimodularity_error(polys) < 1e-8);
}

TEST_CASE("inverse_slr of the identity pair is the zero pulse") {
  SlrPolynomials polys;
  polys.a.assign(8, 0.0);
  polys.b.assign(8, 0.0);
  polys.a[0] = 1.0;
  auto p = inverse_slr(polys);
  for (const auto& s : p.samples) CHECK(std::abs(s) == 0.0);
}

TEST_CASE("round trip over 100 seeded random pulses") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_pulse(64, 0.05 + 0.4 * rng.uniform01(), rng);
    auto polys = forward_slr(p);
    auto q = inverse_slr(polys);
    REQUIRE(q.n_points() == p.n_points());
    double err = 0.0;
    for (int k = 0; k < 64; ++k)
      err = std::max(err, std::abs(q.samples[k] - p.samples[k]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("inverse rejects a non-unimodular pair") {
  SlrPolynomials polys;
  polys.a.assign(8, 0.0);
  polys.b.assign(8, 0.0);
  polys.a[0] = 1.0;
  polys.b[3] = 0.5;  // |A|^2+|B|^2 = 1.25 somewhere
  CHECK_THROWS_AS(inverse_slr(polys), NotUnimodular);
}

TEST_CASE("min_phase_alpha trivial cases") {
  std::vector<Complex> b(16, 0.0);
  auto a = min_phase_alpha(b);
  CHECK(std::abs(a[0] - 1.0) < 1e-12);
  for (int k = 1; k < 16; ++k) CHECK(std::abs(a[k]) < 1e-12);
}

TEST_CASE("min_phase_alpha of a random bounded beta is unimodular") {
  Rng rng(3);
  // random beta scaled to max |B| = 0.9
  std::vector<Complex> b(48);
  for (auto& v : b)
    v = std::polar(rng.uniform01(), rng.uniform_symmetric(kPi));
  auto bw = evaluate_on_circle(std::span<const Complex>(b), 4096);
  double mx = 0.0;
  for (const auto& v : bw) mx = std::max(mx, std::abs(v));
  for (auto& v : b) v *= 0.9 / mx;

  SlrPolynomials polys;
  polys.b = b;
  polys.a = min_phase_alpha(b);
  CHECK(unimodularity_error(polys) < 1e-8);
}

TEST_CASE("min_phase_alpha energy is front-loaded") {
  Rng rng(11);
  std::vector<Complex> b(32);
  for (auto& v : b)
    v = std::polar(rng.uniform01(), rng.uniform_symmetric(kPi));
  auto bw = evaluate_on_circle(std::span<const Complex>(b), 4096);
  double mx = 0.0;
  for (const auto& v : bw) mx = std::max(mx, std::abs(v));
  for (auto& v : b) v *= 0.8 / mx;

  auto a = min_phase_alpha(b);
  // cumulative energy of the min-phase factor dominates a delayed variant:
  // compare against the time-reversed (maximum-phase) factor
  std::vector<double> cum_min(a.size()), cum_rev(a.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s1 += std::norm(a[k]);
    s2 += std::norm(a[a.size() - 1 - k]);
    cum_min[k] = s1;
    cum_rev[k] = s2;
  }
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK(cum_min[k] >= cum_rev[k] - 1e-12);
}

TEST_CASE("min_phase_alpha rejects |B| > 1") {
  std::vector<Complex> b(8, 0.0);
  b[0] = 1.2;
  CHECK_THROWS_AS(min_phase_alpha(b), FactorizationFailure);
}

TEST_CASE("evaluate_on_circle matches Horner evaluation") {
  Rng rng(5);
  std::vector<Complex> c(21);
  for (auto& v : c)
    v = Complex(rng.uniform_symmetric(1.0), rng.uniform_symmetric(1.0));
  const int grid = 64;
  auto fast = evaluate_on_circle(std::span<const Complex>(c), grid);
  for (int k = 0; k < grid; ++k) {
    const double w = -kPi + 2.0 * kPi * double(k) / double(grid);
    const Complex z = std::polar(1.0, -w);
    Complex horner = 0.0;
    for (int j = int(c.size()) - 1; j >= 0; --j) horner = horner * z + c[j];
    CHECK(std::abs(fast[k] - horner) < 1e-12);
  }
}

TEST_CASE("evaluate_on_circle trivial polynomials") {
  std::vector<Complex> constant = {{0.3, -0.4}};
  auto prof = evaluate_on_circle(std::span<const Complex>(constant), 16);
  for (const auto& v : prof) CHECK(std::abs(v - Complex(0.3, -0.4)) < 1e-15);

  std::vector<Complex> delay = {{0.0, 0.0}, {1.0, 0.0}};
  auto prof2 = evaluate_on_circle(std::span<const Complex>(delay), 32);
  for (int k = 0; k < 32; ++k) {
    const double w = -kPi + 2.0 * kPi * double(k) / 32.0;
    CHECK(std::abs(prof2[k] - std::polar(1.0, -w)) < 1e-12);
  }
}
