#include <doctest.h>

#include <numbers>

#include "deeprf/pulse.hpp"

using namespace deeprf;

TEST_CASE("peak_nutation basics") {
  RfPulse zero;
  zero.samples.assign(512, 0.0);
  CHECK(peak_nutation(zero) == 0.0);

  RfPulse p;
  p.samples = {{0.1, 0.0}, {0.0, -0.2}, {0.05, 0.0}};
  CHECK(peak_nutation(p) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("scale_to_peak matches the direct formula") {
  RfPulse p;
  p.samples.assign(512, 0.0);
  p.samples[10] = 0.01;
  DesignSpec spec;
  spec.peak_constraint_gauss = 0.2;
  auto s = scale_to_peak(p, spec);
  // dwell = peak / (2 pi gamma Bmax), recomputed by hand
  CHECK(s.dwell_s == doctest::Approx(1.8693e-6).epsilon(1e-4));
  CHECK(s.duration_ms == doctest::Approx(0.957).epsilon(1e-3));
  CHECK(p.peak_gauss() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("doubling samples doubles duration") {
  RfPulse p;
  p.samples.assign(64, 0.0);
  p.samples[3] = {0.02, 0.01};
  DesignSpec spec;
  auto s1 = scale_to_peak(p, spec);
  for (auto& v : p.samples) v *= 2.0;
  auto s2 = scale_to_peak(p, spec);
  CHECK(s2.duration_ms == doctest::Approx(2.0 * s1.duration_ms).epsilon(1e-12));
}

TEST_CASE("objective equivalence: nutation order == duration order") {
  DesignSpec spec;
  RfPulse p1, p2;
  p1.samples.assign(128, 0.0);
  p2.samples.assign(128, 0.0);
  p1.samples[0] = 0.11;
  p2.samples[0] = 0.13;
  auto s1 = scale_to_peak(p1, spec);
  auto s2 = scale_to_peak(p2, spec);
  CHECK((peak_nutation(p1) < peak_nutation(p2)) ==
        (s1.duration_ms < s2.duration_ms));
}

TEST_CASE("scale_to_peak is idempotent on dwell and duration") {
  DesignSpec spec;
  RfPulse p;
  p.samples.assign(32, 0.0);
  p.samples[5] = {0.0, 0.3};
  auto s1 = scale_to_peak(p, spec);
  auto s2 = scale_to_peak(p, spec);
  CHECK(s1.dwell_s == s2.dwell_s);
  CHECK(s1.duration_ms == s2.duration_ms);
}

TEST_CASE("zero pulse cannot be scaled") {
  DesignSpec spec;
  RfPulse p;
  p.samples.assign(16, 0.0);
  CHECK_THROWS_AS(scale_to_peak(p, spec), ZeroPulse);
}

TEST_CASE("spec validation") {
  DesignSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.nb = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.nb = 3;
  spec.band_gap = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}
