#pragma once

#include "deeprf/roots.hpp"

namespace deeprf::testing {

// The reference three-band problem. Building it costs a few seconds
// (eigensolve of a degree-511 companion matrix), so tests share one copy.
inline DesignSpec three_band_spec() {
  DesignSpec spec;
  spec.nb = 3;
  spec.tbw = 6.0;
  spec.band_gap = 6.0;
  spec.n_points = 512;
  return spec;
}

inline const ProblemContext& three_band_ctx() {
  static ProblemContext ctx = ProblemContext::build(three_band_spec());
  return ctx;
}

// Small instance for search/policy tests: 10 eligible roots, cheap
// evaluations.
inline DesignSpec toy_spec() {
  DesignSpec spec;
  spec.nb = 2;
  spec.tbw = 4.0;
  spec.band_gap = 6.0;
  spec.n_points = 256;
  return spec;
}

inline const ProblemContext& toy_ctx() {
  static ProblemContext ctx = ProblemContext::build(toy_spec());
  return ctx;
}

}  // namespace deeprf::testing
