#include "deeprf/roots.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace deeprf {

namespace {

std::vector<Complex> expand_monic(const std::vector<Complex>& leja_roots) {
  std::vector<Complex> c{Complex(1.0)};
  c.reserve(leja_roots.size() + 1);
  for (const Complex& r : leja_roots) {
    c.push_back(0.0);
    for (int k = int(c.size()) - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
    if (!std::isfinite(std::abs(c[0])))
      throw IllConditioned("polynomial expansion overflowed");
  }
  return c;
}

void sort_by_angle(std::vector<Complex>& roots) {
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    const double aa = std::arg(a), ab = std::arg(b);
    if (aa != ab) return aa < ab;
    return std::abs(a) < std::abs(b);
  });
}

std::vector<Complex> companion_roots(const std::vector<Complex>& coeffs) {
  int deg = int(coeffs.size()) - 1;
  while (deg > 0 && std::abs(coeffs[deg]) == 0.0) --deg;
  if (deg < 1) throw Error("find_roots needs degree >= 1");

  // Reversing the polynomial maps roots to reciprocals; pick the
  // orientation whose leading coefficient is larger so the companion
  // matrix entries stay small.
  const bool reversed = std::abs(coeffs[deg]) < std::abs(coeffs[0]);
  std::vector<Complex> p(coeffs.begin(), coeffs.begin() + deg + 1);
  if (reversed) std::reverse(p.begin(), p.end());

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  if (solver.info() != Eigen::Success)
    throw IllConditioned("companion eigensolve failed");

  std::vector<Complex> roots(deg);
  for (int i = 0; i < deg; ++i) {
    Complex r = solver.eigenvalues()(i);
    roots[i] = reversed ? 1.0 / r : r;
  }
  sort_by_angle(roots);
  return roots;
}

void verify_reconstruction(const std::vector<Complex>& coeffs,
                           const std::vector<Complex>& roots) {
  auto monic = expand_monic(leja_order(roots));
  const int deg = int(roots.size());
  const Complex lead = coeffs[deg];
  double max_coeff = 0.0, max_err = 0.0;
  for (int k = 0; k <= deg; ++k) {
    max_coeff = std::max(max_coeff, std::abs(coeffs[k]));
    max_err = std::max(max_err, std::abs(lead * monic[k] - coeffs[k]));
  }
  if (max_err > 1e-6 * max_coeff)
    throw IllConditioned("root reconstruction error " +
                         std::to_string(max_err / max_coeff));
}

}  // namespace

std::vector<Complex> find_roots(std::span<const Complex> b_coeffs) {
  std::vector<Complex> coeffs(b_coeffs.begin(), b_coeffs.end());
  auto roots = companion_roots(coeffs);
  coeffs.resize(roots.size() + 1);
  verify_reconstruction(coeffs, roots);
  return roots;
}

std::vector<Complex> find_roots(std::span<const double> b_coeffs) {
  std::vector<Complex> coeffs(b_coeffs.begin(), b_coeffs.end());
  auto roots = companion_roots(coeffs);
  coeffs.resize(roots.size() + 1);
  verify_reconstruction(coeffs, roots);
  return roots;
}

std::vector<Complex> leja_order(std::vector<Complex> roots) {
  const int n = int(roots.size());
  std::vector<double> dist(n, 1.0);
  for (int k = 0; k < n; ++k) {
    int pick = k;
    double best = -1.0;
    for (int j = k; j < n; ++j) {
      const double v = (k == 0) ? std::abs(roots[j]) : dist[j];
      if (v > best) {
        best = v;
        pick = j;
      }
    }
    std::swap(roots[k], roots[pick]);
    std::swap(dist[k], dist[pick]);
    for (int j = k + 1; j < n; ++j) dist[j] *= std::abs(roots[j] - roots[k]);
  }
  return roots;
}

Complex flip_root(Complex r) {
  if (std::abs(r) == 0.0) throw ZeroRoot();
  return 1.0 / std::conj(r);
}

RootSet identify_eligible(std::vector<Complex> roots, const BandLayout& layout,
                          std::span<const double> b_coeffs,
                          const RootClassifyOptions& opts) {
  sort_by_angle(roots);
  RootSet rs;
  rs.roots = std::move(roots);

  const int grid = default_grid_size(int(b_coeffs.size()));
  auto bw = evaluate_on_circle(b_coeffs, grid);
  for (const auto& v : bw)
    rs.reference_max_b = std::max(rs.reference_max_b, std::abs(v));

  for (int i = 0; i < int(rs.roots.size()); ++i) {
    const double off = std::abs(1.0 - std::abs(rs.roots[i]));
    if (off <= opts.min_radial_offset || off >= opts.max_radial_offset)
      continue;
    const double dist = layout.distance_to_center(std::arg(rs.roots[i]));
    if (dist <= opts.angular_window_bw * layout.band_width)
      rs.eligible_indices.push_back(i);
  }

  rs.mirror_map.assign(rs.eligible_indices.size(), -1);
  for (int s = 0; s < int(rs.eligible_indices.size()); ++s) {
    const Complex target = std::conj(rs.roots[rs.eligible_indices[s]]);
    for (int t = 0; t < int(rs.eligible_indices.size()); ++t) {
      if (std::abs(rs.roots[rs.eligible_indices[t]] - target) <
          opts.mirror_tol) {
        rs.mirror_map[s] = t;
        break;
      }
    }
    if (rs.mirror_map[s] < 0)
      throw Error("eligible root has no conjugate partner");
  }
  return rs;
}

std::vector<Complex> apply_pattern(const RootSet& root_set,
                                   const RootPattern& pattern) {
  if (int(pattern.size()) != root_set.n_root())
    throw Error("pattern length does not match eligible root count");
  auto roots = root_set.roots;
  for (int s = 0; s < root_set.n_root(); ++s)
    if (pattern[s]) {
      Complex& r = roots[root_set.eligible_indices[s]];
      r = flip_root(r);
    }
  return roots;
}

std::vector<Complex> reconstruct_beta(const std::vector<Complex>& roots,
                                      const RootSet& root_set, int grid_size) {
  auto coeffs = expand_monic(leja_order(roots));
  const int grid =
      grid_size > 0 ? grid_size : default_grid_size(int(coeffs.size()));
  auto bw = evaluate_on_circle(std::span<const Complex>(coeffs), grid);
  double mx = 0.0;
  for (const auto& v : bw) mx = std::max(mx, std::abs(v));
  if (!(mx > 0.0) || !std::isfinite(mx))
    throw IllConditioned("degenerate reconstructed beta");
  const double scale = root_set.reference_max_b / mx;
  for (auto& c : coeffs) c *= scale;
  return coeffs;
}

ProblemContext ProblemContext::build(const DesignSpec& spec,
                                     const BetaDesignOptions& design_opts,
                                     const RootClassifyOptions& classify_opts) {
  ProblemContext ctx;
  ctx.spec = spec;
  ctx.layout = band_edges(spec, design_opts.transition_frac_override);
  ctx.b_min = design_min_phase_beta(spec, design_opts);
  auto roots = find_roots(std::span<const double>(ctx.b_min));
  ctx.root_set = identify_eligible(std::move(roots), ctx.layout,
                                   std::span<const double>(ctx.b_min),
                                   classify_opts);
  return ctx;
}

PatternResult ProblemContext::pattern_to_pulse(
    const RootPattern& pattern) const {
  auto roots = apply_pattern(root_set, pattern);
  auto b = reconstruct_beta(roots, root_set);

  // conjugate-closed root sets give real coefficients; a global i phase
  // then makes the synthesized pulse amplitude-modulated
  double max_abs = 0.0, max_imag = 0.0;
  for (const auto& c : b) {
    max_abs = std::max(max_abs, std::abs(c));
    max_imag = std::max(max_imag, std::abs(c.imag()));
  }
  if (max_imag <= 1e-8 * max_abs)
    for (auto& c : b) c = Complex(0.0, c.real());

  SlrPolynomials polys;
  polys.b = std::move(b);
  polys.a = min_phase_alpha(polys.b);

  PatternResult out;
  out.pulse = inverse_slr(polys, 1e-6);
  out.peak = peak_nutation(out.pulse);
  return out;
}

}  // namespace deeprf
