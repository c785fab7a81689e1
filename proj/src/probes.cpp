#include "riesz/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "riesz/parallel.hpp"

namespace riesz {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double norm_of(const Point& p) { return std::hypot(p[0], p[1]); }

double spec_norm(const Field& f, double p, const std::optional<WeightSpec>& w) {
  return w ? weighted_lp_norm(f, p, *w) : lp_norm(f, p);
}

// Transform of the probe, phi0(N (xi - xi0)) on the frequency lattice.
Field probe_spectrum(const Point& xi0, int n, const GridSpec& grid, double rho) {
  if (n < 1) throw UsageError("probe dilation N must be >= 1");
  const double dxi = grid.frequency_spacing();
  if (rho / n < 4.0 * dxi)
    throw UsageError("probe bump radius rho/N = " + std::to_string(rho / n) +
                     " spans fewer than 4 lattice cells; need half-width L >= " +
                     std::to_string(4.0 * std::numbers::pi * n / rho));
  for (int a = 0; a < grid.dimension(); ++a) {
    const double t = xi0[static_cast<std::size_t>(a)] / dxi;
    if (std::abs(t - std::round(t)) > 1e-9)
      throw UsageError("probe centre must lie on the frequency lattice");
  }
  if (norm_of(xi0) + rho / n >= grid.frequency_half_width())
    throw UsageError("probe support leaves the frequency window");
  const Symbol bump = bump_phi0(rho, grid.dimension());
  const double nd = n;
  return Field::sample(grid, Domain::frequency, [&](std::span<const double> xi) {
    Point shifted{0.0, 0.0};
    for (std::size_t a = 0; a < xi.size(); ++a) shifted[a] = nd * (xi[a] - xi0[a]);
    return bump(std::span<const double>(shifted.data(), xi.size()));
  });
}

double ratio_for_symbol(const Field& spectrum, std::span<const cplx> symbol, double p,
                        const std::optional<WeightSpec>& w) {
  const Field f = inverse_transform(spectrum);
  const Field g = inverse_transform(spectrum.pointwise(symbol));
  return spec_norm(g, p, w) / spec_norm(f, p, w);
}

std::vector<cplx> defect_symbol(const GridSpec& grid, double lambda, double delta) {
  const auto b = bochner_symbol(delta).sample(grid);
  std::vector<cplx> out(b->size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = lambda - (*b)[k];
  return out;
}

}  // namespace

Point lambda_to_xi0(double lambda, double delta) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  if (lambda == 0.0) return {2.0, 0.0};
  return {std::sqrt(std::max(0.0, 1.0 - std::pow(lambda, 1.0 / delta))), 0.0};
}

void ProbeSpec::validate() const {
  if (!std::isfinite(lambda)) throw UsageError("lambda must be finite");
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("probe norm exponent must satisfy 1 <= p < inf");
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  if (!(rho > 0.0)) throw UsageError("bump radius rho must be positive");
  if (dimension != 1 && dimension != 2) throw UsageError("probe dimension must be 1 or 2");
  if (sweep.empty()) throw UsageError("probe sweep is empty");
  for (int n : sweep)
    if (n < 1) throw UsageError("probe sweep values must be positive");
  if (weight) weight->validate(dimension);
  if (grid && grid->dimension() != dimension) throw UsageError("probe grid dimension mismatch");
}

int ProbeSpec::max_n() const { return *std::max_element(sweep.begin(), sweep.end()); }

GridSpec probe_grid(double rho, int max_n, double xi0_norm, int dimension) {
  const double nmax = max_n;
  const double half_width =
      std::max(16.0 * nmax * std::max(1.0, rho) / rho, 8.0 * std::numbers::pi * nmax / rho);
  const double needed = std::max(4.0, xi0_norm + rho + 1.0);
  std::size_t m = 2;
  while (std::numbers::pi * static_cast<double>(m) / (2.0 * half_width) < needed) m *= 2;
  return GridSpec(dimension, m, half_width);
}

ProbeGeometry probe_geometry(const ProbeSpec& spec) {
  spec.validate();
  const double lam = clamp01(spec.lambda);
  const Point target = lambda_to_xi0(lam, spec.delta);
  const GridSpec grid = spec.grid ? *spec.grid
                                  : probe_grid(spec.rho, spec.max_n(), target[0], spec.dimension);
  const double dxi = grid.frequency_spacing();
  const Point xi0{std::round(target[0] / dxi) * dxi, 0.0};
  const double r = xi0[0];
  const double achieved = bochner_symbol(spec.delta).at_radius(r).real();
  // Localizer around xi0 on which lambda - b_delta is smooth: (1 - |xi0|)/2
  // inside the ball, (|xi0| - 1)/2 outside it.
  const double localizer = r < 1.0 ? (1.0 - r) / 2.0 : (r - 1.0) / 2.0;
  if (!(localizer > 0.0)) throw UsageError("probe centre sits on the unit sphere");
  const int min_n = static_cast<int>(std::ceil(spec.rho / localizer - 1e-12));
  return {grid, xi0, spec.lambda, achieved, std::abs(r - target[0]), localizer, std::max(min_n, 1)};
}

Field probe_field(const Point& xi0, int n, const GridSpec& grid, double rho) {
  return inverse_transform(probe_spectrum(xi0, n, grid, rho));
}

double probe_ratio(const ProbeSpec& spec, const ProbeGeometry& geometry, int n) {
  if (n < geometry.min_n)
    throw UsageError("N = " + std::to_string(n) + " is below the minimum " +
                     std::to_string(geometry.min_n) + " keeping the probe inside its localizer");
  const Field spectrum = probe_spectrum(geometry.xi0, n, geometry.grid, spec.rho);
  const auto symbol = defect_symbol(geometry.grid, spec.lambda, spec.delta);
  return ratio_for_symbol(spectrum, symbol, spec.p, spec.weight);
}

double probe_ratio(const ProbeSpec& spec, int n) {
  return probe_ratio(spec, probe_geometry(spec), n);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("slope fit needs >= 2 paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

DecayCurve decay_curve(const ProbeSpec& spec) {
  if (spec.sweep.size() < 4) throw UsageError("decay curve needs at least 4 sweep points");
  DecayCurve curve{probe_geometry(spec), {}, {}, 0.0};
  std::vector<int> sweep = spec.sweep;
  std::sort(sweep.begin(), sweep.end());
  for (int n : sweep) {
    curve.n.push_back(n);
    curve.ratio.push_back(probe_ratio(spec, curve.geometry, n));
  }
  std::vector<double> x(curve.n.begin(), curve.n.end());
  curve.slope = loglog_slope(x, curve.ratio);
  return curve;
}

double half_height_radius(double rho, int dimension) {
  using boost::math::quadrature::gauss_kronrod;
  const Symbol bump = bump_phi0(rho, dimension);
  // Radial inverse transform of the bump.
  auto value = [&](double x) {
    if (dimension == 1) {
      return gauss_kronrod<double, 61>::integrate(
                 [&](double r) { return bump.at_radius(r).real() * std::cos(x * r); }, 0.0, rho,
                 10, 1e-13) /
             std::numbers::pi;
    }
    return gauss_kronrod<double, 61>::integrate(
               [&](double r) { return bump.at_radius(r).real() * std::cyl_bessel_j(0.0, x * r) * r; },
               0.0, rho, 10, 1e-13) /
           (2.0 * std::numbers::pi);
  };
  const double peak = std::abs(value(0.0));
  const double step = 0.05 / rho;
  double lo = 0.0, hi = step;
  while (std::abs(value(hi)) >= peak / 2.0) {
    lo = hi;
    hi += step;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(value(mid)) >= peak / 2.0 ? lo : hi) = mid;
  }
  return lo;
}

WeightedProbeReport weighted_probe_ratio(const ProbeSpec& spec, int n) {
  if (!spec.weight) throw UsageError("weighted probe needs a weight");
  const WeightSpec& w = *spec.weight;
  w.validate(spec.dimension);
  if (w.p != spec.p) throw UsageError("weight exponent p must match the probe norm exponent");
  const ProbeGeometry geometry = probe_geometry(spec);

  WeightedProbeReport r{};
  r.n = n;
  r.ratio = probe_ratio(spec, geometry, n);
  const Field baseband = probe_field({0.0, 0.0}, n, geometry.grid, spec.rho);
  const double d = spec.dimension;
  const double nd = n;
  r.p_norm_of_probe = std::pow(weighted_lp_norm(baseband, spec.p, w), spec.p);
  r.decay_term = std::pow(nd, -spec.p / 2.0);
  r.mass_term = std::pow(nd, -(d + 0.5) * spec.p) * w.cube_mass(nd, spec.dimension);
  const double eps0 = half_height_radius(spec.rho, spec.dimension);
  // |f_N| >= N^{-d} / 2 on the cube of half-side eps0 N.
  r.lower_bound = std::pow(0.5, spec.p) * std::pow(nd, -d * spec.p) * w.cube_mass(eps0 * nd, spec.dimension);
  r.envelope = std::pow(r.ratio, spec.p) / (r.decay_term + r.mass_term / r.p_norm_of_probe);
  return r;
}

std::vector<cplx> ZGrid::points() const {
  if (n_re < 1 || n_im < 1) throw UsageError("z-grid needs at least one point per axis");
  std::vector<cplx> out;
  for (int i = 0; i < n_re; ++i) {
    const double re = n_re == 1 ? re_min : re_min + (re_max - re_min) * i / (n_re - 1);
    for (int j = 0; j < n_im; ++j) {
      const double im = n_im == 1 ? im_min : im_min + (im_max - im_min) * j / (n_im - 1);
      out.emplace_back(re, im);
    }
  }
  return out;
}

double p2_resolvent_oracle(cplx z, double delta, const GridSpec& grid, int oversample) {
  if (oversample < 1) throw UsageError("oracle oversampling must be >= 1");
  if (distance_to_unit_interval(z) <= 1e-12) throw PoleError("z lies on [0,1]");
  const Symbol b = bochner_symbol(delta);
  const double step = grid.frequency_spacing() / oversample;
  const double reach = grid.frequency_half_width() * std::sqrt(static_cast<double>(grid.dimension()));
  const auto count = static_cast<long>(std::floor(reach / step));
  double best = 0.0;
  for (long j = 0; j <= count; ++j)
    best = std::max(best, 1.0 / std::abs(z - b.at_radius(static_cast<double>(j) * step)));
  return best;
}

namespace {

struct FamilyMember {
  ProbeGeometry geometry;
  std::vector<int> sweep;
};

std::vector<FamilyMember> family_members(cplx z, double delta, const ProbeFamily& family) {
  std::vector<double> lambdas = family.lambdas;
  lambdas.push_back(clamp01(z.real()));
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  std::vector<FamilyMember> out;
  for (double lam : lambdas) {
    ProbeSpec s;
    s.lambda = lam;
    s.delta = delta;
    s.rho = family.rho;
    s.sweep = family.sweep;
    const ProbeGeometry g = probe_geometry(s);
    FamilyMember m{g, {}};
    for (int n : family.sweep)
      if (n >= g.min_n) m.sweep.push_back(n);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

SpectrumCell spectrum_point(cplx z, double p, double delta, const ProbeFamily& family,
                            const GridSpec& oracle_grid) {
  SpectrumCell cell{z, false, 0.0, 0.0};
  if (distance_to_unit_interval(z) < 1e-3) {
    cell.pole = true;
    cell.lower_bound = cell.oracle_p2 = std::numeric_limits<double>::quiet_NaN();
    return cell;
  }
  cell.oracle_p2 = p2_resolvent_oracle(z, delta, oracle_grid);
  const Symbol resolvent = resolvent_symbol(z, delta);
  for (const auto& member : family_members(z, delta, family)) {
    const auto symbol = resolvent.sample(member.geometry.grid);
    for (int n : member.sweep) {
      const Field spectrum = probe_spectrum(member.geometry.xi0, n, member.geometry.grid, family.rho);
      cell.lower_bound = std::max(cell.lower_bound, ratio_for_symbol(spectrum, *symbol, p, std::nullopt));
    }
  }
  return cell;
}

std::vector<SpectrumCell> spectrum_map(const ZGrid& zs, double p, double delta,
                                       const ProbeFamily& family, const GridSpec& oracle_grid,
                                       int workers) {
  const auto points = zs.points();
  std::vector<SpectrumCell> cells(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    cells[i] = spectrum_point(points[i], p, delta, family, oracle_grid);
  });
  return cells;
}

}  // namespace riesz
