#include "riesz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace riesz {
namespace {

double radius(const Point& x, int d) { return d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("norm exponent p must satisfy 1 <= p < inf");
}

double block_norm(std::span<const cplx> values, std::span<const double> weights, double p,
                  double cell) {
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) acc += std::pow(std::abs(values[k]), p) * weights[k];
  return std::pow(acc * cell, 1.0 / p);
}

// Signed integral of |x|^b from 0 to x (1-D), b > -1.
double signed_power_integral_1d(double b, double x) {
  const double v = std::pow(std::abs(x), b + 1.0) / (b + 1.0);
  return x < 0.0 ? -v : v;
}

// integral over [0, A] x [0, B] of |x|^b, b > -2, in polar coordinates.
double corner_integral_2d(double b, double a, double c) {
  if (a == 0.0 || c == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  const double split = std::atan2(c, a);
  const double e = b + 2.0;
  const double lower = gauss_kronrod<double, 31>::integrate(
      [e](double t) { return std::pow(1.0 / std::cos(t), e); }, 0.0, split, 10, 1e-13);
  const double upper = gauss_kronrod<double, 31>::integrate(
      [e](double t) { return std::pow(1.0 / std::sin(t), e); }, split, std::numbers::pi / 2.0, 10,
      1e-13);
  return (std::pow(a, e) * lower + std::pow(c, e) * upper) / e;
}

double signed_corner_2d(double b, double x, double y) {
  const double s = (x < 0.0 ? -1.0 : 1.0) * (y < 0.0 ? -1.0 : 1.0);
  return s * corner_integral_2d(b, std::abs(x), std::abs(y));
}

}  // namespace

double lp_norm(const Field& f, double p) {
  require_p(p);
  if (f.domain() != Domain::spatial) throw UsageError("lp_norm expects a spatial field");
  double acc = 0.0;
  for (const auto& v : f.samples()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

bool WeightSpec::admissible(int dimension) const {
  const double d = dimension;
  if (!(p >= 1.0) || !std::isfinite(p) || !std::isfinite(exponent)) return false;
  if (p == 1.0) return exponent > -d && exponent <= 0.0;
  return exponent > -d && exponent < d * (p - 1.0);
}

void WeightSpec::validate(int dimension) const {
  if (!admissible(dimension))
    throw UsageError("power weight |x|^" + std::to_string(exponent) + " is not an A_p weight for p = " +
                     std::to_string(p) + ", d = " + std::to_string(dimension));
}

double WeightSpec::operator()(const Point& x, int dimension) const {
  return std::pow(radius(x, dimension), exponent);
}

std::vector<double> WeightSpec::sample(const GridSpec& grid) const {
  const int d = grid.dimension();
  std::vector<double> out(grid.size());
  const double central = power_average(exponent, {0.0, 0.0}, grid.spacing(), d);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Point x = grid.position(k);
    const double r = radius(x, d);
    out[k] = r == 0.0 ? central : std::pow(r, exponent);
  }
  return out;
}

double WeightSpec::cube_mass(double r, int dimension) const {
  const double side = 2.0 * r;
  return power_average(exponent, {0.0, 0.0}, side, dimension) * std::pow(side, dimension);
}

double weighted_lp_norm(const Field& f, double p, const WeightSpec& w) {
  require_p(p);
  if (f.domain() != Domain::spatial) throw UsageError("weighted_lp_norm expects a spatial field");
  w.validate(f.grid().dimension());
  const auto weights = w.sample(f.grid());
  return block_norm(f.samples(), weights, p, f.grid().cell_volume());
}

double power_average(double b, const Point& centre, double side, int dimension) {
  if (!(side > 0.0)) throw UsageError("cube side must be positive");
  if (b == 0.0) return 1.0;
  const double h = side / 2.0;
  if (dimension == 1) {
    if (!(b > -1.0)) throw UsageError("|x|^b is not locally integrable in d=1 for b <= -1");
    const double lo = centre[0] - h;
    const double hi = centre[0] + h;
    return (signed_power_integral_1d(b, hi) - signed_power_integral_1d(b, lo)) / side;
  }
  if (!(b > -2.0)) throw UsageError("|x|^b is not locally integrable in d=2 for b <= -2");
  const double x0 = centre[0] - h, x1 = centre[0] + h;
  const double y0 = centre[1] - h, y1 = centre[1] + h;
  const double total = signed_corner_2d(b, x1, y1) - signed_corner_2d(b, x0, y1) -
                       signed_corner_2d(b, x1, y0) + signed_corner_2d(b, x0, y0);
  return total / (side * side);
}

CubeFamily CubeFamily::standard(double half_width) {
  CubeFamily f;
  f.base_side = half_width;
  f.centre_step = half_width / 4.0;
  f.centre_extent = half_width;
  return f;
}

CubeFamily CubeFamily::refined() const {
  CubeFamily f = *this;
  f.subdivisions *= 2;
  f.centre_step /= 2.0;
  return f;
}

double ap_constant_estimate(const WeightSpec& w, int dimension, const CubeFamily& family) {
  w.validate(dimension);
  if (family.subdivisions < 1 || family.min_level > family.max_level || !(family.centre_step > 0.0))
    throw UsageError("malformed cube family");

  const auto steps = static_cast<long>(std::floor(family.centre_extent / family.centre_step + 1e-9));
  std::vector<double> centres;
  for (long i = -steps; i <= steps; ++i) centres.push_back(static_cast<double>(i) * family.centre_step);

  double best = 0.0;
  const int first = family.min_level * family.subdivisions;
  const int last = family.max_level * family.subdivisions;
  for (int level = first; level <= last; ++level) {
    const double side =
        family.base_side * std::pow(2.0, static_cast<double>(level) / family.subdivisions);
    for (double cx : centres) {
      for (double cy : (dimension == 2 ? centres : std::vector<double>{0.0})) {
        const Point c{cx, cy};
        const double mean_w = power_average(w.exponent, c, side, dimension);
        double value;
        if (w.p > 1.0) {
          const double dual = power_average(-w.exponent / (w.p - 1.0), c, side, dimension);
          value = mean_w * std::pow(dual, w.p - 1.0);
        } else {
          // a <= 0: the infimum sits at the cube point farthest from the origin.
          const double far0 = std::abs(cx) + side / 2.0;
          const double far1 = dimension == 2 ? std::abs(cy) + side / 2.0 : 0.0;
          const double inf_w = w.exponent == 0.0 ? 1.0 : std::pow(std::hypot(far0, far1), w.exponent);
          value = mean_w / inf_w;
        }
        best = std::max(best, value);
      }
    }
  }
  return best;
}

void HerzParams::validate(int dimension) const {
  require_p(p);
  if (!(q >= 1.0) || !std::isfinite(q)) throw UsageError("Herz exponent q must satisfy 1 <= q < inf");
  if (!(alpha > -dimension / p))
    throw UsageError("Herz index alpha must exceed -d/p");
}

double herz_norm(const Field& f, const HerzParams& params) {
  if (f.domain() != Domain::spatial) throw UsageError("herz_norm expects a spatial field");
  const GridSpec& g = f.grid();
  const int d = g.dimension();
  params.validate(d);
  const int lmax = static_cast<int>(std::floor(std::log2(g.half_width())));

  std::vector<double> blocks(static_cast<std::size_t>(std::max(lmax, 0)) + 1, 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double r = radius(g.position(k), d);
    int l;
    if (r <= 1.0) {
      l = 0;
    } else {
      l = static_cast<int>(std::ceil(std::log2(r)));
      // Guard the boundary r = 2^l against rounding in log2.
      if (std::ldexp(1.0, l - 1) >= r) --l;
      if (std::ldexp(1.0, l) < r) ++l;
      if (l > lmax) continue;
    }
    blocks[static_cast<std::size_t>(l)] += std::pow(std::abs(f[k]), params.p);
  }
  const double cell = g.cell_volume();
  const double head = std::pow(blocks[0] * cell, 1.0 / params.p);
  double tail = 0.0;
  for (int l = 1; l <= lmax; ++l) {
    const double block = std::pow(blocks[static_cast<std::size_t>(l)] * cell, 1.0 / params.p);
    tail += std::pow(2.0, l * params.alpha * params.q) * std::pow(block, params.q);
  }
  return head + std::pow(tail, 1.0 / params.q);
}

LPFamily::LPFamily(int max_level)
    : max_level_(max_level),
      base_(Symbol::constant(0.0)),
      annulus_(Symbol::constant(0.0)) {
  if (max_level < 1) throw UsageError("Littlewood-Paley family needs at least one level");
  const BumpProfile profile(1.0, 2.0);
  base_ = Symbol::radial(
      "lp-base", [profile](double r) -> cplx { return profile(r); }, 2.0,
      Smoothness::smooth_compact);
  annulus_ = Symbol::radial(
      "lp-annulus",
      [profile](double r) -> cplx { return r < 0.5 ? 0.0 : profile(r) - profile(2.0 * r); }, 2.0,
      Smoothness::smooth_compact);
}

double LPFamily::valid_band() const { return std::ldexp(1.0, max_level_ - 1); }

Symbol LPFamily::level(int l) const {
  const Symbol a = annulus_;
  const double s = std::ldexp(1.0, -l);
  return Symbol::radial(
      "lp-level-" + std::to_string(l), [a, s](double r) { return a.at_radius(s * r); },
      std::ldexp(2.0, l), Smoothness::smooth_compact);
}

double LPFamily::partition_residual(const GridSpec& grid, double band) const {
  std::vector<std::shared_ptr<const std::vector<cplx>>> parts{base_.sample(grid)};
  for (int l = 1; l <= max_level_; ++l) parts.push_back(level(l).sample(grid));
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (radius(grid.frequency_point(k), grid.dimension()) > band) continue;
    cplx acc = 0.0;
    for (const auto& p : parts) acc += (*p)[k];
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  return worst;
}

LPFamily build_lp_family(int max_level) {
  LPFamily family(max_level);
  // The telescoping partition must hold on the lattice of a grid wide enough
  // to contain every level.
  const double reach = std::ldexp(4.0, max_level);
  const GridSpec probe(1, 1024, std::numbers::pi * 1024.0 / (2.0 * reach));
  const double residual = family.partition_residual(probe, std::ldexp(1.0, max_level));
  if (residual > 1e-12)
    throw std::logic_error("Littlewood-Paley partition residual " + std::to_string(residual));
  return family;
}

namespace {

struct Blocks {
  Field low;
  std::vector<Field> levels;
};

Blocks decompose(const Field& f, const LPFamily& family) {
  if (f.domain() != Domain::spatial) throw UsageError("Besov/Triebel norms expect a spatial field");
  const GridSpec& g = f.grid();
  const Field spectrum = forward_transform(f);
  const double band = family.valid_band();
  double inside = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = std::abs(spectrum[k]);
    if (radius(g.frequency_point(k), g.dimension()) > band)
      outside = std::max(outside, a);
    else
      inside = std::max(inside, a);
  }
  if (outside > 1e-10 * std::max(inside, 1e-300))
    throw UsageError("field spectrum exceeds the Littlewood-Paley band |xi| <= " +
                     std::to_string(band));
  Blocks out{inverse_transform(spectrum.pointwise(*family.base().sample(g))), {}};
  for (int l = 1; l <= family.max_level(); ++l)
    out.levels.push_back(inverse_transform(spectrum.pointwise(*family.level(l).sample(g))));
  return out;
}

}  // namespace

double besov_norm(const Field& f, double alpha, double p, double q, const LPFamily& family) {
  require_p(p);
  if (!(q >= 1.0)) throw UsageError("Besov exponent q must be >= 1");
  const Blocks b = decompose(f, family);
  double tail = 0.0;
  for (std::size_t i = 0; i < b.levels.size(); ++i) {
    const double l = static_cast<double>(i + 1);
    tail += std::pow(2.0, l * alpha * q) * std::pow(lp_norm(b.levels[i], p), q);
  }
  return lp_norm(b.low, p) + std::pow(tail, 1.0 / q);
}

double triebel_norm(const Field& f, double alpha, double p, double q, const LPFamily& family) {
  require_p(p);
  if (!(q >= 1.0)) throw UsageError("Triebel-Lizorkin exponent q must be >= 1");
  const Blocks b = decompose(f, family);
  std::vector<double> acc(f.size(), 0.0);
  for (std::size_t i = 0; i < b.levels.size(); ++i) {
    const double weight = std::pow(2.0, static_cast<double>(i + 1) * alpha * q);
    for (std::size_t k = 0; k < acc.size(); ++k)
      acc[k] += weight * std::pow(std::abs(b.levels[i][k]), q);
  }
  double integral = 0.0;
  for (double v : acc) integral += std::pow(v, p / q);
  const double square = std::pow(integral * f.grid().cell_volume(), 1.0 / p);
  return lp_norm(b.low, p) + square;
}

}  // namespace riesz
