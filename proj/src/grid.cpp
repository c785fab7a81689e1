#include "riesz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"

namespace riesz {
namespace {

// In-place cyclic shift by M/2 along every axis. For even M it is an involution,
// so the same routine serves as fftshift and ifftshift.
void half_shift(std::vector<cplx>& a, int dimension, std::size_t m) {
  const std::size_t half = m / 2;
  if (dimension == 1) {
    for (std::size_t i = 0; i < half; ++i) std::swap(a[i], a[i + half]);
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ii = (i + half) % m;
    if (ii < i) continue;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t jj = (j + half) % m;
      if (ii == i && jj <= j) continue;
      std::swap(a[i * m + j], a[ii * m + jj]);
    }
  }
}

std::vector<cplx> transform(const Field& f, detail::FftSign sign, double scale) {
  const GridSpec& g = f.grid();
  std::vector<cplx> data(f.samples().begin(), f.samples().end());
  half_shift(data, g.dimension(), g.points_per_axis());
  detail::fft_inplace(data, g.dimension(), g.points_per_axis(), sign);
  half_shift(data, g.dimension(), g.points_per_axis());
  for (auto& v : data) v *= scale;
  return data;
}

}  // namespace

const char* to_string(Domain d) { return d == Domain::spatial ? "spatial" : "frequency"; }

GridSpec::GridSpec(int dimension, std::size_t points_per_axis, double half_width)
    : dimension_(dimension), points_(points_per_axis), half_width_(half_width) {
  if (dimension != 1 && dimension != 2)
    throw UsageError("grid dimension must be 1 or 2, got " + std::to_string(dimension));
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw UsageError("points per axis must be even and >= 2, got " +
                     std::to_string(points_per_axis));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw UsageError("grid half-width must be positive and finite");
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dimension_); }

double GridSpec::frequency_cell_volume() const {
  return std::pow(frequency_spacing(), dimension_);
}

std::size_t GridSpec::size() const { return dimension_ == 1 ? points_ : points_ * points_; }

std::array<std::size_t, 2> GridSpec::unflatten(std::size_t flat) const {
  if (dimension_ == 1) return {flat, 0};
  return {flat / points_, flat % points_};
}

std::size_t GridSpec::flatten(std::size_t i0, std::size_t i1) const {
  return dimension_ == 1 ? i0 : i0 * points_ + i1;
}

Point GridSpec::position(std::size_t flat) const {
  const auto [i0, i1] = unflatten(flat);
  return {coordinate(i0), dimension_ == 2 ? coordinate(i1) : 0.0};
}

Point GridSpec::frequency_point(std::size_t flat) const {
  const auto [i0, i1] = unflatten(flat);
  return {frequency(i0), dimension_ == 2 ? frequency(i1) : 0.0};
}

std::size_t GridSpec::nearest_index(double x) const {
  const auto m = static_cast<std::ptrdiff_t>(points_);
  auto k = static_cast<std::ptrdiff_t>(std::llround(x / spacing())) + m / 2;
  k = ((k % m) + m) % m;
  return static_cast<std::size_t>(k);
}

Field::Field(GridSpec grid, Domain domain, std::vector<cplx> samples)
    : grid_(grid), domain_(domain), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw UsageError("field has " + std::to_string(samples_.size()) + " samples, grid expects " +
                     std::to_string(grid_.size()));
}

Field Field::zeros(const GridSpec& grid, Domain domain) {
  return Field(grid, domain, std::vector<cplx>(grid.size()));
}

Field Field::pointwise(std::span<const cplx> factor) const {
  if (factor.size() != samples_.size()) throw UsageError("pointwise factor has wrong length");
  std::vector<cplx> out(samples_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = samples_[k] * factor[k];
  return Field(grid_, domain_, std::move(out));
}

void Field::require_compatible(const Field& other) const {
  if (!(grid_ == other.grid_)) throw UsageError("fields live on different grids");
  if (domain_ != other.domain_) throw UsageError("fields carry different domain tags");
}

Field& Field::operator+=(const Field& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < samples_.size(); ++k) samples_[k] += other.samples_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < samples_.size(); ++k) samples_[k] -= other.samples_[k];
  return *this;
}

Field& Field::operator*=(cplx c) {
  for (auto& v : samples_) v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx c, Field a) { return a *= c; }

Field forward_transform(const Field& f) {
  if (f.domain() != Domain::spatial)
    throw UsageError("forward_transform expects a spatial field");
  auto data = transform(f, detail::FftSign::forward, f.grid().cell_volume());
  return Field(f.grid(), Domain::frequency, std::move(data));
}

Field inverse_transform(const Field& spectrum) {
  if (spectrum.domain() != Domain::frequency)
    throw UsageError("inverse_transform expects a frequency field");
  const GridSpec& g = spectrum.grid();
  const double scale = g.frequency_cell_volume() / std::pow(2.0 * std::numbers::pi, g.dimension());
  auto data = transform(spectrum, detail::FftSign::backward, scale);
  return Field(g, Domain::spatial, std::move(data));
}

Field modulate(const Field& f, std::span<const double> xi0) {
  if (f.domain() != Domain::spatial) throw UsageError("modulate expects a spatial field");
  const GridSpec& g = f.grid();
  const auto d = static_cast<std::size_t>(g.dimension());
  if (xi0.size() < d) throw UsageError("modulation frequency has too few components");

  const auto m = static_cast<std::ptrdiff_t>(g.points_per_axis());
  std::array<std::ptrdiff_t, 2> lattice{0, 0};
  bool on_lattice = true;
  for (std::size_t a = 0; a < d; ++a) {
    const double t = xi0[a] / g.frequency_spacing();
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9) on_lattice = false;
    lattice[a] = static_cast<std::ptrdiff_t>(r);
  }

  std::vector<cplx> out(f.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto idx = g.unflatten(k);
    cplx phase;
    if (on_lattice) {
      std::ptrdiff_t acc = 0;
      for (std::size_t a = 0; a < d; ++a) acc += (lattice[a] % m) * g.centered(idx[a]);
      acc = ((acc % m) + m) % m;
      phase = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(acc) /
                                  static_cast<double>(m));
    } else {
      double angle = 0.0;
      for (std::size_t a = 0; a < d; ++a) angle += xi0[a] * g.coordinate(idx[a]);
      phase = std::polar(1.0, angle);
    }
    out[k] = phase * f[k];
  }
  return Field(g, Domain::spatial, std::move(out));
}

double max_abs_difference(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw UsageError("sample sets differ in length");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

double max_abs(std::span<const cplx> a) {
  double worst = 0.0;
  for (const auto& v : a) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace riesz
