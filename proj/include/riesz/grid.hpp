#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace riesz {

using cplx = std::complex<double>;

/// Thrown when an operation receives arguments outside its preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Domain { spatial, frequency };

const char* to_string(Domain d);

/// A point of R^d, d <= 2. Unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Uniform periodic lattice on [-L, L)^d together with its dual frequency lattice.
///
/// Axis index i in [0, M) maps to x_i = (i - M/2) h in space and
/// xi_i = (i - M/2) dxi in frequency, so both lattices are centred on 0.
/// Flat indices are row-major with axis 0 slowest: idx = i0 * M + i1.
class GridSpec {
 public:
  GridSpec(int dimension, std::size_t points_per_axis, double half_width);

  int dimension() const { return dimension_; }
  std::size_t points_per_axis() const { return points_; }
  double half_width() const { return half_width_; }

  double spacing() const { return 2.0 * half_width_ / static_cast<double>(points_); }
  double frequency_spacing() const { return std::numbers::pi / half_width_; }
  double frequency_half_width() const {
    return std::numbers::pi * static_cast<double>(points_) / (2.0 * half_width_);
  }
  /// h^d, the Riemann-sum cell volume in space.
  double cell_volume() const;
  /// dxi^d, the cell volume on the frequency lattice.
  double frequency_cell_volume() const;

  std::size_t size() const;

  /// Signed axis offset i - M/2.
  std::ptrdiff_t centered(std::size_t axis_index) const {
    return static_cast<std::ptrdiff_t>(axis_index) - static_cast<std::ptrdiff_t>(points_ / 2);
  }
  double coordinate(std::size_t axis_index) const {
    return static_cast<double>(centered(axis_index)) * spacing();
  }
  double frequency(std::size_t axis_index) const {
    return static_cast<double>(centered(axis_index)) * frequency_spacing();
  }

  std::array<std::size_t, 2> unflatten(std::size_t flat) const;
  std::size_t flatten(std::size_t i0, std::size_t i1 = 0) const;

  Point position(std::size_t flat) const;
  Point frequency_point(std::size_t flat) const;

  /// Axis index of the lattice point nearest to x (wrapped into range).
  std::size_t nearest_index(double x) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int dimension_;
  std::size_t points_;
  double half_width_;
};

/// Samples of a function on a GridSpec, tagged with the side they live on.
class Field {
 public:
  Field(GridSpec grid, Domain domain, std::vector<cplx> samples);

  static Field zeros(const GridSpec& grid, Domain domain);

  /// Samples fn(x) at every lattice position of the given domain.
  template <class Fn>
  static Field sample(const GridSpec& grid, Domain domain, Fn&& fn) {
    std::vector<cplx> s(grid.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Point p = domain == Domain::spatial ? grid.position(k) : grid.frequency_point(k);
      s[k] = fn(std::span<const double>(p.data(), static_cast<std::size_t>(grid.dimension())));
    }
    return Field(grid, domain, std::move(s));
  }

  const GridSpec& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  std::span<const cplx> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const cplx& operator[](std::size_t k) const { return samples_[k]; }

  /// Pointwise product with another field on the same grid and domain.
  Field pointwise(std::span<const cplx> factor) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx c);

 private:
  void require_compatible(const Field& other) const;

  GridSpec grid_;
  Domain domain_;
  std::vector<cplx> samples_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx c, Field a);

/// Riemann sum of f(x) e^{-i x.xi} h^d over the lattice.
Field forward_transform(const Field& f);

/// (2 pi)^{-d} Riemann sum of F(xi) e^{i x.xi} dxi^d; exact inverse of forward_transform.
Field inverse_transform(const Field& spectrum);

/// Pointwise product with the plane wave e^{i x.xi0}.
///
/// When xi0 lies on the frequency lattice the phase is reduced modulo M in
/// integer arithmetic, which makes the spectral shift exact up to rounding.
/// Off-lattice xi0 is accepted but aliases under the periodic wrap.
Field modulate(const Field& f, std::span<const double> xi0);

/// Max |a - b| over two equally sized sample sets.
double max_abs_difference(std::span<const cplx> a, std::span<const cplx> b);
double max_abs(std::span<const cplx> a);

/// Version string of the FFT backend.
const char* fft_backend_version();

}  // namespace riesz
