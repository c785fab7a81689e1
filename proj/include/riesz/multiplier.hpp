#pragma once

#include <string>
#include <vector>

#include "riesz/grid.hpp"
#include "riesz/symbol.hpp"

namespace riesz {

/// Spatial convolution kernel sampled on a grid.
class Kernel {
 public:
  Kernel(GridSpec grid, std::vector<cplx> samples, std::string provenance);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  const std::string& provenance() const { return provenance_; }
  Field as_field() const { return Field(grid_, Domain::spatial, samples_); }

  /// Largest |Im K| over the grid.
  double imaginary_residue() const;

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
  std::string provenance_;
};

/// Throws UsageError unless the symbol's finite support fits inside the
/// grid's frequency window.
void require_in_window(const Symbol& m, const GridSpec& grid);

/// T_m f = (m f^)^v.
Field apply(const Symbol& m, const Field& f);

/// Inverse transform of the sampled symbol.
Kernel kernel_of(const Symbol& m, const GridSpec& grid);

/// Periodic convolution h^d sum_l K(x_j - x_l) f(x_l), computed in the transform domain.
Field convolve(const Kernel& kernel, const Field& f);

/// sum over |alpha| <= alpha0, |beta| <= beta0 of sup |x^alpha D^beta K|,
/// D^beta by periodic central differences.
double schwartz_seminorm(const Kernel& kernel, int alpha0, int beta0);

/// Explicit matrix of a multiplier on a small grid, built column by column
/// from coordinate basis fields. Row-major, size n x n with n = M^d.
class DenseOperator {
 public:
  static constexpr std::size_t max_size = 4096;

  DenseOperator(std::size_t n, std::vector<cplx> entries);

  std::size_t size() const { return n_; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return entries_[row * n_ + col]; }
  std::vector<cplx> multiply(std::span<const cplx> v) const;

 private:
  std::size_t n_;
  std::vector<cplx> entries_;
};

DenseOperator dense_oracle(const Symbol& m, const GridSpec& grid);

}  // namespace riesz
