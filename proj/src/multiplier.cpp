#include "riesz/multiplier.hpp"

#include <algorithm>
#include <cmath>

namespace riesz {

Kernel::Kernel(GridSpec grid, std::vector<cplx> samples, std::string provenance)
    : grid_(grid), samples_(std::move(samples)), provenance_(std::move(provenance)) {
  if (samples_.size() != grid_.size()) throw UsageError("kernel sample count does not match grid");
}

double Kernel::imaginary_residue() const {
  double worst = 0.0;
  for (const auto& v : samples_) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

void require_in_window(const Symbol& m, const GridSpec& grid) {
  const double support = m.support_radius();
  if (std::isfinite(support) && support >= grid.frequency_half_width())
    throw UsageError("symbol '" + m.name() + "' has support radius " + std::to_string(support) +
                     " outside the grid's frequency window " +
                     std::to_string(grid.frequency_half_width()));
}

Field apply(const Symbol& m, const Field& f) {
  if (f.domain() != Domain::spatial) throw UsageError("apply expects a spatial field");
  require_in_window(m, f.grid());
  const auto values = m.sample(f.grid());
  return inverse_transform(forward_transform(f).pointwise(*values));
}

Kernel kernel_of(const Symbol& m, const GridSpec& grid) {
  require_in_window(m, grid);
  const auto values = m.sample(grid);
  Field spatial = inverse_transform(Field(grid, Domain::frequency, *values));
  return Kernel(grid, {spatial.samples().begin(), spatial.samples().end()}, m.name());
}

Field convolve(const Kernel& kernel, const Field& f) {
  if (f.domain() != Domain::spatial) throw UsageError("convolve expects a spatial field");
  if (!(kernel.grid() == f.grid())) throw UsageError("kernel and field live on different grids");
  const Field kh = forward_transform(kernel.as_field());
  const Field fh = forward_transform(f);
  return inverse_transform(fh.pointwise(kh.samples()));
}

namespace {

// Periodic central difference of order 0..2 along one axis.
std::vector<cplx> difference(std::span<const cplx> in, const GridSpec& g, int axis, int order) {
  std::vector<cplx> out(in.begin(), in.end());
  if (order == 0) return out;
  const std::size_t m = g.points_per_axis();
  const double h = g.spacing();
  for (std::size_t k = 0; k < in.size(); ++k) {
    auto idx = g.unflatten(k);
    auto up = idx;
    auto down = idx;
    up[axis] = (idx[axis] + 1) % m;
    down[axis] = (idx[axis] + m - 1) % m;
    const cplx fu = in[g.flatten(up[0], up[1])];
    const cplx fd = in[g.flatten(down[0], down[1])];
    out[k] = order == 1 ? (fu - fd) / (2.0 * h) : (fu - 2.0 * in[k] + fd) / (h * h);
  }
  return out;
}

}  // namespace

double schwartz_seminorm(const Kernel& kernel, int alpha0, int beta0) {
  const GridSpec& g = kernel.grid();
  const int d = g.dimension();
  if (beta0 < 0 || beta0 > 2) throw UsageError("seminorm derivative order must be in [0, 2]");
  if (alpha0 < 0 || alpha0 > d + 1) throw UsageError("seminorm moment order must be in [0, d+1]");

  // All multi-indices with |index| <= order in d variables.
  auto multi = [d](int order) {
    std::vector<std::array<int, 2>> out;
    for (int a = 0; a <= order; ++a)
      for (int b = 0; b <= (d == 2 ? order - a : 0); ++b) out.push_back({a, b});
    return out;
  };

  double total = 0.0;
  for (const auto& beta : multi(beta0)) {
    std::vector<cplx> deriv = difference(kernel.samples(), g, 0, beta[0]);
    if (d == 2) deriv = difference(deriv, g, 1, beta[1]);
    for (const auto& alpha : multi(alpha0)) {
      double sup = 0.0;
      for (std::size_t k = 0; k < deriv.size(); ++k) {
        const Point x = g.position(k);
        double moment = std::pow(std::abs(x[0]), alpha[0]);
        if (d == 2) moment *= std::pow(std::abs(x[1]), alpha[1]);
        sup = std::max(sup, moment * std::abs(deriv[k]));
      }
      total += sup;
    }
  }
  return total;
}

DenseOperator::DenseOperator(std::size_t n, std::vector<cplx> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw UsageError("dense operator entry count mismatch");
}

std::vector<cplx> DenseOperator::multiply(std::span<const cplx> v) const {
  if (v.size() != n_) throw UsageError("dense operator applied to vector of wrong length");
  std::vector<cplx> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += entries_[i * n_ + j] * v[j];
    out[i] = acc;
  }
  return out;
}

DenseOperator dense_oracle(const Symbol& m, const GridSpec& grid) {
  const std::size_t n = grid.size();
  if (n > DenseOperator::max_size)
    throw UsageError("dense oracle limited to M^d <= 4096, grid has " + std::to_string(n));
  std::vector<cplx> entries(n * n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<cplx> basis(n);
    basis[col] = 1.0;
    const Field out = apply(m, Field(grid, Domain::spatial, std::move(basis)));
    for (std::size_t row = 0; row < n; ++row) entries[row * n + col] = out[row];
  }
  return DenseOperator(n, std::move(entries));
}

}  // namespace riesz
