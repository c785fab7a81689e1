#pragma once

#include <vector>

#include "riesz/grid.hpp"
#include "riesz/symbol.hpp"

namespace riesz {

/// (sum |f(x_j)|^p h^d)^{1/p}, 1 <= p < inf.
double lp_norm(const Field& f, double p);

/// Power weight w(x) = |x|^a considered as an A_p weight.
struct WeightSpec {
  double exponent = 0.0;
  double p = 2.0;

  /// Throws UsageError unless -d < a < d(p-1) (p > 1) or -d < a <= 0 (p = 1).
  void validate(int dimension) const;
  bool admissible(int dimension) const;
  double operator()(const Point& x, int dimension) const;

  /// Grid weights: |x_j|^a, with the central cell using the cell average of |x|^a.
  std::vector<double> sample(const GridSpec& grid) const;

  /// w([-r, r]^d) = integral of |x|^a over the cube.
  double cube_mass(double r, int dimension) const;
};

/// (sum |f(x_j)|^p w_j h^d)^{1/p}.
double weighted_lp_norm(const Field& f, double p, const WeightSpec& w);

/// Average of |x|^b over the axis-aligned cube with the given centre and side.
double power_average(double b, const Point& centre, double side, int dimension);

/// Family of cubes for the A_p estimate: side lengths base * 2^k for k in
/// [min_level, max_level] (step 2^{1/subdivisions}), centres on a lattice of
/// spacing centre_step covering [-centre_extent, centre_extent]^d (always including 0).
struct CubeFamily {
  double base_side = 1.0;
  int min_level = -3;
  int max_level = 3;
  int subdivisions = 1;
  double centre_step = 0.25;
  double centre_extent = 1.0;

  static CubeFamily standard(double half_width);
  /// Twice as many side lengths and centres.
  CubeFamily refined() const;
};

/// Max over the family of (avg_Q w) (avg_Q w^{-1/(p-1)})^{p-1} for p > 1,
/// or (avg_Q w) / inf_Q w for p = 1.
double ap_constant_estimate(const WeightSpec& w, int dimension, const CubeFamily& family);

struct HerzParams {
  double alpha = 0.0;
  double p = 2.0;
  double q = 2.0;
  void validate(int dimension) const;
};

/// ||f chi_{|x|<=1}||_p + (sum_{l=1}^{lmax} 2^{l alpha q} ||f chi_{2^{l-1}<|x|<=2^l}||_p^q)^{1/q},
/// with lmax the largest level whose annulus fits in the grid (2^lmax <= L).
double herz_norm(const Field& f, const HerzParams& params);

/// Dyadic frequency partition phi0^(xi) + sum_{l=1}^{lmax} psi^(2^{-l} xi) = 1 on |xi| <= 2^lmax.
class LPFamily {
 public:
  explicit LPFamily(int max_level);

  int max_level() const { return max_level_; }
  /// Radius up to which the truncated partition is exact.
  double valid_band() const;

  const Symbol& base() const { return base_; }
  const Symbol& annulus() const { return annulus_; }
  /// psi^(2^{-l} xi), the transform of psi_l = 2^{ld} psi(2^l .).
  Symbol level(int l) const;

  /// max |phi0^ + sum_l psi^(2^{-l} .) - 1| over grid frequencies with |xi| <= band.
  double partition_residual(const GridSpec& grid, double band) const;

 private:
  int max_level_;
  Symbol base_;
  Symbol annulus_;
};

LPFamily build_lp_family(int max_level);

double besov_norm(const Field& f, double alpha, double p, double q, const LPFamily& family);
double triebel_norm(const Field& f, double alpha, double p, double q, const LPFamily& family);

}  // namespace riesz
