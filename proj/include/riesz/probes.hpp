#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riesz/grid.hpp"
#include "riesz/norms.hpp"
#include "riesz/symbol.hpp"

namespace riesz {

/// xi0 with (1 - |xi0|^2)_+^delta = lambda, placed on the first axis.
/// lambda = 0 maps to |xi0| = 2, outside the unit ball where B_delta vanishes.
Point lambda_to_xi0(double lambda, double delta);

/// Approximate-eigenfunction experiment for lambda I - B_delta.
struct ProbeSpec {
  double lambda = 0.5;
  double p = 2.0;
  double delta = 1.0;
  double rho = 0.5;  // radius of the frequency bump phi0
  std::vector<int> sweep{8, 16, 32, 64, 128};
  std::optional<WeightSpec> weight;
  int dimension = 1;
  /// Grid to use instead of the automatic sizing rule.
  std::optional<GridSpec> grid;

  void validate() const;
  int max_n() const;
};

/// Realized geometry of a probe sweep: grid, lattice-snapped centre and the
/// achieved spectral value at that centre.
struct ProbeGeometry {
  GridSpec grid;
  Point xi0;
  double requested_lambda;
  double achieved_lambda;
  double snap_error;
  double localizer_radius;  // radius of the localizer around xi0
  int min_n;                // smallest N whose bump fits inside the localizer
};

/// L = max(16 N_max max(1, rho) / rho, 8 pi N_max / rho); M the smallest power of
/// two with frequency half-width >= max(4, |xi0| + rho + 1).
GridSpec probe_grid(double rho, int max_n, double xi0_norm, int dimension);

ProbeGeometry probe_geometry(const ProbeSpec& spec);

/// Spatial field with transform phi0(N (xi - xi0)) on the lattice.
/// Throws UsageError if the bump spans fewer than 4 lattice cells.
Field probe_field(const Point& xi0, int n, const GridSpec& grid, double rho);

/// ||(lambda I - B_delta) f_N|| / ||f_N|| in L^p, or weighted L^p if spec.weight is set.
double probe_ratio(const ProbeSpec& spec, int n);
double probe_ratio(const ProbeSpec& spec, const ProbeGeometry& geometry, int n);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct DecayCurve {
  ProbeGeometry geometry;
  std::vector<int> n;
  std::vector<double> ratio;
  double slope;
};

DecayCurve decay_curve(const ProbeSpec& spec);

/// Weighted probe with the two upper-bound quantities and the lower bound
/// that appear in the weighted-space argument.
struct WeightedProbeReport {
  int n;
  double ratio;
  double p_norm_of_probe;       // ||f_N||_{p,w}^p with f_N the baseband probe
  double decay_term;            // N^{-p/2}
  double mass_term;             // N^{-(d+1/2)p} w([-N, N]^d)
  double lower_bound;           // 2^{-p} N^{-dp} w([-eps0 N, eps0 N]^d) <= p_norm_of_probe
  double envelope;              // ratio^p / (decay_term + mass_term / p_norm_of_probe)
};

/// Largest radius eps0 with |phi0^v(x)| >= |phi0^v(0)| / 2 for |x| <= eps0.
double half_height_radius(double rho, int dimension);

WeightedProbeReport weighted_probe_ratio(const ProbeSpec& spec, int n);

/// Rectangle in the complex plane sampled at n_re x n_im points (inclusive ends).
struct ZGrid {
  double re_min = -0.5, re_max = 1.5;
  double im_min = -0.5, im_max = 0.5;
  int n_re = 9, n_im = 5;
  std::vector<cplx> points() const;
};

/// sup over the radial frequency lattice (spacing / oversample) of 1 / |z - b_delta|.
double p2_resolvent_oracle(cplx z, double delta, const GridSpec& grid, int oversample = 64);

struct ProbeFamily {
  double rho = 0.5;
  std::vector<int> sweep{8, 16, 32, 64, 128, 256};
  /// Probe centres given by spectral values; the projection of Re z onto
  /// [0, 1] is always added.
  std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct SpectrumCell {
  cplx z;
  bool pole;
  double lower_bound;
  double oracle_p2;
};

SpectrumCell spectrum_point(cplx z, double p, double delta, const ProbeFamily& family,
                            const GridSpec& oracle_grid);

std::vector<SpectrumCell> spectrum_map(const ZGrid& zs, double p, double delta,
                                       const ProbeFamily& family, const GridSpec& oracle_grid,
                                       int workers = 1);

}  // namespace riesz
