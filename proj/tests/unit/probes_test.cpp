#include <cmath>

#include <gtest/gtest.h>

#include "riesz/probes.hpp"

using namespace riesz;

namespace {

ProbeSpec spec_for(double lambda, double p, std::vector<int> sweep = {8, 16, 32, 64, 128}) {
  ProbeSpec s;
  s.lambda = lambda;
  s.p = p;
  s.sweep = std::move(sweep);
  return s;
}

}  // namespace

TEST(LambdaToXi0, Examples) {
  EXPECT_EQ(lambda_to_xi0(1.0, 1.0)[0], 0.0);
  EXPECT_NEAR(lambda_to_xi0(0.75, 1.0)[0], 0.5, 1e-15);
  EXPECT_NEAR(lambda_to_xi0(0.25, 2.0)[0], std::sqrt(0.5), 1e-15);
  EXPECT_EQ(lambda_to_xi0(0.0, 1.0)[0], 2.0);
  EXPECT_THROW(lambda_to_xi0(1.5, 1.0), UsageError);
}

TEST(LambdaToXi0, InvertsTheSymbol) {
  for (double delta : {0.3, 1.0, 2.5})
    for (int i = 1; i <= 100; ++i) {
      const double lambda = i / 100.0;
      const double r = lambda_to_xi0(lambda, delta)[0];
      EXPECT_NEAR(std::pow(1 - r * r, delta), lambda, 1e-12);
    }
}

TEST(Geometry, SnappedCentreAndMinimumN) {
  const ProbeGeometry g = probe_geometry(spec_for(0.25, 2.0));
  const double t = g.xi0[0] / g.grid.frequency_spacing();
  EXPECT_EQ(t, std::round(t));
  EXPECT_LE(g.snap_error, g.grid.frequency_spacing() / 2);
  EXPECT_NEAR(g.achieved_lambda, 0.25, 2 * g.grid.frequency_spacing());
  EXPECT_EQ(g.min_n, 8);
  EXPECT_GE(g.grid.frequency_half_width(), 4.0);
  // Every swept bump stays inside the localizer.
  for (int n : {8, 16, 32, 64, 128}) EXPECT_LE(0.5 / n, g.localizer_radius);
  ProbeSpec too_small = spec_for(0.25, 2.0, {4, 8});
  EXPECT_THROW(probe_ratio(too_small, 4), UsageError);
}

TEST(ProbeField, ModulationIdentity) {
  const GridSpec g = probe_grid(0.5, 64, 0.8, 1);
  const Point xi0{std::round(0.8 / g.frequency_spacing()) * g.frequency_spacing(), 0.0};
  for (int n : {8, 32}) {
    const Field shifted = probe_field(xi0, n, g, 0.5);
    const Field base = modulate(probe_field({0.0, 0.0}, n, g, 0.5), std::span<const double>(xi0.data(), 1));
    EXPECT_LE(max_abs_difference(shifted.samples(), base.samples()), 1e-12 * max_abs(base.samples()));
  }
}

// Oracle: Parseval on the shrinking bump, N ||f_N||_2^2 is constant.
TEST(ProbeField, L2NormScalesLikeInverseSqrtN) {
  const GridSpec g = probe_grid(0.5, 128, 0.0, 1);
  double first = 0.0;
  for (int n : {8, 16, 32, 64, 128}) {
    const double scaled = std::sqrt(double(n)) * lp_norm(probe_field({0.0, 0.0}, n, g, 0.5), 2.0);
    if (first == 0.0) first = scaled;
    EXPECT_NEAR(scaled / first, 1.0, 0.02) << "N=" << n;
  }
}

TEST(ProbeField, TransformSupportedInBall) {
  const GridSpec g = probe_grid(0.5, 32, 0.5, 1);
  const Point xi0{std::round(0.5 / g.frequency_spacing()) * g.frequency_spacing(), 0.0};
  const Field spectrum = forward_transform(probe_field(xi0, 16, g, 0.5));
  const double peak = max_abs(spectrum.samples());
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g.frequency_point(k)[0] - xi0[0]) > 0.5 / 16) EXPECT_LE(std::abs(spectrum[k]), 1e-12 * peak);
}

TEST(ProbeField, RejectsUnresolvedBump) {
  const GridSpec g(1, 1024, 10.0);
  EXPECT_THROW(probe_field({0.0, 0.0}, 64, g, 0.5), UsageError);
}

TEST(ProbeRatio, AnnihilatedAtLambdaZero) {
  for (double p : {1.0, 2.0, 4.0}) {
    const ProbeSpec s = spec_for(0.0, p);
    for (int n : s.sweep) EXPECT_LE(probe_ratio(s, n), 1e-12);
  }
}

// Oracle: Plancherel bound by the sup of |lambda - b| over the bump's support.
TEST(ProbeRatio, PlancherelBound) {
  const ProbeSpec s = spec_for(0.5, 2.0);
  const ProbeGeometry g = probe_geometry(s);
  double sup = 0.0;
  for (int i = -10000; i <= 10000; ++i) {
    const double xi = g.xi0[0] + (0.5 / 32) * i / 10000.0;
    sup = std::max(sup, std::abs(0.5 - std::max(0.0, 1 - xi * xi)));
  }
  EXPECT_LE(probe_ratio(s, g, 32), sup);
}

TEST(ProbeRatio, HalvingAcrossExponents) {
  for (double p : {1.0, 2.0, 4.0}) {
    const ProbeSpec s = spec_for(0.5, p, {8, 16, 32, 64});
    const ProbeGeometry g = probe_geometry(s);
    double previous = probe_ratio(s, g, 8);
    for (int n : {16, 32, 64}) {
      const double r = probe_ratio(s, g, n);
      EXPECT_LE(r / previous, 0.8) << "p=" << p << " N=" << n;
      previous = r;
    }
  }
}

TEST(DecayCurve, Slopes) {
  for (double lambda : {0.25, 0.5, 0.75}) EXPECT_LE(decay_curve(spec_for(lambda, 2.0)).slope, -0.9);
  EXPECT_LE(decay_curve(spec_for(1.0, 2.0)).slope, -1.8);
  for (double p : {1.0, 4.0}) EXPECT_LT(decay_curve(spec_for(0.5, p)).slope, 0.0);
}

TEST(DecayCurve, OffSpectrumDoesNotDecay) {
  for (double lambda : {1.5, -0.5}) {
    const DecayCurve c = decay_curve(spec_for(lambda, 2.0));
    for (double r : c.ratio) EXPECT_GE(r, 0.45);
  }
}

TEST(LogLogSlope, ExactPowerLaw) {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{3, 3.0 / 8, 3.0 / 64, 3.0 / 512};
  EXPECT_NEAR(loglog_slope(x, y), -3.0, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope(x, std::vector<double>{1, 0, 1, 1})));
}

TEST(HalfHeight, MatchesGridProfile) {
  const double eps0 = half_height_radius(0.5, 1);
  const GridSpec g = probe_grid(0.5, 8, 0.0, 1);
  const Field f = probe_field({0.0, 0.0}, 1, g, 0.5);
  const double peak = std::abs(f[g.points_per_axis() / 2]);
  EXPECT_NEAR(peak, 1.0, 1e-8);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = std::abs(g.position(k)[0]);
    if (x <= eps0) EXPECT_GE(std::abs(f[k]), peak / 2 - 1e-9);
    if (x > eps0 * 1.01 && x < eps0 * 1.2) EXPECT_LT(std::abs(f[k]), peak / 2);
  }
}

TEST(Weighted, UnitWeightMatchesUnweighted) {
  ProbeSpec plain = spec_for(0.5, 2.0, {8, 16, 32, 64});
  ProbeSpec weighted = plain;
  weighted.weight = WeightSpec{0.0, 2.0};
  for (int n : plain.sweep) EXPECT_NEAR(probe_ratio(weighted, n), probe_ratio(plain, n), 1e-12);
}

TEST(Weighted, SqrtWeightHalving) {
  ProbeSpec s = spec_for(0.5, 2.0, {8, 16, 32, 64});
  s.weight = WeightSpec{0.5, 2.0};
  std::vector<WeightedProbeReport> reports;
  for (int n : s.sweep) reports.push_back(weighted_probe_ratio(s, n));
  for (std::size_t i = 1; i < reports.size(); ++i) {
    EXPECT_LE(reports[i].ratio / reports[i - 1].ratio, 0.85);
    // The recorded constant is monotone and bounded across the sweep.
    EXPECT_LE(reports[i].envelope, reports[i - 1].envelope);
  }
  for (const auto& r : reports) {
    EXPECT_TRUE(std::isfinite(r.envelope));
    EXPECT_GT(r.lower_bound, 0.0);
    EXPECT_LE(r.lower_bound, r.p_norm_of_probe);
  }
}

TEST(Oracle, RealAxisAndVerticalLine) {
  const GridSpec g(1, 1024, 32.0);
  EXPECT_NEAR(p2_resolvent_oracle(2.0, 1.0, g), 1.0, 1e-12);
  for (double eps : {0.1, 0.05, 0.025})
    EXPECT_NEAR(p2_resolvent_oracle(cplx(0.5, eps), 1.0, g) * eps, 1.0, 0.01);
  double previous = 0.0;
  for (double eps : {0.4, 0.2, 0.1, 0.05, 0.02, 0.01}) {
    const double v = p2_resolvent_oracle(cplx(0.3, eps), 1.0, g);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

TEST(SpectrumMap, PolesAndLowerBounds) {
  ZGrid zs;
  zs.re_min = 0.5, zs.re_max = 2.0, zs.n_re = 2;
  zs.im_min = 0.0, zs.im_max = 0.1, zs.n_im = 2;
  ProbeFamily fam;
  fam.sweep = {8, 16, 32};
  const auto cells = spectrum_map(zs, 2.0, 1.0, fam, GridSpec(1, 1024, 32.0), 2);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_TRUE(cells[0].pole);  // z = 0.5
  EXPECT_TRUE(std::isnan(cells[0].lower_bound));
  for (std::size_t i = 1; i < cells.size(); ++i) {
    EXPECT_FALSE(cells[i].pole);
    // A probe lower bound never exceeds the true p = 2 norm.
    EXPECT_LE(cells[i].lower_bound, cells[i].oracle_p2 * (1 + 1e-9));
    EXPECT_GT(cells[i].lower_bound, 0.0);
  }
}
