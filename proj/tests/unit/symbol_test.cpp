#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "riesz/symbol.hpp"

using namespace riesz;

namespace {

cplx at(const Symbol& m, double x, double y = 0.0, int d = 1) {
  const double xi[2] = {x, y};
  return m(std::span<const double>(xi, static_cast<std::size_t>(d)));
}

// Independent smoothstep, written from the defining formula.
double eta_ref(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
  return a / (a + b);
}

}  // namespace

TEST(SmoothTransition, EndpointsRangeAndSymmetry) {
  EXPECT_EQ(smooth_transition(0.0), 0.0);
  EXPECT_EQ(smooth_transition(-3.0), 0.0);
  EXPECT_EQ(smooth_transition(1.0), 1.0);
  EXPECT_EQ(smooth_transition(7.0), 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng);
    const double v = smooth_transition(t);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v + smooth_transition(1 - t), 1.0, 1e-15);
    EXPECT_NEAR(v, eta_ref(t), 1e-15);
  }
}

TEST(BumpProfile, FlatInsideZeroOutside) {
  BumpProfile b(0.5, 1.5);
  EXPECT_EQ(b(0.0), 1.0);
  EXPECT_EQ(b(0.5), 1.0);
  EXPECT_EQ(b(1.5), 0.0);
  EXPECT_EQ(b(9.0), 0.0);
  EXPECT_GT(b(1.0), 0.0);
  EXPECT_LT(b(1.0), 1.0);
  EXPECT_THROW(BumpProfile(1.0, 1.0), UsageError);
}

TEST(Bochner, Examples) {
  for (double delta : {0.25, 1.0, 3.0}) {
    const Symbol b = bochner_symbol(delta);
    EXPECT_EQ(at(b, 0.0), 1.0);
    EXPECT_EQ(at(b, 1.0), 0.0);
    EXPECT_EQ(at(b, 1.7), 0.0);
    EXPECT_EQ(at(b, 0.6, 0.9, 2), 0.0);
    EXPECT_EQ(b.support_radius(), 1.0);
  }
  EXPECT_NEAR(at(bochner_symbol(1.0), 0.5).real(), 0.75, 1e-15);
  EXPECT_NEAR(at(bochner_symbol(1.0), 0.3, 0.4, 2).real(), 0.75, 1e-15);
}

TEST(Resolvent, Examples) {
  for (double delta : {0.5, 1.0, 2.0}) {
    const Symbol r = resolvent_symbol(2.0, delta);
    EXPECT_NEAR(std::abs(at(r, 1.0) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(at(r, 4.0) - 0.5), 0.0, 1e-15);
  }
  EXPECT_NEAR(std::abs(at(resolvent_symbol(2.0, 1.0), 0.0) - 1.0), 0.0, 1e-15);
  EXPECT_THROW(resolvent_symbol(0.5, 1.0), PoleError);
  EXPECT_THROW(resolvent_symbol(0.0, 1.0), PoleError);
  EXPECT_NO_THROW(resolvent_symbol(cplx(0.5, 1e-3), 1.0));
}

TEST(Resolvent, FiniteOnRandomFrequencies) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const cplx z(u(rng), u(rng) + 0.01);
    const Symbol r = resolvent_symbol(z, 1.0);
    const double xi = u(rng);
    const cplx v = at(r, xi);
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
    EXPECT_LE(std::abs(v), 1.0 / distance_to_unit_interval(z) + 1e-12);
  }
}

TEST(CutoffPair, Examples) {
  const CutoffPair c = cutoff_pair(0.25);
  EXPECT_EQ(at(c.inner, 0.0), 1.0);
  EXPECT_EQ(at(c.inner, 0.75), 1.0);
  EXPECT_EQ(at(c.inner, 1.0), 0.0);
  EXPECT_EQ(at(c.inner, 1.0) + at(c.outer, 1.0), 1.0);
  EXPECT_EQ(at(c.outer, 1.5), 0.0);
  EXPECT_EQ(at(c.outer, 1.25), 0.0);
  EXPECT_EQ(at(c.outer, 0.7), 0.0);
  EXPECT_THROW(cutoff_pair(0.5), UsageError);
  EXPECT_THROW(cutoff_pair(0.0), UsageError);
}

TEST(CutoffPair, SumIsOneUpToOnePlusHalfR0) {
  for (double r0 : {0.05, 0.25, 0.45}) {
    const CutoffPair c = cutoff_pair(r0);
    for (int i = 0; i <= 1000; ++i) {
      const double r = (1 + r0 / 2) * i / 1000.0;
      EXPECT_EQ(at(c.inner, r) + at(c.outer, r), 1.0) << "r0=" << r0 << " r=" << r;
    }
  }
}

TEST(BumpPhi0, SupportAndPositivity) {
  for (double rho : {0.3, 0.5, 2.0}) {
    const Symbol phi = bump_phi0(rho, 1);
    EXPECT_EQ(at(phi, 1.1 * rho), 0.0);
    EXPECT_GT(at(phi, 0.0).real(), 0.0);
  }
}

// Oracle: (2 pi)^{-d} * integral of the bump by a fine midpoint Riemann sum of
// the independently written profile, scaled by the library's normalization.
TEST(BumpPhi0, InverseTransformAtOriginIsOne) {
  for (int d : {1, 2}) {
    for (double rho : {0.25, 0.5, 1.5}) {
      const Symbol phi = bump_phi0(rho, d);
      const double scale = at(phi, 0.0).real();
      const int n = 200000;
      const double dr = rho / n;
      double integral = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) * dr;
        const double profile = 1.0 - eta_ref(r / rho);
        integral += profile * (d == 1 ? 2.0 : 2 * std::numbers::pi * r) * dr;
      }
      const double value = scale * integral / std::pow(2 * std::numbers::pi, d);
      EXPECT_NEAR(value, 1.0, 1e-8) << "d=" << d << " rho=" << rho;
      EXPECT_NEAR(bump_phi0_scale(rho, d), scale, 1e-15);
    }
  }
}

TEST(CriticalDelta, Examples) {
  EXPECT_EQ(critical_delta(2.0, 1), 0.0);
  EXPECT_EQ(critical_delta(2.0, 2), 0.0);
  EXPECT_EQ(critical_delta(2.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(critical_delta(1.0, 2), 0.5);
  EXPECT_EQ(critical_delta(1.0, 1), 0.0);
  EXPECT_THROW(critical_delta(0.5, 1), UsageError);
}

TEST(Symbol, SupportIsHonouredExactly) {
  const Symbol wide = Symbol::radial("wide", [](double) { return cplx(3.0); }, 0.5, Smoothness::bounded);
  EXPECT_EQ(at(wide, 0.49), 3.0);
  EXPECT_EQ(at(wide, 0.51), 0.0);
  GridSpec g(1, 64, 8.0);
  const auto s = wide.sample(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g.frequency_point(k)[0]) > 0.5) EXPECT_EQ((*s)[k], 0.0);
}

TEST(Symbol, LinearCombinationAndProduct) {
  const Symbol b = bochner_symbol(1.0);
  const Symbol r = resolvent_symbol(2.0, 1.0);
  const Symbol c = Symbol::linear_combination({{2.0, b}, {cplx(0, 1), r}});
  const Symbol p = b * r;
  for (double xi : {0.0, 0.3, 0.9, 1.4}) {
    EXPECT_NEAR(std::abs(at(c, xi) - (2.0 * at(b, xi) + cplx(0, 1) * at(r, xi))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(at(p, xi) - at(b, xi) * at(r, xi)), 0.0, 1e-15);
  }
  EXPECT_EQ(p.support_radius(), 1.0);
}

TEST(Mikhlin, ConstantSymbol) {
  GridSpec g(1, 256, 16.0);
  const MikhlinReport rep = mikhlin_check(Symbol::constant(1.0), g, 2);
  ASSERT_EQ(rep.orders.size(), 3u);
  EXPECT_EQ(rep.orders[0].sup_coarse, 1.0);
  EXPECT_EQ(rep.orders[1].sup_coarse, 0.0);
  EXPECT_EQ(rep.orders[2].sup_fine, 0.0);
  EXPECT_TRUE(rep.pass());
}

// Oracle: evaluate on two refinements and compare.
TEST(Mikhlin, ResolventIsRefinementStable) {
  GridSpec g(1, 256, 16.0);
  const MikhlinReport rep = mikhlin_check(resolvent_symbol(2.0, 1.0), g, 1);
  for (const auto& o : rep.orders) {
    EXPECT_TRUE(std::isfinite(o.sup_coarse));
    EXPECT_TRUE(std::isfinite(o.sup_fine));
    EXPECT_LE(o.growth, 2.0) << "k=" << o.k;
    EXPECT_FALSE(o.unbounded_suspect);
  }
  EXPECT_TRUE(rep.pass());
}

TEST(Mikhlin, SquareRootBochnerIsFlagged) {
  GridSpec g(1, 256, 16.0);
  const MikhlinReport rep = mikhlin_check(bochner_symbol(0.5), g, 1);
  ASSERT_EQ(rep.orders.size(), 2u);
  EXPECT_TRUE(rep.orders[1].unbounded_suspect);
  EXPECT_GT(rep.orders[1].growth, 10.0);
  EXPECT_FALSE(rep.pass());
}

TEST(Mikhlin, TwoDimensionalSmoothBump) {
  GridSpec g(2, 64, 16.0);
  const MikhlinReport rep = mikhlin_check(bump_phi0(0.5, 2), g, 2);
  EXPECT_TRUE(rep.pass());
}
