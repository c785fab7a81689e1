#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "riesz/neumann.hpp"
#include "riesz/norms.hpp"
#include "riesz/sample_fields.hpp"

using namespace riesz;

namespace {

const GridSpec kGrid(1, 1024, 32.0);

NeumannPlan plan_at(cplx z, Direction dir, std::optional<int> t = std::nullopt) {
  return NeumannPlan::make(z, 1.0, 1, dir, 0.25, t);
}

}  // namespace

TEST(ChooseR0, Examples) {
  EXPECT_DOUBLE_EQ(r0_upper_bound(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(choose_r0(2.0, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(choose_r0(-1.0, 1.0), 0.125);
  EXPECT_DOUBLE_EQ(choose_r0(10.0, 1.0), 0.25);  // capped by the unit radius
}

// Oracle: direct evaluation of q on a z-grid off [0, 1].
TEST(ChooseR0, ContractionBelowOneOnZGrid) {
  for (double delta : {0.25, 0.5, 1.0, 2.0, 4.0})
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        const cplx z(0.15 * i + 0.5, 0.15 * j);
        if (distance_to_unit_interval(z) < 1e-3) continue;
        const double r0 = choose_r0(z, delta);
        EXPECT_GT(r0, 0.0);
        EXPECT_LT(r0, r0_upper_bound(z, delta));
        EXPECT_LT(std::pow(2 * r0, delta) / std::abs(z), 1.0) << z << " delta=" << delta;
      }
}

TEST(Plan, DefaultsAtZEqualsTwo) {
  const NeumannPlan p = NeumannPlan::make(2.0, 1.0, 1, Direction::forward);
  EXPECT_EQ(p.alpha0, 2);
  EXPECT_EQ(p.beta0, 0);
  EXPECT_EQ(p.n0, 3);
  EXPECT_DOUBLE_EQ(p.contraction_ratio(), 0.25);
  EXPECT_LE(certified_tail(p), 1e-10);
  NeumannPlan shorter = p;
  --shorter.truncation;
  EXPECT_GT(certified_tail(shorter), 1e-10);
}

TEST(Plan, ValidationRejectsBadParameters) {
  EXPECT_THROW(NeumannPlan::make(2.0, 1.0, 1, Direction::forward, 0.5), UsageError);
  EXPECT_THROW(NeumannPlan::make(0.5, 1.0, 1, Direction::forward), PoleError);
  NeumannPlan p = plan_at(2.0, Direction::forward);
  p.n0 = 2;  // alpha0 / delta = 2 is not exceeded
  EXPECT_THROW(p.validate(), UsageError);
  p = plan_at(2.0, Direction::forward);
  p.truncation = p.n0;
  EXPECT_THROW(p.validate(), UsageError);
}

TEST(TailBound, PureGeometricValue) {
  EXPECT_NEAR(polygeometric_tail(0.25, 0, 41), std::pow(0.25, 41) / 0.75, 1e-13 * std::pow(0.25, 41));
}

TEST(TailBound, MonotoneInTruncationAndDominatedInAlpha) {
  NeumannPlan p = plan_at(2.0, Direction::forward, 10);
  double previous = tail_kernel_bound(p);
  for (int t = 11; t < 60; ++t) {
    p.truncation = t;
    const double v = tail_kernel_bound(p);
    EXPECT_LT(v, previous);
    previous = v;
    for (int a = 0; a <= 2; ++a)
      EXPECT_GE(polygeometric_tail(0.25, 2, t + 1), polygeometric_tail(0.25, a, t + 1) * (1 - 1e-15));
  }
}

// Oracle: closed-form geometric tail sum_{n>40} 2^{-n-1} 0.5^n.
TEST(Forward, ReconstructionWithinClosedFormTail) {
  const Decomposition d = forward_decomposition(plan_at(2.0, Direction::forward, 40), kGrid);
  double tail = 0.0;
  for (int n = 41; n < 400; ++n) tail += std::pow(2.0, -n - 1) * std::pow(0.5, n);
  EXPECT_LT(tail, 1e-12);
  EXPECT_LE(d.reconstruction_error, tail + 1e-15);
  EXPECT_LE(d.reconstruction_error, d.certified_tail_bound + 1e-15);
}

TEST(Forward, SupportBookkeeping) {
  const NeumannPlan plan = NeumannPlan::make(cplx(-0.5, 0.7), 1.0, 1, Direction::forward);
  const Decomposition d = forward_decomposition(plan, kGrid);
  const auto composite = d.composite_samples();
  const auto m1 = d.localized.sample(kGrid);
  const auto m21 = d.finite_sum.sample(kGrid);
  const Field tail = forward_transform(d.tail.as_field());
  const Symbol r = resolvent_symbol(plan.z, plan.delta);
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    const double xi = std::abs(kGrid.frequency_point(k)[0]);
    if (xi <= 1 - plan.r0) {
      EXPECT_EQ((*m21)[k], 0.0);
      EXPECT_LE(std::abs(tail[k]), 1e-12);
      EXPECT_NEAR(std::abs((*m1)[k] - r.at_radius(xi)), 0.0, 1e-14);
    }
    if (xi > 1 + plan.r0) EXPECT_NEAR(std::abs(composite[k] - 1.0 / plan.z), 0.0, 1e-14);
  }
}

TEST(Forward, OperatorLevelAgreement) {
  const Decomposition d = forward_decomposition(plan_at(2.0, Direction::forward), kGrid);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field f = random_band_limited(kGrid, 4.0, seed);
    const Field ref = apply(d.target, f);
    EXPECT_LE(lp_norm(d.apply_composite(f) - ref, 2.0) / lp_norm(ref, 2.0), 1e-8);
  }
}

TEST(Forward, ComplexZ) {
  for (cplx z : {cplx(-1.0, 0.0), cplx(1.0, 1.0), cplx(0.5, 0.25)}) {
    const Decomposition d = forward_decomposition(NeumannPlan::make(z, 1.0, 1, Direction::forward), kGrid);
    EXPECT_LE(d.reconstruction_error, d.certified_tail_bound + 1e-10) << z;
  }
}

TEST(KernelSequence, RatiosAndRealness) {
  NeumannPlan plan = plan_at(2.0, Direction::forward);
  plan.alpha0 = 2;
  plan.beta0 = 0;
  const GridSpec g(1, 1024, 64.0);
  double previous = 0.0;
  for (int n = 20; n <= 61; ++n) {
    const KernelTerm t = kernel_sequence(plan, g, n);
    EXPECT_LE(t.kernel.imaginary_residue(), 1e-10);
    if (previous > 0.0)
      EXPECT_LE(t.seminorm / previous, 0.5 * std::pow(double(n) / (n - 1), 2) * 1.1) << "n=" << n;
    previous = t.seminorm;
  }
}

// The sup of b on supp psi2 is 1 - (1 - r0)^2 = 0.4375, which caps the
// geometric rate of s_n from above.
TEST(KernelSequence, GeometricRateCappedBySupOfSymbolOnCutoff) {
  NeumannPlan plan = plan_at(2.0, Direction::forward);
  plan.alpha0 = 2;
  const GridSpec g(1, 1024, 64.0);
  const double s20 = kernel_sequence(plan, g, 20).seminorm;
  const double s60 = kernel_sequence(plan, g, 60).seminorm;
  EXPECT_LE(std::log(s60 / s20) / 40.0, std::log(0.4375));
}

TEST(Reverse, ContractionAndReconstruction) {
  const Decomposition d = reverse_decomposition(plan_at(2.0, Direction::reverse, 60), kGrid);
  const double q = 0.25;
  EXPECT_LE(d.contraction, q / (1 - q) + 1e-10);
  EXPECT_LE(d.reconstruction_error, 1e-8);
  const auto composite = d.composite_samples();
  EXPECT_LE(std::abs(composite[kGrid.flatten(512)]), 1e-12);  // xi = 0
}

TEST(Reverse, OperatorLevelAgreement) {
  const Decomposition d = reverse_decomposition(plan_at(2.0, Direction::reverse), kGrid);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Field f = random_band_limited(kGrid, 4.0, seed);
    const Field ref = apply(d.target, f);
    EXPECT_LE(lp_norm(d.apply_composite(f) - ref, 2.0) / lp_norm(ref, 2.0), 1e-8);
  }
}
