#pragma once

#include <optional>
#include <vector>

#include "riesz/multiplier.hpp"
#include "riesz/symbol.hpp"

namespace riesz {

enum class Direction { forward, reverse };

const char* to_string(Direction d);

/// min(|z/2|^{1/delta}, 1) / 4: half-way into the admissible interval
/// (0, min(|z/2|^{1/delta}, 1) / 2).
double choose_r0(cplx z, double delta);

/// Upper end of the admissible r0 interval for z.
double r0_upper_bound(cplx z, double delta);

/// sum_{n >= first} n^alpha0 q^n, summed until the geometric remainder bound
/// drops below 1e-15; that remainder bound is included in the result.
double polygeometric_tail(double q, int alpha0, int first);

/// Parameters of one resolvent decomposition.
struct NeumannPlan {
  cplx z;
  double delta;
  double r0;
  int n0;          // last index kept in the finite sum; n0 > alpha0 / delta
  int truncation;  // last index folded into the tail kernel, >= n0 + 1
  int alpha0;
  int beta0;
  Direction direction;

  /// Plan with the default policies: r0 from choose_r0, alpha0 = d + 1,
  /// beta0 = 0, n0 the least integer above alpha0/delta, and truncation the
  /// smallest T with certified tail <= tail_tolerance.
  static NeumannPlan make(cplx z, double delta, int dimension, Direction direction,
                          std::optional<double> r0 = std::nullopt,
                          std::optional<int> truncation = std::nullopt,
                          double tail_tolerance = 1e-10);

  /// |z|^{-1} (2 r0)^delta.
  double contraction_ratio() const;

  /// Throws UsageError if any invariant fails.
  void validate() const;
};

/// Certified sup-norm bound on the symbol terms discarded beyond plan.truncation.
/// Forward: sum_{n>T} |z|^{-n-1} (2 r0)^{n delta}.
/// Reverse: |z| sum_{n>T} qt^n with qt the measured contraction value.
double certified_tail(const NeumannPlan& plan, double measured_contraction = 0.0);

/// The C-free majorant series of the kernel seminorms beyond the truncation:
/// sum_{n>T} n^alpha0 q^n with q = contraction_ratio().
double tail_kernel_bound(const NeumannPlan& plan);

struct Decomposition {
  NeumannPlan plan;
  GridSpec grid;
  CutoffPair cutoffs;

  /// Forward: m1 = (z - b) psi1. Reverse: unused (zero).
  Symbol localized;
  /// Forward: m21 = z^{-1} sum_{n=0}^{N0} z^{-n} b^n psi2.
  /// Reverse: m31 = -z0 sum_{n=1}^{N0} (1 - z0 (z0 - b)^{-1})^n psi2.
  Symbol finite_sum;
  /// Forward: z^{-1} (1 - psi1 - psi2). Reverse: unused (zero).
  Symbol remainder;
  /// Terms N0+1..T folded into one convolution kernel.
  Kernel tail;
  /// Forward: the resolvent symbol. Reverse: b psi2.
  Symbol target;

  double certified_tail_bound;
  /// Reverse only: sup over grid frequencies in supp psi2 of |1 - z0 (z0 - b)^{-1}|.
  double contraction;
  /// sup over the grid of |composite - target|.
  double reconstruction_error;

  /// Composite symbol sampled on the grid (tail taken from the kernel's transform).
  std::vector<cplx> composite_samples() const;

  /// Applies the decomposition as an operator, using the operator-combination
  /// form of the finite sum (powers of B_delta or of the resolvent applied to
  /// Psi2 f) rather than the summed symbol.
  Field apply_composite(const Field& f) const;
};

Decomposition forward_decomposition(const NeumannPlan& plan, const GridSpec& grid);
Decomposition reverse_decomposition(const NeumannPlan& plan, const GridSpec& grid);

struct KernelTerm {
  int n;
  Kernel kernel;
  double seminorm;
};

/// K_n = inverse transform of (1 - |xi|^2)_+^{n delta} psi2, with its
/// S_{alpha0, beta0} seminorm.
KernelTerm kernel_sequence(const NeumannPlan& plan, const GridSpec& grid, int n);

}  // namespace riesz
