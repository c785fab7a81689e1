#include "riesz/neumann.hpp"

#include <cmath>
#include <string>

namespace riesz {
namespace {

std::string z_tag(cplx z) {
  return std::to_string(z.real()) + "," + std::to_string(z.imag());
}

// (1 - |xi|^2)_+^{n delta} psi2.
Symbol powered_outer(const Symbol& bochner, const Symbol& psi2, int n) {
  return Symbol::radial(
      "bochner^" + std::to_string(n) + "*" + psi2.name(),
      [bochner, psi2, n](double r) { return std::pow(bochner.at_radius(r), n) * psi2.at_radius(r); },
      psi2.support_radius(), Smoothness::smooth_compact);
}

// (1 - z0 (z0 - b)^{-1})^n psi2.
Symbol contraction_power(const Symbol& bochner, const Symbol& psi2, cplx z0, int n) {
  return Symbol::radial(
      "contraction^" + std::to_string(n) + "*" + psi2.name(),
      [bochner, psi2, z0, n](double r) {
        const cplx u = 1.0 - z0 / (z0 - bochner.at_radius(r));
        return std::pow(u, n) * psi2.at_radius(r);
      },
      psi2.support_radius(), Smoothness::smooth_compact);
}

Kernel scaled_sum(const GridSpec& grid, const std::vector<std::pair<cplx, Kernel>>& terms,
                  std::string provenance) {
  std::vector<cplx> acc(grid.size());
  for (const auto& [c, k] : terms) {
    const auto s = k.samples();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * s[i];
  }
  return Kernel(grid, std::move(acc), std::move(provenance));
}

}  // namespace

const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }

double r0_upper_bound(cplx z, double delta) {
  return std::min(std::pow(std::abs(z / 2.0), 1.0 / delta), 1.0) / 2.0;
}

double choose_r0(cplx z, double delta) {
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  if (distance_to_unit_interval(z) <= 1e-12) throw PoleError("z lies on [0,1]");
  return r0_upper_bound(z, delta) / 2.0;
}

double polygeometric_tail(double q, int alpha0, int first) {
  if (!(q >= 0.0 && q < 1.0)) throw UsageError("polygeometric tail needs 0 <= q < 1");
  if (alpha0 < 0 || first < 1) throw UsageError("polygeometric tail needs alpha0 >= 0, first >= 1");
  if (q == 0.0) return 0.0;
  double sum = 0.0;
  for (long n = first;; ++n) {
    const double nd = static_cast<double>(n);
    const double term = std::exp(alpha0 * std::log(nd) + nd * std::log(q));
    sum += term;
    const double ratio = std::pow((nd + 1.0) / nd, alpha0) * q;
    if (ratio < 1.0) {
      // Term ratios decrease in n, so the rest is dominated by a geometric series.
      const double remainder = term * ratio / (1.0 - ratio);
      if (remainder <= 1e-15 || term == 0.0) return sum + remainder;
    }
  }
}

NeumannPlan NeumannPlan::make(cplx z, double delta, int dimension, Direction direction,
                              std::optional<double> r0, std::optional<int> truncation,
                              double tail_tolerance) {
  NeumannPlan plan;
  plan.z = z;
  plan.delta = delta;
  plan.r0 = r0 ? *r0 : choose_r0(z, delta);
  plan.alpha0 = dimension + 1;
  plan.beta0 = 0;
  plan.n0 = static_cast<int>(std::floor(plan.alpha0 / delta)) + 1;
  plan.direction = direction;
  plan.truncation = plan.n0 + 1;
  if (truncation) {
    plan.truncation = *truncation;
  } else {
    // For the reverse direction the measured contraction is not known yet;
    // size T with its majorant q / (1 - q).
    const double q = plan.contraction_ratio();
    const double qt = q / (1.0 - q);
    while (true) {
      const double tail = direction == Direction::forward
                              ? certified_tail(plan)
                              : std::abs(z) * polygeometric_tail(qt, 0, plan.truncation + 1);
      if (tail <= tail_tolerance || plan.truncation > 10000) break;
      ++plan.truncation;
    }
  }
  plan.validate();
  return plan;
}

double NeumannPlan::contraction_ratio() const {
  return std::pow(2.0 * r0, delta) / std::abs(z);
}

void NeumannPlan::validate() const {
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  if (distance_to_unit_interval(z) <= 1e-12) throw PoleError("z lies on [0,1]");
  const double upper = r0_upper_bound(z, delta);
  if (!(r0 > 0.0 && r0 < upper))
    throw UsageError("r0 = " + std::to_string(r0) + " outside admissible interval (0, " +
                     std::to_string(upper) + ")");
  if (!(n0 > alpha0 / delta))
    throw UsageError("N0 = " + std::to_string(n0) + " must exceed alpha0/delta");
  if (truncation < n0 + 1) throw UsageError("truncation length must be >= N0 + 1");
  if (beta0 < 0 || alpha0 < 0) throw UsageError("seminorm orders must be nonnegative");
  if (!(contraction_ratio() < 1.0)) throw UsageError("contraction ratio is not below 1");
}

double certified_tail(const NeumannPlan& plan, double measured_contraction) {
  if (plan.direction == Direction::forward)
    return polygeometric_tail(plan.contraction_ratio(), 0, plan.truncation + 1) / std::abs(plan.z);
  return std::abs(plan.z) * polygeometric_tail(measured_contraction, 0, plan.truncation + 1);
}

double tail_kernel_bound(const NeumannPlan& plan) {
  return polygeometric_tail(plan.contraction_ratio(), plan.alpha0, plan.truncation + 1);
}

std::vector<cplx> Decomposition::composite_samples() const {
  const Field tail_symbol = forward_transform(tail.as_field());
  const auto a = localized.sample(grid);
  const auto b = finite_sum.sample(grid);
  const auto c = remainder.sample(grid);
  std::vector<cplx> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (*a)[k] + (*b)[k] + (*c)[k] + tail_symbol[k];
  return out;
}

Field Decomposition::apply_composite(const Field& f) const {
  const cplx z = plan.z;
  Field out = convolve(tail, f);
  if (plan.direction == Direction::forward) {
    const Symbol bochner = bochner_symbol(plan.delta);
    out += apply(localized, f);
    Field term = apply(cutoffs.outer, f);
    Field sum = (1.0 / z) * term;
    cplx coeff = 1.0 / z;
    for (int n = 1; n <= plan.n0; ++n) {
      term = apply(bochner, term);
      coeff /= z;
      sum += coeff * term;
    }
    out += sum;
    Field rest = f - apply(cutoffs.inner, f) - apply(cutoffs.outer, f);
    out += (1.0 / z) * std::move(rest);
  } else {
    const Symbol resolvent = resolvent_symbol(z, plan.delta);
    Field term = apply(cutoffs.outer, f);
    for (int n = 1; n <= plan.n0; ++n) {
      term = term - z * apply(resolvent, term);
      out += (-z) * term;
    }
  }
  return out;
}

Decomposition forward_decomposition(const NeumannPlan& plan, const GridSpec& grid) {
  plan.validate();
  if (plan.direction != Direction::forward)
    throw UsageError("forward_decomposition needs a forward plan");
  const cplx z = plan.z;
  const CutoffPair cut = cutoff_pair(plan.r0);
  const Symbol bochner = bochner_symbol(plan.delta);
  const Symbol target = resolvent_symbol(z, plan.delta);
  const Symbol psi1 = cut.inner;
  const Symbol psi2 = cut.outer;
  const int n0 = plan.n0;

  Symbol m1 = Symbol::radial(
      "m1", [target, psi1](double r) { return target.at_radius(r) * psi1.at_radius(r); },
      psi1.support_radius(), Smoothness::smooth_compact);
  Symbol m21 = Symbol::radial(
      "m21",
      [bochner, psi2, z, n0](double r) {
        const cplx b = bochner.at_radius(r);
        cplx acc = 0.0;
        cplx power = 1.0 / z;
        for (int n = 0; n <= n0; ++n) {
          acc += power;
          power *= b / z;
        }
        return acc * psi2.at_radius(r);
      },
      psi2.support_radius(), Smoothness::smooth_compact);
  Symbol rest = Symbol::radial(
      "z^-1(1-psi1-psi2)",
      [psi1, psi2, z](double r) {
        return (1.0 - psi1.at_radius(r) - psi2.at_radius(r)) / z;
      },
      Symbol::unbounded, Smoothness::bounded);

  require_in_window(m21, grid);

  // Ascending n keeps the reduction order, and so the output, bit-stable.
  std::vector<std::pair<cplx, Kernel>> terms;
  cplx coeff = 1.0 / z;
  for (int n = 1; n <= plan.truncation; ++n) {
    coeff /= z;
    if (n <= n0) continue;
    terms.emplace_back(coeff, kernel_of(powered_outer(bochner, psi2, n), grid));
  }
  Kernel tail = scaled_sum(grid, terms, "forward tail " + z_tag(z));

  Decomposition dec{plan,  grid,   cut, std::move(m1), std::move(m21), std::move(rest),
                    std::move(tail), target, certified_tail(plan), 0.0, 0.0};
  const auto composite = dec.composite_samples();
  dec.reconstruction_error = max_abs_difference(composite, *target.sample(grid));
  return dec;
}

Decomposition reverse_decomposition(const NeumannPlan& plan, const GridSpec& grid) {
  plan.validate();
  if (plan.direction != Direction::reverse)
    throw UsageError("reverse_decomposition needs a reverse plan");
  const cplx z0 = plan.z;
  const CutoffPair cut = cutoff_pair(plan.r0);
  const Symbol bochner = bochner_symbol(plan.delta);
  const Symbol psi2 = cut.outer;
  const int n0 = plan.n0;

  require_in_window(psi2, grid);

  // Contraction on supp psi2, measured on the grid.
  double contraction = 0.0;
  {
    const auto psi = psi2.sample(grid);
    const auto b = bochner.sample(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if ((*psi)[k] == 0.0) continue;
      contraction = std::max(contraction, std::abs(1.0 - z0 / (z0 - (*b)[k])));
    }
  }
  const double q = plan.contraction_ratio();
  const double majorant = q / (1.0 - q);
  if (!(contraction < 1.0) || contraction > majorant + 1e-12)
    throw UsageError("contraction check failed: measured " + std::to_string(contraction) +
                     ", majorant " + std::to_string(majorant));

  Symbol target = Symbol::radial(
      "bochner*" + psi2.name(),
      [bochner, psi2](double r) { return bochner.at_radius(r) * psi2.at_radius(r); },
      psi2.support_radius(), Smoothness::piecewise_smooth);
  Symbol m31 = Symbol::radial(
      "m31",
      [bochner, psi2, z0, n0](double r) {
        const cplx u = 1.0 - z0 / (z0 - bochner.at_radius(r));
        cplx acc = 0.0;
        cplx power = 1.0;
        for (int n = 1; n <= n0; ++n) {
          power *= u;
          acc += power;
        }
        return -z0 * acc * psi2.at_radius(r);
      },
      psi2.support_radius(), Smoothness::smooth_compact);
  const Symbol zero = Symbol::constant(0.0);

  std::vector<std::pair<cplx, Kernel>> terms;
  for (int n = n0 + 1; n <= plan.truncation; ++n)
    terms.emplace_back(-z0, kernel_of(contraction_power(bochner, psi2, z0, n), grid));
  Kernel tail = scaled_sum(grid, terms, "reverse tail " + z_tag(z0));

  Decomposition dec{plan, grid, cut, zero, std::move(m31), zero, std::move(tail), target,
                    certified_tail(plan, contraction), contraction, 0.0};
  const auto composite = dec.composite_samples();
  dec.reconstruction_error = max_abs_difference(composite, *target.sample(grid));
  return dec;
}

KernelTerm kernel_sequence(const NeumannPlan& plan, const GridSpec& grid, int n) {
  if (n < 1) throw UsageError("kernel_sequence index must be >= 1");
  const CutoffPair cut = cutoff_pair(plan.r0);
  Kernel k = kernel_of(powered_outer(bochner_symbol(plan.delta), cut.outer, n), grid);
  const double s = schwartz_seminorm(k, plan.alpha0, plan.beta0);
  return {n, std::move(k), s};
}

}  // namespace riesz
