#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riesz/grid.hpp"

namespace riesz {

enum class Smoothness { smooth_compact, piecewise_smooth, bounded };

const char* to_string(Smoothness s);

/// Thrown when a symbol is requested at a pole of its defining formula.
class PoleError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// A frequency-side function xi -> m(xi).
///
/// Symbols are immutable values sharing one evaluation rule; copies are cheap.
/// The declared support radius is enforced on evaluation (value exactly 0 for
/// |xi| > radius). Samples on a grid are cached per GridSpec.
class Symbol {
 public:
  using Rule = std::function<cplx(std::span<const double>)>;
  using RadialRule = std::function<cplx(double)>;

  static constexpr double unbounded = std::numeric_limits<double>::infinity();

  Symbol(std::string name, Rule rule, double support_radius, Smoothness smoothness,
         std::vector<double> singular_radii = {}, bool radial = false);

  /// Symbol whose value depends on |xi| only.
  static Symbol radial(std::string name, RadialRule rule, double support_radius,
                       Smoothness smoothness, std::vector<double> singular_radii = {});

  static Symbol constant(cplx value);

  /// sum_i c_i m_i.
  static Symbol linear_combination(const std::vector<std::pair<cplx, Symbol>>& terms);

  cplx operator()(std::span<const double> xi) const;
  /// Value of a radial symbol at |xi| = r.
  cplx at_radius(double r) const;

  const std::string& name() const;
  double support_radius() const;
  Smoothness smoothness() const;
  /// Radii where the symbol is not smooth; finite-difference screens avoid them.
  const std::vector<double>& singular_radii() const;
  bool is_radial() const;

  /// Samples on the frequency lattice of grid, cached.
  std::shared_ptr<const std::vector<cplx>> sample(const GridSpec& grid) const;

  /// Same rule under a new name (keeps the cache separate).
  Symbol renamed(std::string name) const;

  friend Symbol operator*(const Symbol& a, const Symbol& b);

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// eta(t) = E(t) / (E(t) + E(1 - t)) with E(t) = exp(-1/t) for t > 0, else 0.
double smooth_transition(double t);

/// Radial profile equal to 1 on [0, inner], 0 on [outer, inf), smooth in between.
class BumpProfile {
 public:
  BumpProfile(double inner, double outer);
  double operator()(double r) const;
  double inner() const { return inner_; }
  double outer() const { return outer_; }

 private:
  double inner_;
  double outer_;
};

/// (1 - |xi|^2)_+^delta.
Symbol bochner_symbol(double delta);

/// (z - (1 - |xi|^2)_+^delta)^{-1}. Throws PoleError when z is within 1e-12 of [0, 1].
Symbol resolvent_symbol(cplx z, double delta);

/// Euclidean distance from z to the segment [0, 1].
double distance_to_unit_interval(cplx z);

struct CutoffPair {
  Symbol inner;  // 1 on |xi| <= 1 - r0, 0 on |xi| >= 1 - r0/2
  Symbol outer;  // 1 - inner on |xi| <= 1 + r0/2, 0 on |xi| > 1 + r0
};

CutoffPair cutoff_pair(double r0);

/// Radial bump 1 - eta(|xi|/rho), rescaled so (2 pi)^{-d} * integral = 1,
/// i.e. its inverse transform equals 1 at x = 0.
Symbol bump_phi0(double rho, int dimension);

/// Scale factor applied by bump_phi0 to the unit-height profile.
double bump_phi0_scale(double rho, int dimension);

/// (d |1/p - 1/2| - 1/2)_+.
double critical_delta(double p, int dimension);

struct MikhlinOrder {
  int k;
  double sup_coarse;
  double sup_fine;
  double growth;
  bool unbounded_suspect;
};

struct MikhlinReport {
  std::vector<MikhlinOrder> orders;
  double coarse_step;
  double fine_step;
  bool pass() const;
};

struct MikhlinOptions {
  /// Ratio between the coarse and fine finite-difference step.
  int refinement = 256;
  /// Excluded band around singular radii, in units of the current step.
  double exclusion_cells = 2.0;
  /// Growth factor above which a sup is flagged.
  double growth_threshold = 10.0;
};

/// Numerical screen of sup |xi|^k |grad^k m(xi)| for k <= kmax <= 3.
///
/// Samples along rays through the origin (the axis in d=1; both axes and the
/// diagonal in d=2) up to the grid's frequency half-width, at the grid's
/// frequency spacing and again at spacing / refinement. The derivative tensor
/// is formed from central differences with the same step.
MikhlinReport mikhlin_check(const Symbol& m, const GridSpec& grid, int kmax,
                            const MikhlinOptions& options = {});

}  // namespace riesz
