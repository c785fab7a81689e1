#include "riesz/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace riesz {
namespace {

double norm_of(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return std::sqrt(s);
}

Smoothness worst(Smoothness a, Smoothness b) {
  return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}

std::vector<double> merge_radii(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::smooth_compact: return "C-infinity-compact";
    case Smoothness::piecewise_smooth: return "piecewise-smooth";
    case Smoothness::bounded: return "bounded";
  }
  return "?";
}

struct Symbol::State {
  std::string name;
  Rule rule;
  RadialRule radial_rule;
  double support;
  Smoothness smoothness;
  std::vector<double> singular;

  std::mutex cache_mutex;
  std::map<std::tuple<int, std::size_t, double>, std::shared_ptr<const std::vector<cplx>>> cache;
};

Symbol::Symbol(std::string name, Rule rule, double support_radius, Smoothness smoothness,
               std::vector<double> singular_radii, bool radial)
    : state_(std::make_shared<State>()) {
  if (!(support_radius > 0.0)) throw UsageError("symbol support radius must be positive");
  state_->name = std::move(name);
  state_->rule = std::move(rule);
  state_->support = support_radius;
  state_->smoothness = smoothness;
  state_->singular = std::move(singular_radii);
  if (radial) {
    // A radial symbol built through the general constructor: recover the
    // profile by evaluating on the first axis.
    auto r = state_->rule;
    state_->radial_rule = [r](double t) {
      const double p[2] = {t, 0.0};
      return r(std::span<const double>(p, 1));
    };
  }
}

Symbol Symbol::radial(std::string name, RadialRule rule, double support_radius,
                      Smoothness smoothness, std::vector<double> singular_radii) {
  auto general = [rule](std::span<const double> xi) { return rule(norm_of(xi)); };
  Symbol s(std::move(name), general, support_radius, smoothness, std::move(singular_radii));
  s.state_->radial_rule = std::move(rule);
  return s;
}

Symbol Symbol::constant(cplx value) {
  std::string name = "constant(" + std::to_string(value.real()) + "," +
                     std::to_string(value.imag()) + ")";
  return radial(std::move(name), [value](double) { return value; }, unbounded,
                Smoothness::bounded);
}

Symbol Symbol::linear_combination(const std::vector<std::pair<cplx, Symbol>>& terms) {
  if (terms.empty()) throw UsageError("linear combination needs at least one term");
  double support = 0.0;
  Smoothness smooth = Smoothness::smooth_compact;
  std::vector<double> singular;
  bool radial = true;
  std::string name = "combination(";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [c, s] = terms[i];
    support = std::max(support, s.support_radius());
    smooth = worst(smooth, s.smoothness());
    singular = merge_radii(std::move(singular), s.singular_radii());
    radial = radial && s.is_radial();
    if (i) name += "+";
    name += s.name();
  }
  name += ")";
  if (radial) {
    return Symbol::radial(
        std::move(name),
        [terms](double r) {
          cplx acc = 0.0;
          for (const auto& [c, s] : terms) acc += c * s.at_radius(r);
          return acc;
        },
        support, smooth, std::move(singular));
  }
  return Symbol(
      std::move(name),
      [terms](std::span<const double> xi) {
        cplx acc = 0.0;
        for (const auto& [c, s] : terms) acc += c * s(xi);
        return acc;
      },
      support, smooth, std::move(singular));
}

Symbol operator*(const Symbol& a, const Symbol& b) {
  const double support = std::min(a.support_radius(), b.support_radius());
  const Smoothness smooth = worst(a.smoothness(), b.smoothness());
  auto singular = merge_radii(a.singular_radii(), b.singular_radii());
  std::string name = a.name() + "*" + b.name();
  if (a.is_radial() && b.is_radial()) {
    return Symbol::radial(
        std::move(name), [a, b](double r) { return a.at_radius(r) * b.at_radius(r); }, support,
        smooth, std::move(singular));
  }
  return Symbol(
      std::move(name), [a, b](std::span<const double> xi) { return a(xi) * b(xi); }, support,
      smooth, std::move(singular));
}

cplx Symbol::operator()(std::span<const double> xi) const {
  const double r = norm_of(xi);
  if (r > state_->support) return 0.0;
  if (state_->radial_rule) return state_->radial_rule(r);
  return state_->rule(xi);
}

cplx Symbol::at_radius(double r) const {
  if (!state_->radial_rule) throw UsageError("symbol '" + state_->name + "' is not radial");
  if (r > state_->support) return 0.0;
  return state_->radial_rule(r);
}

const std::string& Symbol::name() const { return state_->name; }
double Symbol::support_radius() const { return state_->support; }
Smoothness Symbol::smoothness() const { return state_->smoothness; }
const std::vector<double>& Symbol::singular_radii() const { return state_->singular; }
bool Symbol::is_radial() const { return static_cast<bool>(state_->radial_rule); }

std::shared_ptr<const std::vector<cplx>> Symbol::sample(const GridSpec& grid) const {
  const auto key = std::make_tuple(grid.dimension(), grid.points_per_axis(), grid.half_width());
  {
    std::lock_guard lock(state_->cache_mutex);
    if (auto it = state_->cache.find(key); it != state_->cache.end()) return it->second;
  }
  auto values = std::make_shared<std::vector<cplx>>(grid.size());
  const auto d = static_cast<std::size_t>(grid.dimension());
  for (std::size_t k = 0; k < values->size(); ++k) {
    const Point p = grid.frequency_point(k);
    (*values)[k] = (*this)(std::span<const double>(p.data(), d));
  }
  std::lock_guard lock(state_->cache_mutex);
  auto [it, inserted] = state_->cache.emplace(key, std::move(values));
  return it->second;
}

Symbol Symbol::renamed(std::string name) const {
  Symbol copy = *this;
  copy.state_ = std::make_shared<State>();
  copy.state_->name = std::move(name);
  copy.state_->rule = state_->rule;
  copy.state_->radial_rule = state_->radial_rule;
  copy.state_->support = state_->support;
  copy.state_->smoothness = state_->smoothness;
  copy.state_->singular = state_->singular;
  return copy;
}

double smooth_transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

BumpProfile::BumpProfile(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner >= 0.0) || !(outer > inner))
    throw UsageError("bump profile needs 0 <= inner < outer");
}

double BumpProfile::operator()(double r) const {
  if (r <= inner_) return 1.0;
  if (r >= outer_) return 0.0;
  return 1.0 - smooth_transition((r - inner_) / (outer_ - inner_));
}

Symbol bochner_symbol(double delta) {
  if (!(delta > 0.0)) throw UsageError("Bochner-Riesz index delta must be positive");
  return Symbol::radial(
      "bochner(" + std::to_string(delta) + ")",
      [delta](double r) -> cplx {
        const double t = 1.0 - r * r;
        return t > 0.0 ? std::pow(t, delta) : 0.0;
      },
      1.0, Smoothness::piecewise_smooth, {1.0});
}

double distance_to_unit_interval(cplx z) {
  if (z.real() < 0.0) return std::abs(z);
  if (z.real() > 1.0) return std::abs(z - 1.0);
  return std::abs(z.imag());
}

Symbol resolvent_symbol(cplx z, double delta) {
  if (!(delta > 0.0)) throw UsageError("Bochner-Riesz index delta must be positive");
  if (distance_to_unit_interval(z) <= 1e-12)
    throw PoleError("resolvent requested at z = " + std::to_string(z.real()) + "+" +
                    std::to_string(z.imag()) + "i, which lies on the spectrum [0,1]");
  const Symbol b = bochner_symbol(delta);
  return Symbol::radial(
      "resolvent(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ";" +
          std::to_string(delta) + ")",
      [z, b](double r) { return 1.0 / (z - b.at_radius(r)); }, Symbol::unbounded,
      Smoothness::piecewise_smooth, {1.0});
}

CutoffPair cutoff_pair(double r0) {
  if (!(r0 > 0.0 && r0 < 0.5)) throw UsageError("cutoff radius r0 must lie in (0, 1/2)");
  const BumpProfile inner(1.0 - r0, 1.0 - r0 / 2.0);
  const BumpProfile outer_edge(1.0 + r0 / 2.0, 1.0 + r0);
  const std::string tag = "(" + std::to_string(r0) + ")";
  Symbol psi1 = Symbol::radial(
      "cutoff1" + tag, [inner](double r) -> cplx { return inner(r); }, 1.0 - r0 / 2.0,
      Smoothness::smooth_compact);
  Symbol psi2 = Symbol::radial(
      "cutoff2" + tag,
      [inner, outer_edge](double r) -> cplx { return (1.0 - inner(r)) * outer_edge(r); },
      1.0 + r0, Smoothness::smooth_compact);
  return {std::move(psi1), std::move(psi2)};
}

double bump_phi0_scale(double rho, int dimension) {
  if (!(rho > 0.0)) throw UsageError("bump radius must be positive");
  if (dimension != 1 && dimension != 2) throw UsageError("bump dimension must be 1 or 2");
  using boost::math::quadrature::gauss_kronrod;
  // Integral over R^d of 1 - eta(|xi|/rho), reduced to the unit radial variable.
  double integral;
  if (dimension == 1) {
    const double unit =
        gauss_kronrod<double, 61>::integrate([](double t) { return 1.0 - smooth_transition(t); },
                                             0.0, 1.0, 15, 1e-15);
    integral = 2.0 * rho * unit;
  } else {
    const double unit = gauss_kronrod<double, 61>::integrate(
        [](double t) { return t * (1.0 - smooth_transition(t)); }, 0.0, 1.0, 15, 1e-15);
    integral = 2.0 * std::numbers::pi * rho * rho * unit;
  }
  return std::pow(2.0 * std::numbers::pi, dimension) / integral;
}

Symbol bump_phi0(double rho, int dimension) {
  const double scale = bump_phi0_scale(rho, dimension);
  return Symbol::radial(
      "bump(" + std::to_string(rho) + ")",
      [rho, scale](double r) -> cplx { return scale * (1.0 - smooth_transition(r / rho)); }, rho,
      Smoothness::smooth_compact);
}

double critical_delta(double p, int dimension) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("critical_delta needs 1 <= p < inf");
  const double v = dimension * std::abs(1.0 / p - 0.5) - 0.5;
  return std::max(v, 0.0);
}

// ---------------------------------------------------------------------------
// Mikhlin screen

namespace {

struct Stencil {
  std::vector<std::pair<int, double>> taps;
};

Stencil central(int order) {
  switch (order) {
    case 0: return {{{0, 1.0}}};
    case 1: return {{{-1, -0.5}, {1, 0.5}}};
    case 2: return {{{-1, 1.0}, {0, -2.0}, {1, 1.0}}};
    case 3: return {{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}};
  }
  throw UsageError("finite-difference order must be <= 3");
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// |grad^k m| at point p, Frobenius norm of the symmetric derivative tensor.
double derivative_norm(const Symbol& m, int d, const Point& p, int k, double step) {
  if (d == 1) {
    const Stencil s = central(k);
    cplx acc = 0.0;
    for (const auto& [off, w] : s.taps) {
      const double x = p[0] + off * step;
      acc += w * m(std::span<const double>(&x, 1));
    }
    return std::abs(acc) / std::pow(step, k);
  }
  double sq = 0.0;
  for (int k1 = 0; k1 <= k; ++k1) {
    const Stencil sx = central(k1);
    const Stencil sy = central(k - k1);
    cplx acc = 0.0;
    for (const auto& [ox, wx] : sx.taps)
      for (const auto& [oy, wy] : sy.taps) {
        const double q[2] = {p[0] + ox * step, p[1] + oy * step};
        acc += wx * wy * m(std::span<const double>(q, 2));
      }
    sq += binomial(k, k1) * std::norm(acc);
  }
  return std::sqrt(sq) / std::pow(step, k);
}

std::vector<double> ray_sups(const Symbol& m, const GridSpec& grid, int kmax, double step,
                             double exclusion_cells) {
  const int d = grid.dimension();
  std::vector<Point> directions;
  if (d == 1) {
    directions = {{1.0, 0.0}};
  } else {
    const double s = 1.0 / std::sqrt(2.0);
    directions = {{1.0, 0.0}, {0.0, 1.0}, {s, s}};
  }
  const double reach = grid.frequency_half_width();
  const auto count = static_cast<long>(std::floor(reach / step));
  const double band = exclusion_cells * step;

  std::vector<double> sups(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (const Point& dir : directions) {
    for (long j = -count; j <= count; ++j) {
      const double t = static_cast<double>(j) * step;
      const double r = std::abs(t);
      bool excluded = false;
      for (double s : m.singular_radii())
        if (std::abs(r - s) < band) excluded = true;
      if (excluded) continue;
      const Point p{t * dir[0], t * dir[1]};
      for (int k = 0; k <= kmax; ++k) {
        const double v = std::pow(r, k) * derivative_norm(m, d, p, k, step);
        sups[static_cast<std::size_t>(k)] = std::max(sups[static_cast<std::size_t>(k)], v);
      }
    }
  }
  return sups;
}

}  // namespace

bool MikhlinReport::pass() const {
  return std::none_of(orders.begin(), orders.end(),
                      [](const MikhlinOrder& o) { return o.unbounded_suspect; });
}

MikhlinReport mikhlin_check(const Symbol& m, const GridSpec& grid, int kmax,
                            const MikhlinOptions& options) {
  if (kmax < 0 || kmax > 3) throw UsageError("mikhlin_check supports 0 <= kmax <= 3");
  if (options.refinement < 2) throw UsageError("mikhlin refinement must be >= 2");
  MikhlinReport report;
  report.coarse_step = grid.frequency_spacing();
  report.fine_step = report.coarse_step / options.refinement;
  const auto coarse = ray_sups(m, grid, kmax, report.coarse_step, options.exclusion_cells);
  const auto fine = ray_sups(m, grid, kmax, report.fine_step, options.exclusion_cells);
  for (int k = 0; k <= kmax; ++k) {
    const auto i = static_cast<std::size_t>(k);
    MikhlinOrder o{k, coarse[i], fine[i], 1.0, false};
    if (coarse[i] > 0.0)
      o.growth = fine[i] / coarse[i];
    else if (fine[i] > 0.0)
      o.growth = std::numeric_limits<double>::infinity();
    o.unbounded_suspect = o.growth > options.growth_threshold;
    report.orders.push_back(o);
  }
  return report;
}

}  // namespace riesz
