#include "riesz/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <boost/version.hpp>
#include <json.hpp>

#include "riesz/cli/config.hpp"
#include "riesz/field_io.hpp"
#include "riesz/multiplier.hpp"
#include "riesz/neumann.hpp"
#include "riesz/norms.hpp"
#include "riesz/parallel.hpp"
#include "riesz/probes.hpp"
#include "riesz/sample_fields.hpp"

namespace riesz::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Assertion {
  std::string name;
  bool pass;
  std::string detail;
};

struct Output {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json summary = json::object();
  json grids = json::array();
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, Field>> fields;  // stem -> field, under fields/
  std::vector<std::pair<std::string, std::string>> extra_files;
};

struct Context {
  std::uint64_t seed = 0;
  int workers = 1;
};

using Job = std::function<Output()>;

std::string num(double v) { return format_number(v); }

json grid_json(const GridSpec& g) {
  json j;
  j["dimension"] = g.dimension();
  j["points_per_axis"] = g.points_per_axis();
  j["half_width"] = g.half_width();
  j["spacing"] = g.spacing();
  j["frequency_spacing"] = g.frequency_spacing();
  j["frequency_half_width"] = g.frequency_half_width();
  return j;
}

void check(Output& out, const std::string& name, bool pass, const std::string& detail) {
  out.assertions.push_back({name, pass, detail});
}

// Runs fn, turning a library UsageError into a diagnostic for key.
template <typename Fn>
auto guarded(const Config& cfg, const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const UsageError& e) {
    cfg.fail(key, e.what());
  }
}

GridSpec read_grid(const Config& cfg, int dimension, int points, double half_width) {
  const int d = cfg.integer("grid.dimension", dimension);
  const int m = cfg.integer("grid.points", points);
  const double l = cfg.number("grid.half_width", half_width);
  if (d != 1 && d != 2) cfg.fail("grid.dimension", "must be 1 or 2");
  if (m < 2 || m % 2 != 0) cfg.fail("grid.points", "must be even and >= 2");
  if (std::pow(static_cast<double>(m), d) > 16777216.0) cfg.fail("grid.points", "grid exceeds 2^24 samples");
  if (!(l > 0.0)) cfg.fail("grid.half_width", "must be positive");
  return GridSpec(d, static_cast<std::size_t>(m), l);
}

cplx read_complex(const Config& cfg, const std::string& prefix, cplx fallback) {
  return {cfg.number(prefix + "_re", fallback.real()), cfg.number(prefix + "_im", fallback.imag())};
}

Symbol read_symbol(const Config& cfg, const std::string& prefix, int dimension, int depth = 0) {
  if (depth > 8) cfg.fail(prefix + ".kind", "symbol nesting is deeper than 8");
  const std::string kind_key = prefix + ".kind";
  const std::string kind = cfg.string(kind_key);
  if (kind == "bochner") {
    const double delta = cfg.number(prefix + ".delta");
    return guarded(cfg, prefix + ".delta", [&] {
      if (!(delta >= 0.0)) throw UsageError("delta must be >= 0");
      return bochner_symbol(delta);
    });
  }
  if (kind == "resolvent") {
    const double delta = cfg.number(prefix + ".delta");
    const cplx z = read_complex(cfg, prefix + ".z", {0.0, 0.0});
    return guarded(cfg, prefix + ".z_re", [&] { return resolvent_symbol(z, delta); });
  }
  if (kind == "cutoff1" || kind == "cutoff2") {
    const double r0 = cfg.number(prefix + ".r0");
    const CutoffPair pair = guarded(cfg, prefix + ".r0", [&] { return cutoff_pair(r0); });
    return kind == "cutoff1" ? pair.inner : pair.outer;
  }
  if (kind == "bump") {
    const double rho = cfg.number(prefix + ".rho");
    return guarded(cfg, prefix + ".rho", [&] { return bump_phi0(rho, dimension); });
  }
  if (kind == "scalar") return Symbol::constant(read_complex(cfg, prefix + ".value", {0.0, 0.0}));
  if (kind == "scalar-combination" || kind == "product") {
    const std::string list_key = prefix + (kind == "product" ? ".factors" : ".terms");
    const auto names = cfg.strings(list_key, {});
    if (names.empty()) cfg.fail(list_key, "needs at least one term name");
    std::vector<std::pair<cplx, Symbol>> terms;
    for (const auto& name : names) {
      const std::string sub = "term." + name;
      Symbol s = read_symbol(cfg, sub, dimension, depth + 1);
      cplx c = 1.0;
      if (kind == "scalar-combination") {
        const auto coeff = cfg.numbers(sub + ".coeff", {1.0});
        if (coeff.size() > 2) cfg.fail(sub + ".coeff", "expected a number or [re, im]");
        c = {coeff[0], coeff.size() == 2 ? coeff[1] : 0.0};
      }
      terms.emplace_back(c, std::move(s));
    }
    if (kind == "scalar-combination") return Symbol::linear_combination(terms);
    Symbol out = terms.front().second;
    for (std::size_t i = 1; i < terms.size(); ++i) out = out * terms[i].second;
    return out;
  }
  cfg.fail(kind_key,
           "unknown symbol kind '" + kind +
               "' (bochner, resolvent, cutoff1, cutoff2, bump, scalar, scalar-combination, product)");
}

Field read_input_field(const Config& cfg, const Context& ctx, int dimension, int points, double half_width) {
  const std::string kind = cfg.string("input.kind", "gaussian");
  if (kind == "file") {
    const std::filesystem::path path = cfg.string("input.path");
    std::filesystem::path manifest = path;
    manifest.replace_extension(".json");
    manifest = cfg.string("input.manifest", manifest.string());
    return guarded(cfg, "input.path", [&] {
      try {
        return load_field(path, manifest);
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
    });
  }
  const GridSpec grid = read_grid(cfg, dimension, points, half_width);
  if (kind == "gaussian") {
    const double width = cfg.number("input.width", 1.0);
    const auto centre = cfg.numbers("input.centre", {0.0, 0.0});
    if (centre.size() > 2) cfg.fail("input.centre", "expected at most two coordinates");
    return guarded(cfg, "input.width", [&] {
      return gaussian_field(grid, width, {centre[0], centre.size() > 1 ? centre[1] : 0.0});
    });
  }
  if (kind == "random") {
    const double band = cfg.number("input.band", 4.0);
    return guarded(cfg, "input.band", [&] { return random_band_limited(grid, band, ctx.seed); });
  }
  cfg.fail("input.kind", "unknown input kind '" + kind + "' (gaussian, random, file)");
}

std::vector<std::string> field_row(const Field& f, std::size_t k) {
  const Point x = f.grid().position(k);
  std::vector<std::string> row{std::to_string(k), num(x[0])};
  if (f.grid().dimension() == 2) row.push_back(num(x[1]));
  row.push_back(num(f[k].real()));
  row.push_back(num(f[k].imag()));
  return row;
}

// apply: T_m f for one symbol and one input field.
Job prepare_apply(const Config& cfg, const Context& ctx) {
  const Field input = read_input_field(cfg, ctx, 1, 1024, 32.0);
  const GridSpec grid = input.grid();
  const Symbol m = read_symbol(cfg, "symbol", grid.dimension());
  guarded(cfg, "symbol.kind", [&] { require_in_window(m, grid); return 0; });
  const auto dense_tol = cfg.maybe_number("assert.dense_tol");
  if (dense_tol && grid.size() > 4096) cfg.fail("assert.dense_tol", "dense oracle needs at most 4096 grid points");
  return [=] {
    Output out;
    const Field result = apply(m, input);
    out.columns = {"index", "x0"};
    if (grid.dimension() == 2) out.columns.push_back("x1");
    out.columns.insert(out.columns.end(), {"re", "im"});
    for (std::size_t k = 0; k < result.size(); ++k) out.rows.push_back(field_row(result, k));
    out.grids.push_back(grid_json(grid));
    out.summary["symbol"] = m.name();
    out.summary["input_l2"] = lp_norm(input, 2.0);
    out.summary["output_l2"] = lp_norm(result, 2.0);
    out.summary["output_max_abs"] = max_abs(result.samples());
    if (dense_tol) {
      const DenseOperator dense = dense_oracle(m, grid);
      const auto reference = dense.multiply(input.samples());
      const double dev = max_abs_difference(reference, result.samples());
      out.summary["dense_deviation"] = dev;
      check(out, "dense_oracle", dev <= *dense_tol, "deviation " + num(dev) + " <= " + num(*dense_tol));
    }
    out.fields.emplace_back("input", input);
    out.fields.emplace_back("output", result);
    return out;
  };
}

// resolvent-verify: forward and/or reverse decomposition report.
Job prepare_resolvent_verify(const Config& cfg, const Context& ctx) {
  const GridSpec grid = read_grid(cfg, 1, 1024, 32.0);
  const cplx z = read_complex(cfg, "resolvent.z", {2.0, 0.0});
  const double delta = cfg.number("resolvent.delta", 1.0);
  const auto r0 = cfg.maybe_number("resolvent.r0");
  std::optional<int> truncation;
  if (cfg.has("resolvent.truncation")) truncation = cfg.integer("resolvent.truncation");
  const double tail_tol = cfg.number("resolvent.tail_tolerance", 1e-10);
  const std::string which = cfg.string("resolvent.direction", "both");
  const int n_fields = cfg.integer("resolvent.fields", 4);
  const double band = cfg.number("resolvent.band", std::min(4.0, 0.5 * grid.frequency_half_width()));
  const auto recon_tol = cfg.maybe_number("assert.reconstruction_tol");
  const auto operator_tol = cfg.maybe_number("assert.operator_tol");
  const bool assert_certified = cfg.boolean("assert.certified", false);
  if (n_fields < 0 || n_fields > 1000) cfg.fail("resolvent.fields", "must lie in [0, 1000]");
  if (!(band > 0.0) || band >= grid.frequency_half_width())
    cfg.fail("resolvent.band", "must lie in (0, frequency half-width)");

  std::vector<Direction> dirs;
  if (which == "forward" || which == "both") dirs.push_back(Direction::forward);
  if (which == "reverse" || which == "both") dirs.push_back(Direction::reverse);
  if (dirs.empty()) cfg.fail("resolvent.direction", "expected forward, reverse or both");
  std::vector<NeumannPlan> plans;
  for (Direction dir : dirs)
    plans.push_back(guarded(cfg, "resolvent.z_re", [&] {
      auto plan = NeumannPlan::make(z, delta, grid.dimension(), dir, r0, truncation, tail_tol);
      plan.validate();
      return plan;
    }));
  guarded(cfg, "grid.points", [&] { require_in_window(cutoff_pair(plans.front().r0).outer, grid); return 0; });

  return [=] {
    Output out;
    out.columns = {"direction", "z_re", "z_im", "delta", "r0", "n0", "truncation", "certified_tail",
                   "reconstruction_error", "operator_error", "contraction", "contraction_bound"};
    out.grids.push_back(grid_json(grid));
    std::vector<Field> inputs;
    for (int k = 0; k < n_fields; ++k)
      inputs.push_back(random_band_limited(grid, band, ctx.seed + static_cast<std::uint64_t>(k)));
    for (const NeumannPlan& plan : plans) {
      const Decomposition dec = plan.direction == Direction::forward ? forward_decomposition(plan, grid)
                                                                     : reverse_decomposition(plan, grid);
      std::vector<double> errors(inputs.size(), 0.0);
      parallel_for(inputs.size(), ctx.workers, [&](std::size_t k) {
        const Field reference = apply(dec.target, inputs[k]);
        const Field composite = dec.apply_composite(inputs[k]);
        errors[k] = lp_norm(composite - reference, 2.0) / lp_norm(reference, 2.0);
      });
      const double op_error = errors.empty() ? std::nan("") : *std::max_element(errors.begin(), errors.end());
      const double q = plan.contraction_ratio();
      const bool reverse = plan.direction == Direction::reverse;
      const double bound = reverse ? q / (1.0 - q) : std::nan("");
      const std::string dir = to_string(plan.direction);
      out.rows.push_back({dir, num(plan.z.real()), num(plan.z.imag()), num(plan.delta), num(plan.r0),
                          std::to_string(plan.n0), std::to_string(plan.truncation),
                          num(dec.certified_tail_bound), num(dec.reconstruction_error), num(op_error),
                          reverse ? num(dec.contraction) : "nan", num(bound)});
      if (recon_tol)
        check(out, dir + ".reconstruction", dec.reconstruction_error <= *recon_tol,
              num(dec.reconstruction_error) + " <= " + num(*recon_tol));
      if (operator_tol && !errors.empty())
        check(out, dir + ".operator", op_error <= *operator_tol, num(op_error) + " <= " + num(*operator_tol));
      if (assert_certified) {
        check(out, dir + ".certified_tail", dec.reconstruction_error <= dec.certified_tail_bound + 1e-10,
              num(dec.reconstruction_error) + " <= " + num(dec.certified_tail_bound) + " + 1e-10");
        if (reverse)
          check(out, dir + ".contraction", dec.contraction <= bound + 1e-10,
                num(dec.contraction) + " <= " + num(bound) + " + 1e-10");
      }
    }
    return out;
  };
}

// kernel-decay: seminorms of K_n = (b^n psi2)^v.
Job prepare_kernel_decay(const Config& cfg, const Context& ctx) {
  const GridSpec grid = read_grid(cfg, 1, 1024, 64.0);
  const cplx z = read_complex(cfg, "kernel.z", {2.0, 0.0});
  const double delta = cfg.number("kernel.delta", 1.0);
  const auto r0 = cfg.maybe_number("kernel.r0");
  const int alpha0 = cfg.integer("kernel.alpha0", grid.dimension() + 1);
  const int beta0 = cfg.integer("kernel.beta0", 0);
  const int n_min = cfg.integer("kernel.n_min", 20);
  const int n_max = cfg.integer("kernel.n_max", 60);
  const auto ratio_slack = cfg.maybe_number("assert.ratio_slack");
  const auto slope_rel = cfg.maybe_number("assert.slope_rel");
  if (n_min < 1) cfg.fail("kernel.n_min", "must be >= 1");
  if (n_max < n_min + 1) cfg.fail("kernel.n_max", "must exceed kernel.n_min");
  if (alpha0 < 0 || alpha0 > grid.dimension() + 1) cfg.fail("kernel.alpha0", "must lie in [0, d + 1]");
  if (beta0 < 0 || beta0 > 2) cfg.fail("kernel.beta0", "must lie in [0, 2]");
  NeumannPlan plan = guarded(cfg, "kernel.z_re", [&] {
    auto p = NeumannPlan::make(z, delta, grid.dimension(), Direction::forward, r0);
    p.validate();
    return p;
  });
  plan.alpha0 = alpha0;
  plan.beta0 = beta0;
  guarded(cfg, "grid.points", [&] { require_in_window(cutoff_pair(plan.r0).outer, grid); return 0; });

  return [=] {
    Output out;
    out.columns = {"n", "seminorm", "ratio", "ratio_bound", "majorant"};
    out.grids.push_back(grid_json(grid));
    const std::size_t count = static_cast<std::size_t>(n_max - n_min + 1);
    std::vector<double> s(count);
    parallel_for(count, ctx.workers, [&](std::size_t i) {
      s[i] = kernel_sequence(plan, grid, n_min + static_cast<int>(i)).seminorm;
    });
    const double base = std::pow(2.0 * plan.r0, plan.delta);
    bool ratios_ok = true;
    std::vector<double> ns, ss;
    for (std::size_t i = 0; i < count; ++i) {
      const int n = n_min + static_cast<int>(i);
      const double ratio = i == 0 ? std::nan("") : s[i] / s[i - 1];
      const double bound = i == 0 ? std::nan("") : base * std::pow(double(n) / (n - 1), alpha0);
      if (i > 0 && ratio_slack && !(ratio <= bound * *ratio_slack)) ratios_ok = false;
      out.rows.push_back({std::to_string(n), num(s[i]), num(ratio), num(bound),
                          num(std::pow(n, alpha0) * std::pow(base, n))});
      ns.push_back(n);
      ss.push_back(s[i]);
    }
    const double slope = loglog_slope(ns, ss);
    // log s_n against n (not log n): the decay is geometric.
    std::vector<double> logs(ss.size());
    for (std::size_t i = 0; i < ss.size(); ++i) logs[i] = std::log(ss[i]);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) mx += ns[i], my += logs[i];
    mx /= ns.size();
    my /= ns.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) sxy += (ns[i] - mx) * (logs[i] - my), sxx += (ns[i] - mx) * (ns[i] - mx);
    const double geometric_slope = sxy / sxx;
    const double reference = plan.delta * std::log(2.0 * plan.r0);
    out.summary["r0"] = plan.r0;
    out.summary["alpha0"] = alpha0;
    out.summary["beta0"] = beta0;
    out.summary["log_slope_per_n"] = geometric_slope;
    out.summary["reference_slope"] = reference;
    out.summary["loglog_slope"] = slope;
    if (ratio_slack) check(out, "ratios", ratios_ok, "s_n / s_{n-1} <= bound * " + num(*ratio_slack));
    if (slope_rel) {
      const double rel = std::abs(geometric_slope - reference) / std::abs(reference);
      check(out, "slope", rel <= *slope_rel, "relative deviation " + num(rel) + " <= " + num(*slope_rel));
    }
    return out;
  };
}

// probe: decay curves of ||(lambda - B) f_N|| / ||f_N||.
Job prepare_probe(const Config& cfg, const Context& ctx) {
  const auto lambdas = cfg.numbers("probe.lambdas", {0.5});
  const auto ps = cfg.numbers("probe.p", {2.0});
  const double delta = cfg.number("probe.delta", 1.0);
  const double rho = cfg.number("probe.rho", 0.5);
  const auto sweep = cfg.integers("probe.sweep", {8, 16, 32, 64, 128});
  const int dimension = cfg.integer("probe.dimension", 1);
  const auto weight_exponent = cfg.maybe_number("weight.exponent");
  const auto max_ratio = cfg.maybe_number("assert.max_ratio");
  const auto min_ratio = cfg.maybe_number("assert.min_ratio");
  const auto max_halving = cfg.maybe_number("assert.max_halving");
  const auto max_slope = cfg.maybe_number("assert.max_slope");
  for (double p : ps)
    if (!(p >= 1.0)) cfg.fail("probe.p", "exponents must satisfy 1 <= p < inf");
  if (!(delta > 0.0)) cfg.fail("probe.delta", "must be positive");
  if (!(rho > 0.0)) cfg.fail("probe.rho", "must be positive");
  if (dimension != 1 && dimension != 2) cfg.fail("probe.dimension", "must be 1 or 2");
  for (int n : sweep)
    if (n < 1) cfg.fail("probe.sweep", "values must be positive");

  struct Curve {
    ProbeSpec spec;
    ProbeGeometry geometry;
  };
  std::vector<Curve> curves;
  for (double lambda : lambdas)
    for (double p : ps) {
      ProbeSpec spec;
      spec.lambda = lambda;
      spec.p = p;
      spec.delta = delta;
      spec.rho = rho;
      spec.sweep = sweep;
      spec.dimension = dimension;
      if (weight_exponent) spec.weight = WeightSpec{*weight_exponent, p};
      const std::string key = weight_exponent ? "weight.exponent" : "probe.lambdas";
      const ProbeGeometry g = guarded(cfg, key, [&] { return probe_geometry(spec); });
      if (*std::min_element(sweep.begin(), sweep.end()) < g.min_n)
        cfg.fail("probe.sweep", "N must be >= " + std::to_string(g.min_n) + " for lambda = " + num(lambda));
      curves.push_back({spec, g});
    }
  std::vector<int> sorted = sweep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) cfg.fail("probe.sweep", "duplicate N");

  return [=] {
    Output out;
    out.columns = {"lambda", "p", "delta", "N", "ratio", "achieved_lambda", "slope"};
    const std::size_t per = sorted.size();
    std::vector<double> ratios(curves.size() * per);
    parallel_for(ratios.size(), ctx.workers, [&](std::size_t t) {
      const Curve& c = curves[t / per];
      ratios[t] = probe_ratio(c.spec, c.geometry, sorted[t % per]);
    });
    for (std::size_t c = 0; c < curves.size(); ++c) {
      const auto& curve = curves[c];
      out.grids.push_back(grid_json(curve.geometry.grid));
      std::vector<double> x(sorted.begin(), sorted.end());
      std::vector<double> y(ratios.begin() + c * per, ratios.begin() + (c + 1) * per);
      const double slope = per >= 2 ? loglog_slope(x, y) : std::nan("");
      const std::string tag = "lambda=" + num(curve.spec.lambda) + ",p=" + num(curve.spec.p);
      for (std::size_t i = 0; i < per; ++i)
        out.rows.push_back({num(curve.spec.lambda), num(curve.spec.p), num(delta), std::to_string(sorted[i]),
                            num(y[i]), num(curve.geometry.achieved_lambda), num(slope)});
      const double ymax = *std::max_element(y.begin(), y.end());
      const double ymin = *std::min_element(y.begin(), y.end());
      if (max_ratio) check(out, tag + ".max_ratio", ymax <= *max_ratio, num(ymax) + " <= " + num(*max_ratio));
      if (min_ratio) check(out, tag + ".min_ratio", ymin >= *min_ratio, num(ymin) + " >= " + num(*min_ratio));
      if (max_halving) {
        double worst = 0.0;
        for (std::size_t i = 1; i < per; ++i)
          if (sorted[i] == 2 * sorted[i - 1]) worst = std::max(worst, y[i] / y[i - 1]);
        check(out, tag + ".halving", worst <= *max_halving, num(worst) + " <= " + num(*max_halving));
      }
      if (max_slope) check(out, tag + ".slope", slope <= *max_slope, num(slope) + " <= " + num(*max_slope));
    }
    return out;
  };
}

// spectrum-map: probe lower bounds and the p = 2 oracle over a z rectangle.
Job prepare_spectrum_map(const Config& cfg, const Context& ctx) {
  const GridSpec oracle_grid = read_grid(cfg, 1, 1024, 32.0);
  ZGrid zs;
  zs.re_min = cfg.number("zgrid.re_min", zs.re_min);
  zs.re_max = cfg.number("zgrid.re_max", zs.re_max);
  zs.im_min = cfg.number("zgrid.im_min", zs.im_min);
  zs.im_max = cfg.number("zgrid.im_max", zs.im_max);
  zs.n_re = cfg.integer("zgrid.n_re", zs.n_re);
  zs.n_im = cfg.integer("zgrid.n_im", zs.n_im);
  if (zs.n_re < 1 || zs.n_re > 1000) cfg.fail("zgrid.n_re", "must lie in [1, 1000]");
  if (zs.n_im < 1 || zs.n_im > 1000) cfg.fail("zgrid.n_im", "must lie in [1, 1000]");
  if (zs.re_max < zs.re_min) cfg.fail("zgrid.re_max", "must be >= zgrid.re_min");
  if (zs.im_max < zs.im_min) cfg.fail("zgrid.im_max", "must be >= zgrid.im_min");
  const double p = cfg.number("spectrum.p", 2.0);
  const double delta = cfg.number("spectrum.delta", 1.0);
  ProbeFamily family;
  family.rho = cfg.number("spectrum.rho", family.rho);
  family.sweep = cfg.integers("spectrum.sweep", family.sweep);
  family.lambdas = cfg.numbers("spectrum.lambdas", family.lambdas);
  if (!(p >= 1.0)) cfg.fail("spectrum.p", "must be >= 1");
  if (!(delta > 0.0)) cfg.fail("spectrum.delta", "must be positive");
  for (double l : family.lambdas)
    if (!(l >= 0.0 && l <= 1.0)) cfg.fail("spectrum.lambdas", "values must lie in [0, 1]");
  for (int n : family.sweep)
    if (n < 1) cfg.fail("spectrum.sweep", "values must be positive");
  if (!(family.rho > 0.0)) cfg.fail("spectrum.rho", "must be positive");

  return [=] {
    Output out;
    out.columns = {"re_z", "im_z", "pole", "lower_bound", "oracle_p2"};
    out.grids.push_back(grid_json(oracle_grid));
    const auto cells = spectrum_map(zs, p, delta, family, oracle_grid, ctx.workers);
    for (const auto& c : cells)
      out.rows.push_back({num(c.z.real()), num(c.z.imag()), c.pole ? "pole" : "0",
                          num(c.lower_bound), num(c.oracle_p2)});
    return out;
  };
}

// norms: norm evaluation of one field.
Job prepare_norms(const Config& cfg, const Context& ctx) {
  const Field f = read_input_field(cfg, ctx, 1, 1024, 32.0);
  const int d = f.grid().dimension();
  const double p = cfg.number("norms.p", 2.0);
  const double q = cfg.number("norms.q", 2.0);
  const double alpha = cfg.number("norms.alpha", 0.0);
  const int max_level = cfg.integer("lp.max_level", 5);
  const auto weight_exponent = cfg.maybe_number("weight.exponent");
  const bool herz = cfg.has("herz.alpha") || cfg.has("herz.p") || cfg.has("herz.q");
  HerzParams hp{cfg.number("herz.alpha", 0.0), cfg.number("herz.p", p), cfg.number("herz.q", q)};
  if (!(p >= 1.0)) cfg.fail("norms.p", "must be >= 1");
  if (!(q >= 1.0)) cfg.fail("norms.q", "must be >= 1");
  if (max_level < 1 || max_level > 30) cfg.fail("lp.max_level", "must lie in [1, 30]");
  std::optional<WeightSpec> w;
  if (weight_exponent) {
    w = WeightSpec{*weight_exponent, p};
    guarded(cfg, "weight.exponent", [&] { w->validate(d); return 0; });
  }
  if (herz) guarded(cfg, "herz.alpha", [&] { hp.validate(d); return 0; });
  const LPFamily family = guarded(cfg, "lp.max_level", [&] { return build_lp_family(max_level); });

  return [=] {
    Output out;
    out.columns = {"name", "value"};
    out.grids.push_back(grid_json(f.grid()));
    json record;
    record["lp"] = lp_norm(f, p);
    if (w) {
      record["weighted_lp"] = weighted_lp_norm(f, p, *w);
      if (p > 1.0 || w->exponent <= 0.0)
        record["ap_constant"] = ap_constant_estimate(*w, d, CubeFamily::standard(f.grid().half_width()));
    }
    if (herz) record["herz"] = herz_norm(f, hp);
    record["besov"] = besov_norm(f, alpha, p, q, family);
    record["triebel"] = triebel_norm(f, alpha, p, q, family);
    for (const auto& [name, value] : record.items()) out.rows.push_back({name, num(value.get<double>())});
    json doc;
    doc["parameters"] = {{"p", p}, {"q", q}, {"alpha", alpha}, {"lp_max_level", max_level}};
    if (w) doc["parameters"]["weight_exponent"] = w->exponent;
    if (herz) doc["parameters"]["herz"] = {{"alpha", hp.alpha}, {"p", hp.p}, {"q", hp.q}};
    doc["norms"] = record;
    out.extra_files.emplace_back("norms.json", doc.dump(2) + "\n");
    out.summary = record;
    return out;
  };
}

// mikhlin: condition report for one symbol.
Job prepare_mikhlin(const Config& cfg, const Context&) {
  const GridSpec grid = read_grid(cfg, 1, 1024, 32.0);
  const Symbol m = read_symbol(cfg, "symbol", grid.dimension());
  const int kmax = cfg.integer("mikhlin.kmax", grid.dimension() / 2 + 1);
  MikhlinOptions opt;
  opt.refinement = cfg.integer("mikhlin.refinement", opt.refinement);
  opt.exclusion_cells = cfg.number("mikhlin.exclusion_cells", opt.exclusion_cells);
  opt.growth_threshold = cfg.number("mikhlin.growth_threshold", opt.growth_threshold);
  const std::string expect = cfg.string("assert.expect", "");
  if (kmax < 0 || kmax > 3) cfg.fail("mikhlin.kmax", "must lie in [0, 3]");
  if (opt.refinement < 2) cfg.fail("mikhlin.refinement", "must be >= 2");
  if (!(opt.exclusion_cells >= 0.0)) cfg.fail("mikhlin.exclusion_cells", "must be >= 0");
  if (!(opt.growth_threshold > 1.0)) cfg.fail("mikhlin.growth_threshold", "must exceed 1");
  if (!expect.empty() && expect != "pass" && expect != "fail") cfg.fail("assert.expect", "expected pass or fail");

  return [=] {
    Output out;
    out.columns = {"k", "sup_coarse", "sup_fine", "growth", "flagged"};
    out.grids.push_back(grid_json(grid));
    const MikhlinReport report = mikhlin_check(m, grid, kmax, opt);
    for (const auto& o : report.orders)
      out.rows.push_back({std::to_string(o.k), num(o.sup_coarse), num(o.sup_fine), num(o.growth),
                          o.unbounded_suspect ? "1" : "0"});
    out.summary["symbol"] = m.name();
    out.summary["coarse_step"] = report.coarse_step;
    out.summary["fine_step"] = report.fine_step;
    out.summary["pass"] = report.pass();
    if (!expect.empty())
      check(out, "mikhlin", report.pass() == (expect == "pass"),
            std::string("report ") + (report.pass() ? "pass" : "fail") + ", expected " + expect);
    return out;
  };
}

using Preparer = Job (*)(const Config&, const Context&);

const std::vector<std::pair<std::string, Preparer>>& table() {
  static const std::vector<std::pair<std::string, Preparer>> t{
      {"apply", prepare_apply},
      {"resolvent-verify", prepare_resolvent_verify},
      {"kernel-decay", prepare_kernel_decay},
      {"probe", prepare_probe},
      {"spectrum-map", prepare_spectrum_map},
      {"norms", prepare_norms},
      {"mikhlin", prepare_mikhlin},
  };
  return t;
}

std::string csv_text(const Output& out) {
  std::string s;
  for (std::size_t i = 0; i < out.columns.size(); ++i) s += (i ? "," : "") + out.columns[i];
  s += '\n';
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += '\n';
  }
  return s;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, prep] : table()) n.push_back(name);
    return n;
  }();
  return names;
}

int run(const RunOptions& options, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto it = std::find_if(table().begin(), table().end(),
                               [&](const auto& e) { return e.first == options.command; });
  if (it == table().end()) {
    err << "error: unknown subcommand '" << options.command << "'\n";
    return exit_usage;
  }
  if (options.workers < 1) {
    err << "error: --workers must be >= 1\n";
    return exit_usage;
  }

  Output out;
  std::string config_echo;
  Context ctx;
  ctx.workers = options.workers;
  try {
    Config cfg = Config::load(options.config_path);
    for (const auto& o : options.overrides) cfg.set(o);
    if (options.seed) {
      cfg.set("seed=" + std::to_string(*options.seed));
    }
    if (cfg.has("seed")) {
      const double s = cfg.number("seed");
      if (s < 0 || s != std::floor(s) || s > 9007199254740992.0) cfg.fail("seed", "must be a non-negative integer");
      ctx.seed = static_cast<std::uint64_t>(s);
    }
    const Job job = it->second(cfg, ctx);
    cfg.require_all_used();
    config_echo = cfg.echo_json();
    out = job();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << options.command << " failed: " << e.what() << "\n";
    return exit_usage;
  }

  const bool all_pass = std::all_of(out.assertions.begin(), out.assertions.end(),
                                    [](const Assertion& a) { return a.pass; });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["command"] = options.command;
  manifest["config_path"] = options.config_path.string();
  manifest["config"] = json::parse(config_echo);
  manifest["seed"] = ctx.seed;
  manifest["workers"] = ctx.workers;
  manifest["versions"] = {{"riesz", kVersion},
                          {"fftw", fft_backend_version()},
                          {"boost", BOOST_LIB_VERSION},
                          {"compiler", __VERSION__}};
  manifest["csv"] = {{"file", options.command + ".csv"},
                     {"schema_version", csv_schema_version},
                     {"columns", out.columns},
                     {"rows", out.rows.size()}};
  manifest["grids"] = out.grids;
  manifest["summary"] = out.summary;
  json checks = json::array();
  for (const auto& a : out.assertions) checks.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  manifest["assertions"] = checks;
  manifest["status"] = all_pass ? "ok" : "assertion_failure";
  manifest["started_at"] = utc_now();
  manifest["wall_time_seconds"] = wall;

  try {
    std::filesystem::create_directories(options.out_dir);
    write_file_atomic(options.out_dir / (options.command + ".csv"), csv_text(out));
    if (!out.fields.empty()) {
      std::filesystem::create_directories(options.out_dir / "fields");
      for (const auto& [stem, field] : out.fields) dump_field(field, options.out_dir / "fields" / stem);
    }
    for (const auto& [name, text] : out.extra_files) write_file_atomic(options.out_dir / name, text);
    write_file_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: writing outputs failed: " << e.what() << "\n";
    return exit_usage;
  }

  for (const auto& a : out.assertions)
    if (!a.pass) err << "assertion failed: " << a.name << " (requires " << a.detail << ")\n";
  return all_pass ? exit_ok : exit_assertion;
}

}  // namespace riesz::cli
