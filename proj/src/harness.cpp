#include "etlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <thread>

#include "etlab/random.hpp"
#include "etlab/warped.hpp"
#include "parallel.hpp"

namespace etlab::harness {

using curvature::BundleOptions;
using curvature::CurvatureBundle;
using curvature::PotentialBundle;
using identities::Conditionality;
using identities::IdentityDef;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool is_conditional(const IdentityDef& d) {
  return d.conditionality != Conditionality::kUnconditional;
}

// Looser floors for warped targets, where h carries RK4 truncation error.
double warped_floor(const std::string& id) {
  static const std::set<std::string> loose = {"C8", "C9", "C10", "C13", "C14", "C15"};
  if (id[0] != 'C') return 0.0;
  return loose.count(id) ? 1e-5 : 1e-6;
}

// Everything needed to evaluate one target point by point.
struct Source {
  std::string name;
  std::string kind;
  int dim = 0;
  bool has_f = false, has_h = false;
  std::vector<std::vector<double>> points;
  std::vector<chart::RejectedPoint> rejected;
  std::function<CurvatureBundle(int, BundleOptions)> bundle;
  std::function<PotentialBundle(int, const CurvatureBundle&)> potential;
  std::optional<chart::ModelExpectation> model;
};

Source chart_source(std::shared_ptr<const chart::ChartSpec> spec, const chart::SampleStrategy& s) {
  Source src;
  src.name = spec->name;
  src.dim = spec->dim;
  src.has_f = spec->f.has_value();
  src.has_h = spec->h.has_value();
  auto set = chart::sample_points(*spec, s);
  src.points = std::move(set.accepted);
  src.rejected = std::move(set.rejected);
  src.bundle = [spec, pts = src.points](int i, BundleOptions o) {
    return curvature::bundle(*spec, pts[i], o);
  };
  src.potential = [spec](int, const CurvatureBundle& cb) { return curvature::potential(*spec, cb); };
  return src;
}

chart::ChartSpec corrupted(chart::ChartSpec spec) {
  if (!spec.f) throw ConfigError(spec.name + ": corrupt_f needs a chart with f");
  spec.f = *spec.f * (expr::constant(1) + expr::constant(0.01) * expr::variable(spec.coords[0]));
  spec.name += " [f corrupted]";
  return spec;
}

Source fuzz_source(const FuzzTarget& fz) {
  if (fz.dim < 3 || fz.dim > 6) throw ConfigError("fuzz dim must lie in [3, 6]");
  if (fz.count < 1 || fz.points_per_metric < 1) {
    throw ConfigError("fuzz count and points per metric must be positive");
  }
  if (!(fz.amplitude > 0)) throw ConfigError("fuzz amplitude must be positive");
  Source src;
  src.kind = "fuzz";
  src.dim = fz.dim;
  src.name = "fuzz(dim=" + std::to_string(fz.dim) + ", count=" + std::to_string(fz.count) +
             ", seed=" + std::to_string(fz.seed) + ", amplitude=" + short_fmt(fz.amplitude) + ")";
  src.has_f = true;
  src.has_h = false;
  auto specs = std::make_shared<std::vector<chart::ChartSpec>>();
  auto owner = std::make_shared<std::vector<int>>();
  for (int k = 0; k < fz.count; ++k) {
    const std::uint64_t seed = fz.seed + static_cast<std::uint64_t>(k);
    specs->push_back(chart::fuzz_metric(fz.dim, seed, fz.amplitude));
    SplitMix64 mix(seed ^ 0x5deece66dULL);
    auto set = chart::sample_points(specs->back(),
                                    chart::SampleStrategy::random(fz.points_per_metric, mix.next()));
    for (auto& p : set.accepted) {
      src.points.push_back(std::move(p));
      owner->push_back(k);
    }
    for (auto& r : set.rejected) src.rejected.push_back(std::move(r));
  }
  src.bundle = [specs, owner, pts = src.points](int i, BundleOptions o) {
    return curvature::bundle((*specs)[(*owner)[i]], pts[i], o);
  };
  src.potential = [specs, owner](int i, const CurvatureBundle& cb) {
    return curvature::potential((*specs)[(*owner)[i]], cb);
  };
  return src;
}

Source warped_source(const WarpedTarget& w) {
  if (w.n < 3 || w.n > 6) throw ConfigError("warped n must lie in [3, 6]");
  const auto phi = expr::parse(w.phi);
  const auto red = warped::reduce(phi, w.n, {w.t0, w.t1});
  auto chart = std::make_shared<warped::WarpedChart>(
      warped::integrate(red, w.t0, w.t1, w.f0, w.df0, w.steps, w.samples));
  Source src;
  src.kind = "warped";
  src.dim = w.n;
  src.has_f = src.has_h = true;
  src.name = "warped(phi=" + expr::to_string(phi) + ", n=" + std::to_string(w.n) +
             ", t=[" + short_fmt(w.t0) + ", " + short_fmt(w.t1) + "], f0=" + short_fmt(w.f0) +
             ", df0=" + short_fmt(w.df0) + ", steps=" + std::to_string(w.steps) + ")";
  for (std::size_t i = 0; i < chart->size(); ++i) src.points.push_back(chart->point(i));
  if (chart->solution().stats.truncated) {
    src.rejected.push_back({{chart->solution().stats.t_end}, "f_nonpositive beyond this t"});
  }
  src.bundle = [chart](int i, BundleOptions o) { return chart->bundle(i, o); };
  src.potential = [chart](int i, const CurvatureBundle& cb) { return chart->potential(i, cb); };
  return src;
}

Source resolve(const Target& t, const SuiteConfig& cfg) {
  switch (t.kind) {
    case Target::Kind::kCatalog: {
      auto model = chart::catalog_model(t.name, t.params);
      auto spec = t.corrupt_f ? corrupted(model.chart) : model.chart;
      Source src = chart_source(std::make_shared<const chart::ChartSpec>(std::move(spec)),
                                cfg.sampling);
      src.kind = "catalog";
      // Model values describe the uncorrupted structure only.
      if (!t.corrupt_f) src.model = model.expect;
      return src;
    }
    case Target::Kind::kChart: {
      if (!t.chart) throw ConfigError("chart target '" + t.name + "' carries no chart");
      auto spec = t.corrupt_f ? corrupted(*t.chart) : *t.chart;
      if (spec.name.empty()) spec.name = t.name;
      Source src = chart_source(std::make_shared<const chart::ChartSpec>(std::move(spec)),
                                cfg.sampling);
      src.kind = "chart";
      return src;
    }
    case Target::Kind::kFuzz:
      if (t.corrupt_f) throw ConfigError("corrupt_f applies to catalog and chart targets");
      return fuzz_source(t.fuzz);
    case Target::Kind::kWarped:
      if (t.corrupt_f) throw ConfigError("corrupt_f applies to catalog and chart targets");
      return warped_source(t.warped);
  }
  throw ConfigError("unknown target kind");
}

struct PointOutcome {
  std::optional<std::string> error;  // bundle construction failed
  std::vector<std::optional<identities::IdentityResult>> results;
  std::vector<std::optional<std::string>> failures;
  double R = 0, ric0_sq = 0, grad_ric_sq = 0;
  std::optional<double> lambda, big_lambda, big_lambda_grad;
};

PointOutcome evaluate_point(const Source& src, int i, const std::vector<const IdentityDef*>& defs,
                            const std::vector<double>& rtols, const std::vector<bool>& run,
                            int headroom, curvature::RiemannLowering lowering) {
  PointOutcome out;
  out.results.resize(defs.size());
  out.failures.resize(defs.size());
  CurvatureBundle cb;
  std::optional<PotentialBundle> pb;
  try {
    cb = src.bundle(i, {headroom, lowering});
    if (src.has_f) pb = src.potential(i, cb);
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }

  const auto g = tensor::value(cb.g);
  const auto gi = tensor::value(cb.g_inv);
  out.R = cb.scalar.value();
  out.ric0_sq = tensor::norm_sq(tensor::traceless(tensor::value(cb.ric), g, gi), gi);
  out.grad_ric_sq = tensor::norm_sq(tensor::value(cb.grad_ric), gi);
  if (pb && pb->has_h) {
    out.lambda = identities::lambda_value(*pb, cb);
    const auto big = identities::big_lambda_jet(*pb, cb);
    out.big_lambda = big.value();
    out.big_lambda_grad =
        std::sqrt(tensor::norm_sq(tensor::value(curvature::gradient(big)), gi));
  }
  for (std::size_t k = 0; k < defs.size(); ++k) {
    if (!run[k]) continue;
    try {
      out.results[k] = identities::evaluate_identity(*defs[k], cb, pb ? &*pb : nullptr, rtols[k]);
    } catch (const Error& e) {
      out.failures[k] = e.what();
    }
  }
  return out;
}

ScalarSummary summarize(const std::vector<double>& v) {
  ScalarSummary s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

// Observed value farthest from `expected`.
double farthest(const std::vector<double>& v, double expected) {
  double best = expected;
  for (double x : v)
    if (!(std::abs(x - expected) <= std::abs(best - expected))) best = x;
  return best;
}

ExpectationCheck value_check(const std::string& name, const std::vector<double>& v,
                             double expected, double atol) {
  ExpectationCheck c;
  c.name = name;
  c.expected = expected;
  c.observed = farthest(v, expected);
  c.tolerance = atol * std::max(1.0, std::abs(expected));
  c.pass = !v.empty() && std::abs(c.observed - expected) <= c.tolerance;
  if (v.empty()) c.detail = "no values";
  return c;
}

ExpectationCheck spread_check(const std::string& name, const std::vector<double>& v, double tol) {
  ExpectationCheck c;
  c.name = name;
  c.expected = 0.0;
  const auto s = summarize(v);
  c.observed = s.spread();
  c.tolerance = tol;
  c.pass = !v.empty() && c.observed <= tol;
  return c;
}

ExpectationCheck flag_check(const std::string& name, double observed, double tol, bool expected) {
  ExpectationCheck c;
  c.name = name;
  c.observed = observed;
  c.tolerance = tol;
  c.pass = expected ? observed <= tol : observed > tol;
  c.detail = std::string("expected ") + (expected ? "true" : "false") + ", observed " +
             (observed <= tol ? "true" : "false");
  return c;
}

chart::LambdaSign sign_with_tol(double v, double tol) {
  if (std::abs(v) <= tol) return chart::LambdaSign::kZero;
  return v > 0 ? chart::LambdaSign::kPositive : chart::LambdaSign::kNegative;
}

TargetReport run_target(const Target& t, const SuiteConfig& cfg,
                        const std::vector<const IdentityDef*>& selected, int threads) {
  Source src = resolve(t, cfg);
  TargetReport rep;
  rep.name = src.name;
  rep.kind = src.kind;
  rep.dim = src.dim;
  const int n = src.dim;
  const Tolerances& tol = cfg.tol;

  std::vector<double> rtols;
  std::vector<bool> run;
  std::vector<std::optional<std::string>> skip;
  int headroom = 0;
  for (const auto* d : selected) {
    double r = d->default_rtol;
    if (auto it = tol.identity_rtol.find(d->id); it != tol.identity_rtol.end()) {
      r = it->second;
    } else if (tol.rtol) {
      r = *tol.rtol;
    } else if (src.kind == "warped") {
      r = std::max(r, warped_floor(d->id));
    }
    rtols.push_back(r);
    std::optional<std::string> reason = d->dim_skip_reason(n);
    if (!reason && is_conditional(*d) && !(src.has_f && src.has_h)) reason = "missing_structure";
    if (!reason && d->needs_f && !src.has_f) reason = "missing_potential";
    skip.push_back(reason);
    run.push_back(!reason);
    if (!reason) headroom = std::max(headroom, d->headroom);
  }

  const int count = static_cast<int>(src.points.size());
  std::vector<PointOutcome> outcomes(count);
  detail::parallel_for(count, threads, [&](int i) {
    outcomes[i] = evaluate_point(src, i, selected, rtols, run, headroom, cfg.lowering);
  });

  // Points whose bundle failed join the rejected list; the rest are accepted.
  std::vector<int> good;
  for (int i = 0; i < count; ++i) {
    if (outcomes[i].error) {
      rep.rejected.push_back({src.points[i], *outcomes[i].error});
    } else {
      good.push_back(i);
    }
  }
  rep.rejected.insert(rep.rejected.begin(), src.rejected.begin(), src.rejected.end());
  rep.points_accepted = static_cast<int>(good.size());
  if (good.empty()) {
    rep.error = "no accepted points";
    rep.pass = false;
  }

  std::vector<double> R, ric0, dric, lam, big, big_grad;
  for (int i : good) {
    const auto& o = outcomes[i];
    R.push_back(o.R);
    ric0.push_back(o.ric0_sq);
    dric.push_back(o.grad_ric_sq);
    if (o.lambda) lam.push_back(*o.lambda);
    if (o.big_lambda) big.push_back(*o.big_lambda);
    if (o.big_lambda_grad) big_grad.push_back(*o.big_lambda_grad);
  }
  if (!good.empty()) {
    rep.scalars["R"] = summarize(R);
    rep.scalars["ric_traceless_sq"] = summarize(ric0);
    rep.scalars["grad_ric_sq"] = summarize(dric);
  }
  if (!lam.empty()) rep.scalars["lambda"] = summarize(lam);
  if (!big.empty()) {
    const auto s = summarize(big);
    rep.scalars["big_lambda"] = s;
    const auto d = summarize(big_grad);
    rep.scalars["big_lambda_grad_norm"] = d;
    // Symmetric samples can share a value, so the gradient is checked too.
    const double bound = tol.lambda_constancy * (1.0 + std::abs(s.mean));
    rep.big_lambda_constant = s.spread() <= bound && d.max <= bound;
  }

  for (std::size_t k = 0; k < selected.size(); ++k) {
    const IdentityDef& d = *selected[k];
    IdentityAggregate a;
    a.id = d.id;
    a.conditionality = std::string(identities::to_string(d.conditionality));
    a.rtol = rtols[k];
    a.skip_reason = skip[k];
    if (!a.skip_reason && d.conditionality == Conditionality::kRequiresStructureAndConstantLambda &&
        rep.big_lambda_constant == false) {
      a.skip_reason = "lambda_not_constant";
    }
    if (a.skip_reason) {
      rep.identities.push_back(std::move(a));
      continue;
    }
    double sum_abs = 0, sum_rel = 0;
    bool all_pass = true;
    for (int i : good) {
      const auto& o = outcomes[i];
      if (o.failures[k]) {
        a.errors.push_back("point " + std::to_string(i) + ": " + *o.failures[k]);
        all_pass = false;
        continue;
      }
      const auto& r = *o.results[k];
      ++a.points;
      sum_abs += r.abs_residual;
      sum_rel += r.rel_residual;
      // NaN residuals are worst by definition.
      const bool worse = a.worst_point.empty() || !(r.rel_residual <= a.max_rel);
      if (worse) {
        a.max_rel = r.rel_residual;
        a.worst_point = r.point;
      }
      if (!(r.abs_residual <= a.max_abs)) a.max_abs = r.abs_residual;
      a.max_lhs = std::max(a.max_lhs, r.lhs_norm);
      a.max_rhs = std::max(a.max_rhs, r.rhs_norm);
      all_pass = all_pass && r.pass;
    }
    if (a.points > 0) {
      a.mean_abs = sum_abs / a.points;
      a.mean_rel = sum_rel / a.points;
    }
    a.pass = all_pass && a.points > 0;
    if (!a.pass) rep.pass = false;
    rep.identities.push_back(std::move(a));
  }

  if (!good.empty()) {
    if (src.model) {
      const auto& ex = *src.model;
      if (ex.lambda_expected) {
        rep.expectations.push_back(value_check("lambda", lam, *ex.lambda_expected, tol.value_atol));
        rep.expectations.push_back(spread_check("lambda_spread", lam, tol.lambda_spread));
      }
      if (ex.lambda_sign != chart::LambdaSign::kNotApplicable) {
        ExpectationCheck c;
        c.name = "lambda_sign";
        const double mean = lam.empty() ? 0.0 : summarize(lam).mean;
        const double zero_tol =
            tol.value_atol * std::max(1.0, std::abs(ex.lambda_expected.value_or(0.0)));
        c.observed = mean;
        c.tolerance = zero_tol;
        const auto got = sign_with_tol(mean, zero_tol);
        c.pass = !lam.empty() && got == ex.lambda_sign;
        c.detail = "expected " + std::string(chart::to_string(ex.lambda_sign)) + ", observed " +
                   std::string(chart::to_string(got));
        rep.expectations.push_back(c);
      }
      if (ex.scalar_curv_expected) {
        rep.expectations.push_back(value_check("R", R, *ex.scalar_curv_expected, tol.value_atol));
      }
      if (ex.big_lambda_expected) {
        rep.expectations.push_back(
            value_check("big_lambda", big, *ex.big_lambda_expected, tol.value_atol));
        rep.expectations.push_back(spread_check("big_lambda_spread", big, tol.big_lambda_spread));
      }
      rep.expectations.push_back(
          flag_check("einstein", summarize(ric0).max, tol.einstein, ex.einstein));
      rep.expectations.push_back(
          flag_check("parallel_ricci", summarize(dric).max, tol.parallel, ex.parallel_ricci));
      if (rep.big_lambda_constant) {
        ExpectationCheck c;
        c.name = "big_lambda_constant";
        c.observed = std::max(rep.scalars["big_lambda"].spread(),
                              rep.scalars["big_lambda_grad_norm"].max);
        c.tolerance = tol.lambda_constancy * (1.0 + std::abs(rep.scalars["big_lambda"].mean));
        c.pass = *rep.big_lambda_constant == ex.einstein;
        c.detail = std::string("expected ") + (ex.einstein ? "true" : "false") + ", observed " +
                   (*rep.big_lambda_constant ? "true" : "false");
        rep.expectations.push_back(c);
      }
    }
    for (const auto& [key, value] : t.expect) {
      const std::vector<double>* v = key == "lambda" ? &lam : key == "R" ? &R : nullptr;
      if (!v) throw ConfigError("unknown expectation '" + key + "' (use lambda or R)");
      rep.expectations.push_back(value_check("expect:" + key, *v, value, tol.value_atol));
    }
  }
  for (const auto& c : rep.expectations)
    if (!c.pass) rep.pass = false;
  return rep;
}

void validate(const Tolerances& tol) {
  auto positive = [](double v, const std::string& what) {
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
  };
  if (tol.rtol) positive(*tol.rtol, "rtol");
  for (const auto& [id, v] : tol.identity_rtol) {
    identities::find(id);
    positive(v, "rtol for " + id);
  }
  positive(tol.value_atol, "value_atol");
  positive(tol.lambda_spread, "lambda_spread");
  positive(tol.big_lambda_spread, "big_lambda_spread");
  positive(tol.lambda_constancy, "lambda_constancy");
  positive(tol.einstein, "einstein tolerance");
  positive(tol.parallel, "parallel tolerance");
}

std::map<std::string, std::string> echo(const SuiteConfig& cfg) {
  std::map<std::string, std::string> m;
  std::string ids;
  for (const auto& id : cfg.identities) ids += (ids.empty() ? "" : ",") + id;
  m["identities"] = ids.empty() ? "all" : ids;
  m["sampling"] = cfg.sampling.kind == chart::SampleStrategy::Kind::kGrid
                      ? "grid " + std::to_string(cfg.sampling.count)
                      : "random " + std::to_string(cfg.sampling.count) + " seed " +
                            std::to_string(cfg.sampling.seed);
  m["rtol"] = cfg.tol.rtol ? fmt(*cfg.tol.rtol) : "default";
  std::string per;
  for (const auto& [id, v] : cfg.tol.identity_rtol) per += (per.empty() ? "" : ",") + id + "=" + fmt(v);
  if (!per.empty()) m["identity_rtol"] = per;
  m["value_atol"] = fmt(cfg.tol.value_atol);
  m["lambda_spread"] = fmt(cfg.tol.lambda_spread);
  m["big_lambda_spread"] = fmt(cfg.tol.big_lambda_spread);
  m["lambda_constancy"] = fmt(cfg.tol.lambda_constancy);
  m["einstein_tol"] = fmt(cfg.tol.einstein);
  m["parallel_tol"] = fmt(cfg.tol.parallel);
  m["riemann_lowering"] =
      cfg.lowering == curvature::RiemannLowering::kStandard ? "standard" : "fourth_slot";
  return m;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ETLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1024) {
      throw ConfigError(std::string("ETLAB_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Report run_suite(const SuiteConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.targets.empty()) throw ConfigError("suite has no targets");
  validate(cfg.tol);
  if (cfg.sampling.count < 1) throw ConfigError("sample count must be positive");
  std::vector<const IdentityDef*> selected;
  if (cfg.identities.empty()) {
    for (const auto& d : identities::registry()) selected.push_back(&d);
  } else {
    std::set<std::string> seen;
    for (const auto& id : cfg.identities) {
      if (seen.insert(id).second) selected.push_back(&identities::find(id));
    }
  }
  const int threads = resolve_threads(cfg.threads);

  Report rep;
  rep.config = echo(cfg);
  for (const auto& t : cfg.targets) {
    rep.targets.push_back(run_target(t, cfg, selected, threads));
    if (!rep.targets.back().pass) rep.overall_pass = false;
  }
  if (cfg.timing) {
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rep;
}

std::vector<Target> catalog_targets() {
  std::vector<Target> out;
  for (const auto& info : chart::catalog_list()) {
    Target t;
    t.kind = Target::Kind::kCatalog;
    t.name = info.name;
    out.push_back(std::move(t));
  }
  return out;
}

SuiteConfig default_suite() {
  SuiteConfig cfg;
  auto catalog = [&](std::string name, chart::Params p = {}) {
    Target t;
    t.kind = Target::Kind::kCatalog;
    t.name = std::move(name);
    t.params = std::move(p);
    cfg.targets.push_back(std::move(t));
  };
  catalog("euclid_ball");
  catalog("sphere_cap", {{"r0", M_PI / 3}});
  catalog("sphere_cap", {{"r0", M_PI / 2}});
  catalog("sphere_cap", {{"r0", 2 * M_PI / 3}});
  catalog("hemisphere");
  catalog("hyperbolic_ball");
  catalog("cylinder3");
  catalog("schwarzschild");
  for (int dim = 3; dim <= 5; ++dim) {
    Target t;
    t.kind = Target::Kind::kFuzz;
    t.fuzz.dim = dim;
    t.fuzz.count = 2;
    t.fuzz.points_per_metric = 5;
    t.fuzz.seed = 1;
    cfg.targets.push_back(std::move(t));
  }
  Target w;
  w.kind = Target::Kind::kWarped;
  w.warped.phi = "t + 0.1*t^3";
  w.warped.n = 3;
  w.warped.steps = 1000;
  w.warped.samples = 11;
  cfg.targets.push_back(std::move(w));
  return cfg;
}

int exit_code(const Report& r) { return r.overall_pass ? 0 : 1; }

}  // namespace etlab::harness
