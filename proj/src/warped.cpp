#include "etlab/warped.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace etlab::warped {

namespace {

// Coefficients of t^k, k <= order, of a jet over the chart variables.
Jet restrict_t(const Jet& j, int order) {
  order = std::min(order, j.order());
  Jet r(1, order);
  const auto& tab = j.table();
  for (int k = 0; k <= order; ++k) {
    jets::MultiIndex alpha{};
    alpha[0] = static_cast<std::uint8_t>(k);
    r.coefficients()[k] = j.coefficients()[tab.find(alpha)];
  }
  return r;
}

// Series of f from f'' = A f + B f', up to order(A) + 2.
Jet solve_series(const Jet& a, const Jet& b, double f, double df) {
  const int m = std::min(a.order(), b.order());
  Jet s(1, m + 2);
  auto c = s.coefficients();
  c[0] = f;
  c[1] = df;
  const auto ac = a.coefficients(), bc = b.coefficients();
  for (int k = 0; k <= m; ++k) {
    jets::Real sum = 0;
    for (int j = 0; j <= k; ++j) sum += ac[j] * c[k - j] + bc[j] * (k - j + 1) * c[k - j + 1];
    c[k + 2] = sum / ((k + 2.0L) * (k + 1.0L));
  }
  return s;
}

std::array<double, kJetOrder + 1> derivatives(const Jet& s) {
  std::array<double, kJetOrder + 1> d{};
  jets::Real fact = 1;
  for (int k = 0; k <= kJetOrder; ++k) {
    if (k > 0) fact *= k;
    d[k] = static_cast<double>(fact * s.coefficients()[k]);
  }
  return d;
}

Jet lift(const std::array<double, kJetOrder + 1>& d, int n, int order) {
  Jet j(n, order);
  const auto& tab = j.table();
  jets::Real fact = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    jets::MultiIndex alpha{};
    alpha[0] = static_cast<std::uint8_t>(k);
    j.coefficients()[tab.find(alpha)] = d[k] / fact;
  }
  return j;
}

}  // namespace

Reduction::Reduction(expr::Expr phi, int n, chart::Interval interval)
    : phi_(std::move(phi)), n_(n) {
  const auto free = expr::free_variables(phi_);
  for (const auto& v : free) {
    if (v != "t") throw UnboundVariable(v, "phi");
  }
  if (!(interval.lo < interval.hi)) throw ConfigError("warped interval must have t0 < t1");
  chart_ = chart::polar_warped_chart("t", phi_, n, interval);
  chart_.name = "warped(phi=" + expr::to_string(phi_) + ", n=" + std::to_string(n) + ")";
}

std::vector<double> Reduction::point(double t) const {
  std::vector<double> p(n_, kPolarAngle);
  p[0] = t;
  p[n_ - 1] = kAzimuth;
  return p;
}

double Reduction::warp(double t) const {
  const double v = chart::evaluate_value(chart_, phi_, point(t));
  if (!std::isfinite(v) || v <= 0.0) {
    throw DegenerateWarp("warp phi(" + std::to_string(t) + ") = " + std::to_string(v) +
                         " is not positive");
  }
  return v;
}

Reduction::Coefficients Reduction::coefficients(double t, int order) const {
  if (order < 0 || order > curvature::kMaxHeadroom + 1) {
    throw ConfigError("reduction coefficients available to order " +
                      std::to_string(curvature::kMaxHeadroom + 1));
  }
  warp(t);
  const auto p = point(t);
  curvature::CurvatureBundle cb;
  try {
    cb = curvature::bundle(chart_, p, {std::max(0, order - 1)});
  } catch (const SingularMetric& e) {
    throw DegenerateWarp(std::string("degenerate warped metric: ") + e.what());
  }
  const int o = std::max(order, 1);
  const Jet ric_tt = restrict_t(cb.ric(0, 0), o);
  const Jet ric_aa = restrict_t(cb.ric(1, 1), o);
  const Jet g_tt = restrict_t(cb.g(0, 0), o + 1);
  const Jet g_aa = restrict_t(cb.g(1, 1), o + 1);
  const Jet gam_tt = restrict_t(cb.gamma(0, 0, 0), o + 1);
  const Jet gam_aa = restrict_t(cb.gamma(0, 1, 1), o + 1);
  Coefficients c;
  c.a = (ric_tt - g_tt * ric_aa / g_aa).truncated(order);
  c.b = (gam_tt - g_tt * gam_aa / g_aa).truncated(order);
  c.ric_tt = ric_tt;
  c.gamma_tt = gam_tt;
  c.g_tt = g_tt;
  c.scalar = restrict_t(cb.scalar, o);
  return c;
}

double Reduction::second_derivative(double t, double f, double df) const {
  const auto c = coefficients(t, 0);
  return c.a.value() * f + c.b.value() * df;
}

double Reduction::h_of(double t, double f, double df) const {
  const auto p = point(t);
  const auto cb = curvature::bundle(chart_, p, {0});
  return (f * cb.ric(1, 1).value() + cb.gamma(0, 1, 1).value() * df) / cb.g(1, 1).value();
}

double Reduction::constraint_residual(const expr::Expr& f, double t) const {
  for (const auto& v : expr::free_variables(f)) {
    if (v != "t") throw UnboundVariable(v, "f");
  }
  warp(t);
  const auto p = point(t);
  const auto cb = curvature::bundle(chart_, p, {0});
  const Jet fj = chart::evaluate_jet(chart_, f, p, 3);
  const auto pb = curvature::potential_from_jets(fj, Jet(n_, 3), cb);
  const auto g = tensor::value(cb.g);
  const auto ric = tensor::value(cb.ric);
  const auto hess = tensor::value(pb.hess_f);
  const double fv = fj.value();
  const double h = (fv * ric(0, 0) - hess(0, 0)) / g(0, 0);
  double lhs = 0, rhs = 0, diff = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double l = fv * ric[i];
    const double r = hess[i] + h * g[i];
    lhs = std::max(lhs, std::abs(l));
    rhs = std::max(rhs, std::abs(r));
    diff = std::max(diff, std::abs(l - r));
  }
  return diff / (1.0 + std::max(lhs, rhs));
}

Reduction reduce(const expr::Expr& phi, int n, chart::Interval interval) {
  return Reduction(phi, n, interval);
}

WarpedSolution integrate(const Reduction& r, double t0, double t1, double f0, double df0,
                         int steps, int samples) {
  if (steps < 100) throw ConfigError("warped integration needs at least 100 steps");
  if (!(t1 > t0)) throw ConfigError("warped integration needs t0 < t1");
  if (samples < 2) throw ConfigError("warped mesh needs at least 2 samples");
  if (!std::isfinite(f0) || !std::isfinite(df0)) throw ConfigError("non-finite initial data");

  WarpedSolution sol;
  sol.phi = r.phi();
  sol.n = r.dim();
  sol.t0 = t0;
  sol.t1 = t1;
  sol.f0 = f0;
  sol.df0 = df0;
  sol.steps = steps;
  sol.step = (t1 - t0) / steps;
  const double n1 = r.dim() - 1.0;

  struct State {
    double f, df, h;
  };
  // A, B, R, R' at one t; stages share t, so each node is evaluated once.
  struct Coef {
    double t, a, b, R, dR;
  };
  std::array<Coef, 2> cache{Coef{NAN, 0, 0, 0, 0}, Coef{NAN, 0, 0, 0, 0}};
  auto coef_at = [&](double t) -> const Coef& {
    for (const auto& c : cache)
      if (c.t == t) return c;
    const auto c = r.coefficients(t, 0);
    ++sol.stats.coefficient_evaluations;
    std::swap(cache[0], cache[1]);
    cache[1] = Coef{t, c.a.value(), c.b.value(), c.scalar.value(),
                    static_cast<double>(c.scalar.coefficients()[1])};
    return cache[1];
  };
  auto rhs = [&](double t, const State& s) {
    const Coef& c = coef_at(t);
    return State{s.df, c.a * s.f + c.b * s.df, (c.R * s.df + 0.5 * s.f * c.dR) / n1};
  };
  auto check = [&](const State& s, double t) {
    if (!std::isfinite(s.f) || !std::isfinite(s.df) || !std::isfinite(s.h)) {
      throw StepFailure("non-finite state at t = " + std::to_string(t));
    }
  };

  const int stride = std::max(1, steps / (samples - 1));
  std::vector<std::pair<double, State>> nodes;
  State s{f0, df0, r.h_of(t0, f0, df0)};
  check(s, t0);
  const double h = sol.step;
  if (s.f > 0) nodes.push_back({t0, s});
  for (int k = 0; k < steps && s.f > 0; ++k) {
    const double t = t0 + k * h;
    const double tm = t0 + (k + 0.5) * h;
    const double tn = (k + 1 == steps) ? t1 : t0 + (k + 1) * h;
    auto axpy = [](const State& a, double w, const State& b) {
      return State{a.f + w * b.f, a.df + w * b.df, a.h + w * b.h};
    };
    const State k1 = rhs(t, s);
    const State k2 = rhs(tm, axpy(s, h / 2, k1));
    const State k3 = rhs(tm, axpy(s, h / 2, k2));
    const State k4 = rhs(tn, axpy(s, h, k3));
    s = State{s.f + h / 6 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f),
              s.df + h / 6 * (k1.df + 2 * k2.df + 2 * k3.df + k4.df),
              s.h + h / 6 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h)};
    check(s, tn);
    ++sol.stats.steps_taken;
    sol.stats.t_end = tn;
    if (s.f <= 0) {
      sol.stats.truncated = true;
      break;
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) nodes.push_back({tn, s});
  }
  if (nodes.empty()) throw ConfigError("f0 must be positive");
  if (!sol.stats.truncated) sol.stats.t_end = t1;

  const int order = curvature::kMaxHeadroom + 1;
  for (const auto& [t, st] : nodes) {
    const auto c = r.coefficients(t, order);
    const Jet fs = solve_series(c.a, c.b, st.f, st.df);
    // h from the tt relation, f Ric_tt = f'' − Γ^t_tt f' + h g_tt
    const Jet d1 = fs.derivative(0);
    const Jet d2 = d1.derivative(0);
    Jet hs = (fs * c.ric_tt - d2 + c.gamma_tt * d1) / c.g_tt;
    hs.coefficients()[0] = st.h;
    sol.mesh.push_back(t);
    sol.f_jets.push_back(derivatives(fs));
    sol.h_jets.push_back(derivatives(hs));
  }
  return sol;
}

WarpedChart::WarpedChart(WarpedSolution sol) : sol_(std::move(sol)) {
  chart_ = chart::polar_warped_chart("t", sol_.phi, sol_.n, {sol_.t0, sol_.t1});
  chart_.name = "warped(phi=" + expr::to_string(sol_.phi) + ", n=" + std::to_string(sol_.n) + ")";
}

std::vector<double> WarpedChart::point(std::size_t i) const {
  std::vector<double> p(sol_.n, kPolarAngle);
  p[0] = sol_.mesh.at(i);
  p[sol_.n - 1] = kAzimuth;
  return p;
}

std::size_t WarpedChart::mesh_index(double t) const {
  for (std::size_t i = 0; i < sol_.mesh.size(); ++i) {
    if (std::abs(sol_.mesh[i] - t) <= 1e-12 * (1 + std::abs(t))) return i;
  }
  throw DomainError("t = " + std::to_string(t) + " is not a mesh point of the warped solution");
}

curvature::CurvatureBundle WarpedChart::bundle(std::size_t i,
                                               curvature::BundleOptions options) const {
  if (i >= size()) throw DomainError("mesh index out of range");
  if (options.headroom + 3 > kJetOrder) {
    throw HeadroomExceeded("warped solutions carry f and h to order " +
                           std::to_string(kJetOrder));
  }
  return curvature::bundle(chart_, point(i), options);
}

curvature::PotentialBundle WarpedChart::potential(std::size_t i,
                                                  const curvature::CurvatureBundle& cb) const {
  const std::size_t j = mesh_index(cb.point.at(0));
  if (j != i) throw DomainError("bundle point does not match mesh index");
  const int order = cb.headroom + 3;
  if (order > kJetOrder) {
    throw HeadroomExceeded("warped solutions carry f and h to order " +
                           std::to_string(kJetOrder));
  }
  return curvature::potential_from_jets(lift(sol_.f_jets[i], sol_.n, order),
                                        lift(sol_.h_jets[i], sol_.n, order), cb);
}

WarpedChart as_chart(const WarpedSolution& sol) { return WarpedChart(sol); }

}  // namespace etlab::warped
