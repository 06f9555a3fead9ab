#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "etlab/chart.hpp"
#include "etlab/curvature.hpp"

namespace etlab::warped {

using jets::Jet;

// Derivative depth of the stored f and h jets.
inline constexpr int kJetOrder = 4;
// Mesh points sit at these angles; every polar sine is well away from zero.
inline constexpr double kPolarAngle = 1.1;
inline constexpr double kAzimuth = 0.7;

/// The fundamental equation on g = dt^2 + phi(t)^2 (round S^{n-1}) for f = f(t).
/// Writing a for the first polar angle, the tt and aa components give
///   h = (f Ric_aa + Γ^t_aa f') / g_aa
///   f'' = A f + B f',  A = Ric_tt − g_tt Ric_aa / g_aa,  B = Γ^t_tt − g_tt Γ^t_aa / g_aa
/// with every coefficient taken from the curvature engine.
class Reduction {
 public:
  Reduction(expr::Expr phi, int n, chart::Interval interval);

  int dim() const { return n_; }
  const expr::Expr& phi() const { return phi_; }
  const chart::ChartSpec& chart() const { return chart_; }
  std::vector<double> point(double t) const;

  // phi(t); DegenerateWarp unless finite and positive.
  double warp(double t) const;

  struct Coefficients {
    Jet a, b;           // ODE coefficients as jets in t
    Jet ric_tt, gamma_tt, g_tt;
    Jet scalar;         // R(t)
  };
  // Taylor data in t at the given order of A and B (0..4).
  Coefficients coefficients(double t, int order) const;

  double second_derivative(double t, double f, double df) const;
  // h from the angular component.
  double h_of(double t, double f, double df) const;

  /// Relative residual of the fundamental equation for a closed-form f(t)
  /// with h taken from the tt component. Zero iff the pair is compatible
  /// with the warp.
  double constraint_residual(const expr::Expr& f, double t) const;

 private:
  expr::Expr phi_;
  int n_;
  chart::ChartSpec chart_;
};

Reduction reduce(const expr::Expr& phi, int n, chart::Interval interval);

struct IntegratorStats {
  int steps_taken = 0;
  int coefficient_evaluations = 0;
  bool truncated = false;  // stopped where f changed sign
  double t_end = 0.0;
};

struct WarpedSolution {
  expr::Expr phi = expr::constant(0);
  int n = 0;
  double t0 = 0, t1 = 0, f0 = 0, df0 = 0;
  int steps = 0;
  double step = 0;
  std::vector<double> mesh;
  // derivatives d^k/dt^k for k = 0..kJetOrder
  std::vector<std::array<double, kJetOrder + 1>> f_jets;
  std::vector<std::array<double, kJetOrder + 1>> h_jets;
  IntegratorStats stats;
};

/// Classical RK4 on (f, f', h) with h' = (R f' + f R' / 2) / (n − 1) and h(t0)
/// from the angular relation. Integration stops at the first node where
/// f <= 0. `samples` nodes, evenly strided over the steps, form the mesh.
/// Throws ConfigError (steps < 100, empty interval), DegenerateWarp, StepFailure.
WarpedSolution integrate(const Reduction& r, double t0, double t1, double f0, double df0,
                         int steps, int samples = 41);

/// Identity evaluation restricted to mesh points. f and h come from the
/// stored jets; their higher derivatives satisfy the ODE exactly, so only
/// the integrated h value carries truncation error.
class WarpedChart {
 public:
  explicit WarpedChart(WarpedSolution sol);

  const WarpedSolution& solution() const { return sol_; }
  const chart::ChartSpec& chart() const { return chart_; }
  std::size_t size() const { return sol_.mesh.size(); }
  std::vector<double> point(std::size_t i) const;
  // DomainError when t is not a mesh node.
  std::size_t mesh_index(double t) const;

  curvature::CurvatureBundle bundle(std::size_t i, curvature::BundleOptions options = {}) const;
  curvature::PotentialBundle potential(std::size_t i, const curvature::CurvatureBundle& cb) const;

 private:
  WarpedSolution sol_;
  chart::ChartSpec chart_;
};

WarpedChart as_chart(const WarpedSolution& sol);

}  // namespace etlab::warped
