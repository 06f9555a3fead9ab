#pragma once

#include <span>
#include <vector>

#include "etlab/chart.hpp"
#include "etlab/jets.hpp"
#include "etlab/tensor.hpp"

namespace etlab::curvature {

using jets::Jet;
using tensor::Tensor;

/// How the (1,3) curvature tensor R^m_{ijl} is lowered to R_ijkl.
///   kStandard:   R_ijkl = g_km R^m_{ijl}   (unit sphere: R_ijkl = g_ik g_jl - g_il g_jk)
///   kFourthSlot: R_ijkl = g_lm R^m_{ijk}   (opposite sign; debug variant only)
/// Ricci is R_jl = R^i_{ijl} under both.
enum class RiemannLowering { kStandard, kFourthSlot };

inline constexpr int kMaxHeadroom = 3;

struct BundleOptions {
  int headroom = 0;
  RiemannLowering lowering = RiemannLowering::kStandard;
};

/// Curvature at one point. With headroom H the metric is expanded to order
/// H + 3 and every field keeps the order its derivative depth allows:
///   g, g_inv                 H + 3
///   gamma                    H + 2
///   riemann, ric, R, weyl    H + 1
///   grad_ric, grad_R, cotton H
/// so at H = 1 one further covariant derivative of everything is exact.
struct CurvatureBundle {
  std::vector<double> point;
  int dim = 0;
  int headroom = 0;
  RiemannLowering lowering = RiemannLowering::kStandard;
  Tensor<Jet> g;
  Tensor<Jet> g_inv;
  Tensor<Jet> gamma;  // gamma(l, j, k) = Γ^l_jk
  Tensor<Jet> riemann;
  Tensor<Jet> ric;
  Jet scalar;
  Tensor<Jet> weyl;  // zero for n = 3
  Tensor<Jet> grad_ric;  // (i, j, k) = ∇_i R_jk
  Tensor<Jet> grad_scalar;
  Tensor<Jet> cotton;
};

struct PotentialBundle {
  // False when the chart supplies f only; h and its derivatives are then zero.
  bool has_h = true;
  Jet f, h;                        // H + 3
  Tensor<Jet> grad_f, grad_h;      // H + 2
  Tensor<Jet> hess_f, hess_h;      // H + 1
  Jet lap_f, lap_h;                // H + 1
};

/// Throws SingularMetric, DomainError or ConfigError (headroom outside
/// [0, kMaxHeadroom]).
CurvatureBundle bundle(const chart::ChartSpec& spec, std::span<const double> point,
                       BundleOptions options = {});

// Curvature from metric jets already evaluated at order >= headroom + 3.
CurvatureBundle bundle_from_metric(const Tensor<Jet>& g, std::span<const double> point,
                                   BundleOptions options = {});

/// f and h from the chart. MissingStructure when f is absent; a missing h
/// yields has_h = false.
PotentialBundle potential(const chart::ChartSpec& spec, const CurvatureBundle& cb);
PotentialBundle potential_from_jets(const Jet& f, const Jet& h, const CurvatureBundle& cb);

/// ∇T for a covariant tensor; the derivative index comes first. Consumes one
/// order; throws HeadroomExceeded on order-0 input.
Tensor<Jet> covariant_derivative(const Tensor<Jet>& t, const CurvatureBundle& cb);

/// div X = g^{ij} ∇_i X_j for a covariant vector field.
Jet divergence(const Tensor<Jet>& x, const CurvatureBundle& cb);

Tensor<Jet> gradient(const Jet& s);
Tensor<Jet> hessian(const Jet& s, const CurvatureBundle& cb);
Jet laplacian(const Jet& s, const CurvatureBundle& cb);

}  // namespace etlab::curvature
