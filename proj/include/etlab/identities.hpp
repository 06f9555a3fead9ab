#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etlab/curvature.hpp"

namespace etlab::identities {

using curvature::CurvatureBundle;
using curvature::PotentialBundle;
using jets::Jet;
using tensor::Tensor;

enum class Conditionality {
  kUnconditional,
  kRequiresStructure,
  kRequiresStructureAndConstantLambda,
};

std::string_view to_string(Conditionality c);

struct IdentityDef {
  std::string id;
  std::string description;
  Conditionality conditionality = Conditionality::kUnconditional;
  int headroom = 0;
  int min_dim = 3;
  std::optional<int> exact_dim;
  // Unconditional identities that still need a scalar field f.
  bool needs_f = false;
  double default_rtol = 1e-8;

  // Skip reason for dimension n, or nullopt when applicable.
  std::optional<std::string> dim_skip_reason(int n) const;
};

/// U1..U9 then C1..C16, in that order.
const std::vector<IdentityDef>& registry();
/// Throws ConfigError for unknown ids.
const IdentityDef& find(std::string_view id);
int max_headroom(const std::vector<const IdentityDef*>& defs);

struct IdentityResult {
  std::string id;
  std::vector<double> point;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  bool pass = false;
};

/// Both sides of an identity flattened into component lists.
struct Sides {
  std::vector<double> lhs;
  std::vector<double> rhs;
};

/// Evaluates both sides. `pb` may be null for identities that need no
/// potential; throws MissingStructure when one is needed but absent and
/// HeadroomExceeded when the bundle is too shallow.
Sides evaluate_sides(const IdentityDef& def, const CurvatureBundle& cb, const PotentialBundle* pb);

/// rel_residual = abs / (1 + max(|lhs|, |rhs|)) in the max norm; pass when
/// rel_residual <= rtol.
IdentityResult evaluate_identity(const IdentityDef& def, const CurvatureBundle& cb,
                                 const PotentialBundle* pb, double rtol);
IdentityResult residual_of(const std::string& id, std::vector<double> point, const Sides& sides,
                           double rtol);

/// λ = (n − 1) h − R f.
double lambda_value(const PotentialBundle& pb, const CurvatureBundle& cb);
/// Λ = ½|∇f|² + c_n R f² + h f with c_n = (1 − 2n) / (2n(n − 1)).
double big_lambda_value(const PotentialBundle& pb, const CurvatureBundle& cb);
Jet big_lambda_jet(const PotentialBundle& pb, const CurvatureBundle& cb);
double c_n(int n);

enum class XKind { kX1, kX2 };
/// X1_i = R_ik R_kj ∇_j f + R_ijkl ∇_l f R_jk
/// X2_i = −(f/2)∇_i|R̊ic|² + 2f C_ijk R_jk + (n−2)/(2(n−1)) f R_ij ∇_j R − (n−2)/(4n(n−1)) f ∇_i(R²)
Tensor<Jet> x_field(XKind kind, const PotentialBundle& pb, const CurvatureBundle& cb);

/// Hess f = (μ/β) f (Λ_fg g − (α/β) Ric) + γ g. Unset Λ_fg and γ take the
/// pointwise values −R/(n−1) and −λ/(n−1).
struct VStaticParams {
  double mu = 1.0;
  double alpha = -1.0;
  double beta = 1.0;
  std::optional<double> gamma;
  std::optional<double> lambda_fg;
};
/// Hess f minus the right-hand side above.
Tensor<double> v_static_residual(const PotentialBundle& pb, const CurvatureBundle& cb,
                                 const VStaticParams& params = {});

}  // namespace etlab::identities
