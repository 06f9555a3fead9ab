#include "etlab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace etlab::identities {

using TD = Tensor<double>;

std::string_view to_string(Conditionality c) {
  switch (c) {
    case Conditionality::kUnconditional: return "unconditional";
    case Conditionality::kRequiresStructure: return "requires-structure";
    case Conditionality::kRequiresStructureAndConstantLambda:
      return "requires-structure-and-constant-Lambda";
  }
  return "unconditional";
}

std::optional<std::string> IdentityDef::dim_skip_reason(int n) const {
  if (exact_dim && n != *exact_dim) return "dim_constraint n=" + std::to_string(*exact_dim);
  if (n < min_dim) return "dim_constraint n>=" + std::to_string(min_dim);
  return std::nullopt;
}

namespace {

IdentityDef def(std::string id, std::string description, Conditionality c, int headroom,
                double rtol) {
  IdentityDef d;
  d.id = std::move(id);
  d.description = std::move(description);
  d.conditionality = c;
  d.headroom = headroom;
  d.default_rtol = rtol;
  return d;
}

std::vector<IdentityDef> build_registry() {
  using C = Conditionality;
  const auto U = C::kUnconditional;
  const auto S = C::kRequiresStructure;
  const auto L = C::kRequiresStructureAndConstantLambda;
  std::vector<IdentityDef> r;
  r.push_back(def("U1", "Weyl decomposition of Riemann; Weyl trace-free", U, 0, 1e-8));
  r.push_back(def("U2", "Kulkarni-Nomizu product Ric∧g has the algebraic symmetries of Riemann",
                  U, 0, 1e-9));
  r.push_back(def("U3", "Cotton tensor skew in its first pair and trace-free", U, 0, 1e-8));
  r.push_back(def("U4", "Cotton equals -(n-2)/(n-3) times the divergence of Weyl", U, 0, 1e-8));
  r.back().min_dim = 4;
  r.push_back(def("U5", "commutator of second covariant derivatives of Ric", U, 1, 1e-7));
  r.push_back(def("U6", "Laplacian of |Ric|^2", U, 1, 1e-7));
  r.push_back(def("U7", "Ricci identity for the third derivatives of f", U, 0, 1e-8));
  r.back().needs_f = true;
  r.push_back(def("U8", "contracted second Bianchi identity", U, 0, 1e-8));
  r.push_back(def("U9", "Bochner formula for |∇f|^2", U, 0, 1e-7));
  r.back().needs_f = true;

  r.push_back(def("C1", "f Ric = Hess f + h g", S, 0, 1e-9));
  r.push_back(def("C2", "f R = Δf + n h", S, 0, 1e-8));
  r.push_back(def("C3", "(n-1)∇h = R∇f + (1/2) f ∇R", S, 0, 1e-8));
  r.push_back(def("C4", "Hessian of h", S, 1, 1e-8));
  r.push_back(def("C5", "(n-1)Δh = (3/2)<∇R,∇f> + RΔf + (1/2) f ΔR", S, 1, 1e-8));
  r.push_back(def("C6", "traceless parts: f R̊ic = H̊ess f", S, 0, 1e-8));
  r.push_back(def("C7", "f C_ijk in terms of Riemann, Ric and ∇f", S, 0, 1e-8));
  r.push_back(def("C8", "div X1, first expansion", S, 1, 1e-7));
  r.push_back(def("C9", "div X1, second expansion", S, 0, 1e-7));
  r.push_back(def("C10", "div X2, Bochner-type expansion", S, 1, 1e-7));
  r.push_back(def("C11", "V-static form -Δf g + Hess f - f Ric = λ g", S, 0, 1e-9));
  r.push_back(def("C12", "-(Rf/(n-1) + Δf) = n λ/(n-1)", S, 0, 1e-9));
  r.push_back(def("C13", "div(f∇Λ) - 2<∇Λ,∇f> expansion", S, 1, 1e-8));
  r.push_back(def("C14", "div(f∇R) = 2n f |R̊ic|^2 + (n-2)<∇R,∇f> for constant Λ", L, 1, 1e-8));
  r.push_back(def("C15", "ΔR = 6|R̊ic|^2 for constant Λ", L, 1, 1e-8));
  r.back().exact_dim = 3;
  r.push_back(def("C16", "parametrized form Hess f = (μ/β) f (Λ_fg g - (α/β) Ric) + γ g", S, 0,
                  1e-9));
  return r;
}

// Value-level data at one point shared by the identity formulas.
struct Ctx {
  const CurvatureBundle& cb;
  const PotentialBundle* pb;
  int n;
  TD g, gi, rm, ric, ric_up, ric_mixed, w, cot, dric, dR;
  double R;
  // potential
  double f = 0, h = 0, lapf = 0, laph = 0;
  TD df, df_up, dh, hessf, hessh;

  Ctx(const CurvatureBundle& b, const PotentialBundle* p) : cb(b), pb(p), n(b.dim) {
    g = tensor::value(b.g);
    gi = tensor::value(b.g_inv);
    rm = tensor::value(b.riemann);
    ric = tensor::value(b.ric);
    ric_mixed = tensor::raise(ric, 0, gi);
    ric_up = tensor::raise(ric_mixed, 1, gi);
    w = tensor::value(b.weyl);
    cot = tensor::value(b.cotton);
    dric = tensor::value(b.grad_ric);
    dR = tensor::value(b.grad_scalar);
    R = b.scalar.value();
    if (p) {
      f = p->f.value();
      h = p->h.value();
      lapf = p->lap_f.value();
      laph = p->lap_h.value();
      df = tensor::value(p->grad_f);
      df_up = tensor::raise(df, 0, gi);
      dh = tensor::value(p->grad_h);
      hessf = tensor::value(p->hess_f);
      hessh = tensor::value(p->hess_h);
    }
  }

  double inner(const TD& a, const TD& b) const { return tensor::inner(a, b, gi); }
  double norm_sq(const TD& t) const { return tensor::norm_sq(t, gi); }
  TD traceless_ric() const { return tensor::traceless(ric, g, gi); }
  // Ric(a, b) for covectors a, b.
  double ric_form(const TD& a, const TD& b) const {
    const TD au = tensor::raise(a, 0, gi), bu = tensor::raise(b, 0, gi);
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += ric(i, j) * au(i) * bu(j);
    return s;
  }
};

void append(std::vector<double>& out, const TD& t) {
  out.insert(out.end(), t.components().begin(), t.components().end());
}

TD zeros(int rank, int n) { return TD(rank, n, 0.0); }


// |R̊ic|^2 as a jet at the order of Ric.
Jet traceless_ric_norm_jet(const CurvatureBundle& cb) {
  return tensor::norm_sq(tensor::traceless(cb.ric, cb.g, cb.g_inv), cb.g_inv);
}

// V_i = C_ijk R^{jk} as jets.
Tensor<Jet> cotton_ric(const CurvatureBundle& cb) {
  const int n = cb.dim;
  const auto ric_up = tensor::raise(tensor::raise(cb.ric, 0, cb.g_inv), 1, cb.g_inv);
  Tensor<Jet> v(1, n, Jet(n, cb.headroom));
  for (int i = 0; i < n; ++i) {
    Jet acc(n, cb.headroom);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) acc += cb.cotton(i, j, k) * ric_up(j, k);
    v(i) = acc;
  }
  return v;
}

Tensor<Jet> scaled(const Tensor<Jet>& t, const Jet& s) { return tensor::scale(t, s); }

void require_structure(const IdentityDef& d, const PotentialBundle* pb) {
  if (d.conditionality != Conditionality::kUnconditional) {
    if (!pb) throw MissingStructure(d.id + " needs a potential pair (f, h)");
    if (!pb->has_h) throw MissingStructure(d.id + " needs h");
  } else if (d.needs_f && !pb) {
    throw MissingStructure(d.id + " needs a potential f");
  }
}

using Formula = std::function<Sides(const Ctx&)>;

Sides u1(const Ctx& c) {
  const int n = c.n;
  Sides s;
  const TD ric_g = tensor::kulkarni_nomizu(c.ric, c.g);
  const TD g_g = tensor::kulkarni_nomizu(c.g, c.g);
  TD recon = n >= 4 ? c.w : zeros(4, n);
  for (std::size_t f = 0; f < recon.size(); ++f) {
    recon[f] += ric_g[f] / (n - 2) - c.R / (2.0 * (n - 1) * (n - 2)) * g_g[f];
  }
  append(s.lhs, c.rm);
  append(s.rhs, recon);
  append(s.lhs, tensor::contract(c.w, 0, 2, c.gi));
  append(s.rhs, zeros(2, n));
  return s;
}

void riemann_symmetries(const TD& p, Sides& s) {
  const int n = p.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          s.lhs.push_back(p(i, j, k, l));
          s.rhs.push_back(-p(j, i, k, l));
          s.lhs.push_back(p(i, j, k, l));
          s.rhs.push_back(p(k, l, i, j));
          s.lhs.push_back(p(i, j, k, l) + p(j, k, i, l) + p(k, i, j, l));
          s.rhs.push_back(0.0);
        }
}

Sides u2(const Ctx& c) {
  Sides s;
  const TD p = tensor::kulkarni_nomizu(c.ric, c.g);
  riemann_symmetries(p, s);
  riemann_symmetries(c.rm, s);
  append(s.lhs, tensor::contract(p, 0, 2, c.gi));
  TD expect = c.ric * (c.n - 2.0);
  for (std::size_t f = 0; f < expect.size(); ++f) expect[f] += c.R * c.g[f];
  append(s.rhs, expect);
  return s;
}

Sides u3(const Ctx& c) {
  Sides s;
  const int n = c.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        s.lhs.push_back(c.cot(i, j, k));
        s.rhs.push_back(-c.cot(j, i, k));
      }
  for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    append(s.lhs, tensor::contract(c.cot, a, b, c.gi));
    append(s.rhs, zeros(1, n));
  }
  return s;
}

Sides u4(const Ctx& c) {
  const int n = c.n;
  const auto dw = curvature::covariant_derivative(c.cb.weyl, c.cb);  // [l][i][j][k][m]
  TD div = tensor::value(tensor::contract(dw, 0, 4, c.cb.g_inv));
  div *= -(n - 2.0) / (n - 3.0);
  Sides s;
  append(s.lhs, c.cot);
  append(s.rhs, div);
  return s;
}

Sides u5(const Ctx& c) {
  const int n = c.n;
  const TD dd = tensor::value(curvature::covariant_derivative(c.cb.grad_ric, c.cb));
  const TD rm_up = tensor::raise(c.rm, 3, c.gi);  // R_ijk^p
  Sides s;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          s.lhs.push_back(dd(i, j, k, l) - dd(j, i, k, l));
          double r = 0;
          for (int p = 0; p < n; ++p) r += rm_up(i, j, k, p) * c.ric(p, l) + rm_up(i, j, l, p) * c.ric(k, p);
          s.rhs.push_back(r);
        }
  return s;
}

double ric_cubed(const Ctx& c) {
  double s = 0;
  for (int a = 0; a < c.n; ++a)
    for (int b = 0; b < c.n; ++b)
      for (int d = 0; d < c.n; ++d) s += c.ric_mixed(a, b) * c.ric_mixed(b, d) * c.ric_mixed(d, a);
  return s;
}

// R_ijkl R^{il} R^{jk}
double rm_ric_ric(const Ctx& c) {
  double s = 0;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k)
        for (int l = 0; l < c.n; ++l) s += c.rm(i, j, k, l) * c.ric_up(i, l) * c.ric_up(j, k);
  return s;
}

// R_ijkl R^{ik} R^{jl}
double rm_ric_ric_ikjl(const Ctx& c) {
  double s = 0;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k)
        for (int l = 0; l < c.n; ++l) s += c.rm(i, j, k, l) * c.ric_up(i, k) * c.ric_up(j, l);
  return s;
}

Sides u6(const Ctx& c) {
  const int n = c.n;
  const auto& cb = c.cb;
  const Jet ric_sq = tensor::norm_sq(cb.ric, cb.g_inv);
  const double lhs = curvature::laplacian(ric_sq, cb).value();

  const double div_cr = curvature::divergence(cotton_ric(cb), cb).value();
  // (n−2) Ric(∇R) + R ∇R as jets
  const auto dR_up = tensor::raise(cb.grad_scalar, 0, cb.g_inv);
  Tensor<Jet> y(1, n, Jet(n, cb.headroom));
  for (int i = 0; i < n; ++i) {
    Jet acc = cb.scalar * cb.grad_scalar(i);
    for (int j = 0; j < n; ++j) acc += (n - 2.0) * (cb.ric(i, j) * dR_up(j));
    y(i) = acc;
  }
  const double div_y = curvature::divergence(y, cb).value();
  const double rhs = 2 * c.norm_sq(c.dric) - c.norm_sq(c.cot) + 2 * div_cr +
                     2 * (ric_cubed(c) - rm_ric_ric_ikjl(c)) -
                     n / (2.0 * (n - 1)) * c.norm_sq(c.dR) + div_y / (n - 1);
  return {{lhs}, {rhs}};
}

Sides u7(const Ctx& c) {
  const int n = c.n;
  const TD ddd = tensor::value(curvature::covariant_derivative(c.pb->hess_f, c.cb));
  Sides s;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        s.lhs.push_back(ddd(i, j, k) - ddd(j, i, k));
        double r = 0;
        for (int l = 0; l < n; ++l) r += c.rm(i, j, k, l) * c.df_up(l);
        s.rhs.push_back(r);
      }
  return s;
}

Sides u8(const Ctx& c) {
  Sides s;
  append(s.lhs, tensor::contract(c.dric, 0, 1, c.gi));
  append(s.rhs, c.dR * 0.5);
  return s;
}

Sides u9(const Ctx& c) {
  const auto& cb = c.cb;
  const Jet grad_sq = tensor::norm_sq(c.pb->grad_f, cb.g_inv);
  const double lhs = 0.5 * curvature::laplacian(grad_sq, cb).value();
  const TD dlap = tensor::value(curvature::gradient(c.pb->lap_f));
  const double rhs = c.norm_sq(c.hessf) + c.ric_form(c.df, c.df) + c.inner(c.df, dlap);
  return {{lhs}, {rhs}};
}

Sides c1(const Ctx& c) {
  Sides s;
  append(s.lhs, c.ric * c.f);
  TD r = c.hessf;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += c.h * c.g[i];
  append(s.rhs, r);
  return s;
}

Sides c2(const Ctx& c) { return {{c.f * c.R}, {c.lapf + c.n * c.h}}; }

Sides c3(const Ctx& c) {
  Sides s;
  append(s.lhs, c.dh * (c.n - 1.0));
  TD r = c.df * c.R;
  for (int i = 0; i < c.n; ++i) r(i) += 0.5 * c.f * c.dR(i);
  append(s.rhs, r);
  return s;
}

Sides c4(const Ctx& c) {
  const int n = c.n;
  const TD hessR = tensor::value(curvature::hessian(c.cb.scalar, c.cb));
  Sides s;
  append(s.lhs, c.hessh * (n - 1.0));
  TD r(2, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r(i, j) = c.dR(i) * c.df(j) + c.R * c.hessf(i, j) + 0.5 * c.df(i) * c.dR(j) +
                0.5 * c.f * hessR(i, j);
  append(s.rhs, r);
  return s;
}

Sides c5(const Ctx& c) {
  const double lapR = curvature::laplacian(c.cb.scalar, c.cb).value();
  return {{(c.n - 1.0) * c.laph},
          {1.5 * c.inner(c.dR, c.df) + c.R * c.lapf + 0.5 * c.f * lapR}};
}

Sides c6(const Ctx& c) {
  Sides s;
  append(s.lhs, c.traceless_ric() * c.f);
  append(s.rhs, tensor::traceless(c.hessf, c.g, c.gi));
  return s;
}

Sides c7(const Ctx& c) {
  const int n = c.n;
  Sides s;
  append(s.lhs, c.cot * c.f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double r = 0;
        for (int l = 0; l < n; ++l) r += c.rm(i, j, k, l) * c.df_up(l);
        r += c.R / (n - 1) * (c.df(i) * c.g(j, k) - c.df(j) * c.g(i, k));
        r -= c.df(i) * c.ric(j, k) - c.df(j) * c.ric(i, k);
        s.rhs.push_back(r);
      }
  return s;
}

double div_x(XKind kind, const Ctx& c) {
  return curvature::divergence(x_field(kind, *c.pb, c.cb), c.cb).value();
}

// <∇(R^2), ∇f> = 2R <∇R, ∇f>
double grad_r2_df(const Ctx& c) { return 2 * c.R * c.inner(c.dR, c.df); }

Sides c8(const Ctx& c) {
  const int n = c.n;
  const auto& cb = c.cb;
  const double lhs = div_x(XKind::kX1, c);
  const double div_fcr = curvature::divergence(scaled(cotton_ric(cb), c.pb->f), cb).value();
  const double rc2 = c.norm_sq(c.traceless_ric());
  const TD d_rc2 = tensor::value(curvature::gradient(traceless_ric_norm_jet(cb)));
  const double rhs = div_fcr + (c.R * c.f / (n - 1) + c.lapf) * rc2 +
                     c.ric_form(c.dR, c.df) / (n - 1) +
                     (n - 4.0) / (4.0 * n * (n - 1)) * grad_r2_df(c) + c.inner(d_rc2, c.df);
  return {{lhs}, {rhs}};
}

Sides c9(const Ctx& c) {
  const int n = c.n;
  const double lhs = div_x(XKind::kX1, c);
  const TD d_rc2 = tensor::value(curvature::gradient(traceless_ric_norm_jet(c.cb)));
  double cterm = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) cterm += c.cot(i, j, k) * c.ric_up(i, k) * c.df_up(j);
  const double rhs = c.f * (ric_cubed(c) + rm_ric_ric(c)) +
                     n / (2.0 * (n - 1)) * c.ric_form(c.dR, c.df) + 0.5 * c.f * c.norm_sq(c.cot) +
                     cterm - grad_r2_df(c) / (2.0 * n * (n - 1)) + 0.5 * c.inner(c.df, d_rc2);
  return {{lhs}, {rhs}};
}

Sides c10(const Ctx& c) {
  const int n = c.n;
  const double lhs = div_x(XKind::kX2, c);
  const TD rc = c.traceless_ric();
  const double rc2 = c.norm_sq(rc);
  const TD d_rc2 = tensor::value(curvature::gradient(traceless_ric_norm_jet(c.cb)));
  const TD dR_up = tensor::raise(c.dR, 0, c.gi);
  double rc_form = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rc_form += rc(i, j) * dR_up(i) * c.df_up(j);
  const double rhs = -(c.R * c.f / (n - 1) + c.lapf) * rc2 - c.inner(c.df, d_rc2) +
                     (n - 2.0) / (n - 1) * rc_form +
                     c.f * (c.norm_sq(c.cot) - c.norm_sq(c.dric) +
                            n / (4.0 * (n - 1)) * c.norm_sq(c.dR));
  return {{lhs}, {rhs}};
}

Sides c11(const Ctx& c) {
  const double lambda = lambda_value(*c.pb, c.cb);
  Sides s;
  TD l(2, c.n, 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = -c.lapf * c.g[i] + c.hessf[i] - c.f * c.ric[i];
  append(s.lhs, l);
  append(s.rhs, c.g * lambda);
  return s;
}

Sides c12(const Ctx& c) {
  const int n = c.n;
  const double lambda = lambda_value(*c.pb, c.cb);
  return {{-(c.R * c.f / (n - 1) + c.lapf)}, {n * lambda / (n - 1)}};
}

Sides c13(const Ctx& c) {
  const int n = c.n;
  const auto& cb = c.cb;
  const auto& pb = *c.pb;
  const Jet big = big_lambda_jet(pb, cb);
  const auto dL = curvature::gradient(big);
  const double div_f_dl = curvature::divergence(scaled(dL, pb.f), cb).value();
  const double lhs = div_f_dl - 2 * c.inner(tensor::value(dL), c.df);
  const Jet f3 = pb.f * pb.f * pb.f;
  const double div_f3_dR = curvature::divergence(scaled(cb.grad_scalar, f3), cb).value();
  const double rhs = c.f * c.f * c.f * c.norm_sq(c.traceless_ric()) +
                     0.5 * c.f * c.f * c.inner(c.dR, c.df) - div_f3_dR / (2.0 * n);
  return {{lhs}, {rhs}};
}

Sides c14(const Ctx& c) {
  const int n = c.n;
  const double lhs =
      curvature::divergence(scaled(c.cb.grad_scalar, c.pb->f), c.cb).value();
  const double rhs =
      2.0 * n * c.f * c.norm_sq(c.traceless_ric()) + (n - 2.0) * c.inner(c.dR, c.df);
  return {{lhs}, {rhs}};
}

Sides c15(const Ctx& c) {
  const double lhs = curvature::laplacian(c.cb.scalar, c.cb).value();
  return {{lhs}, {6.0 * c.norm_sq(c.traceless_ric())}};
}

Sides c16(const Ctx& c) {
  Sides s;
  append(s.lhs, c.hessf);
  const TD res = v_static_residual(*c.pb, c.cb);
  TD rhs = c.hessf;
  rhs -= res;
  append(s.rhs, rhs);
  return s;
}

const std::map<std::string, Formula, std::less<>>& formulas() {
  static const std::map<std::string, Formula, std::less<>> m = {
      {"U1", u1},   {"U2", u2},   {"U3", u3},   {"U4", u4},   {"U5", u5},
      {"U6", u6},   {"U7", u7},   {"U8", u8},   {"U9", u9},   {"C1", c1},
      {"C2", c2},   {"C3", c3},   {"C4", c4},   {"C5", c5},   {"C6", c6},
      {"C7", c7},   {"C8", c8},   {"C9", c9},   {"C10", c10}, {"C11", c11},
      {"C12", c12}, {"C13", c13}, {"C14", c14}, {"C15", c15}, {"C16", c16},
  };
  return m;
}

}  // namespace

const std::vector<IdentityDef>& registry() {
  static const std::vector<IdentityDef> r = build_registry();
  return r;
}

const IdentityDef& find(std::string_view id) {
  for (const auto& d : registry())
    if (d.id == id) return d;
  throw ConfigError("unknown identity '" + std::string(id) + "'");
}

int max_headroom(const std::vector<const IdentityDef*>& defs) {
  int h = 0;
  for (const auto* d : defs) h = std::max(h, d->headroom);
  return h;
}

Sides evaluate_sides(const IdentityDef& d, const CurvatureBundle& cb, const PotentialBundle* pb) {
  require_structure(d, pb);
  if (cb.headroom < d.headroom) {
    throw HeadroomExceeded(d.id + " needs headroom " + std::to_string(d.headroom) +
                           ", bundle carries " + std::to_string(cb.headroom));
  }
  if (auto reason = d.dim_skip_reason(cb.dim)) throw UnsupportedGeometry(d.id + ": " + *reason);
  const Ctx ctx(cb, pb);
  return formulas().at(d.id)(ctx);
}

IdentityResult residual_of(const std::string& id, std::vector<double> point, const Sides& s,
                           double rtol) {
  if (s.lhs.size() != s.rhs.size()) throw ShapeMismatch(id + ": sides differ in size");
  IdentityResult r;
  r.id = id;
  r.point = std::move(point);
  bool finite = true;
  for (std::size_t i = 0; i < s.lhs.size(); ++i) {
    finite = finite && std::isfinite(s.lhs[i]) && std::isfinite(s.rhs[i]);
    r.lhs_norm = std::max(r.lhs_norm, std::abs(s.lhs[i]));
    r.rhs_norm = std::max(r.rhs_norm, std::abs(s.rhs[i]));
    r.abs_residual = std::max(r.abs_residual, std::abs(s.lhs[i] - s.rhs[i]));
  }
  if (!finite) r.abs_residual = std::numeric_limits<double>::quiet_NaN();
  r.rel_residual = r.abs_residual / (1.0 + std::max(r.lhs_norm, r.rhs_norm));
  r.pass = r.rel_residual <= rtol;
  return r;
}

IdentityResult evaluate_identity(const IdentityDef& d, const CurvatureBundle& cb,
                                 const PotentialBundle* pb, double rtol) {
  return residual_of(d.id, cb.point, evaluate_sides(d, cb, pb), rtol);
}

double c_n(int n) { return (1.0 - 2.0 * n) / (2.0 * n * (n - 1.0)); }

double lambda_value(const PotentialBundle& pb, const CurvatureBundle& cb) {
  if (!pb.has_h) throw MissingStructure("λ needs h");
  return (cb.dim - 1) * pb.h.value() - cb.scalar.value() * pb.f.value();
}

Jet big_lambda_jet(const PotentialBundle& pb, const CurvatureBundle& cb) {
  if (!pb.has_h) throw MissingStructure("Λ needs h");
  const Jet grad_sq = tensor::norm_sq(pb.grad_f, cb.g_inv);
  return 0.5 * grad_sq + c_n(cb.dim) * (cb.scalar * pb.f * pb.f) + pb.h * pb.f;
}

double big_lambda_value(const PotentialBundle& pb, const CurvatureBundle& cb) {
  return big_lambda_jet(pb, cb).value();
}

Tensor<Jet> x_field(XKind kind, const PotentialBundle& pb, const CurvatureBundle& cb) {
  const int n = cb.dim;
  const auto ric_mixed = tensor::raise(cb.ric, 0, cb.g_inv);
  const auto ric_up = tensor::raise(ric_mixed, 1, cb.g_inv);
  if (kind == XKind::kX1) {
    const int o = cb.headroom + 1;
    const auto df_up = tensor::truncated(tensor::raise(pb.grad_f, 0, cb.g_inv), o);
    Tensor<Jet> x(1, n, Jet(n, o));
    for (int i = 0; i < n; ++i) {
      Jet acc(n, o);
      for (int j = 0; j < n; ++j) {
        Jet rr(n, o);
        for (int k = 0; k < n; ++k) rr += cb.ric(i, k) * ric_mixed(k, j);
        acc += rr * df_up(j);
      }
      for (int l = 0; l < n; ++l) {
        Jet rr(n, o);
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) rr += cb.riemann(i, j, k, l) * ric_up(j, k);
        acc += rr * df_up(l);
      }
      x(i) = acc;
    }
    return x;
  }
  if (cb.headroom < 1) throw HeadroomExceeded("X2 needs headroom 1 so its divergence is exact");
  const int o = cb.headroom;
  const Jet f = pb.f.truncated(o);
  const Jet R = cb.scalar.truncated(o);
  const auto d_rc2 = curvature::gradient(traceless_ric_norm_jet(cb));
  const auto cr = cotton_ric(cb);
  const auto dR_up = tensor::raise(cb.grad_scalar, 0, cb.g_inv);
  const double a = (n - 2.0) / (2.0 * (n - 1));
  const double b = (n - 2.0) / (4.0 * n * (n - 1));
  Tensor<Jet> x(1, n, Jet(n, o));
  for (int i = 0; i < n; ++i) {
    Jet ric_dR(n, o);
    for (int j = 0; j < n; ++j) ric_dR += cb.ric(i, j) * dR_up(j);
    x(i) = f * (-0.5 * d_rc2(i) + 2.0 * cr(i) + a * ric_dR - b * (2.0 * (R * cb.grad_scalar(i))));
  }
  return x;
}

Tensor<double> v_static_residual(const PotentialBundle& pb, const CurvatureBundle& cb,
                                 const VStaticParams& p) {
  if (!pb.has_h) throw MissingStructure("V-static residual needs h");
  if (p.beta == 0.0) throw ConfigError("V-static parameter beta must be nonzero");
  const int n = cb.dim;
  const double R = cb.scalar.value();
  const double f = pb.f.value();
  const double lambda = lambda_value(pb, cb);
  const double lfg = p.lambda_fg.value_or(-R / (n - 1));
  const double gamma = p.gamma.value_or(-lambda / (n - 1));
  TD res = tensor::value(pb.hess_f);
  const TD g = tensor::value(cb.g), ric = tensor::value(cb.ric);
  for (std::size_t i = 0; i < res.size(); ++i) {
    res[i] -= (p.mu / p.beta) * f * (lfg * g[i] - (p.alpha / p.beta) * ric[i]) + gamma * g[i];
  }
  return res;
}

}  // namespace etlab::identities
