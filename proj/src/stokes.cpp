#include <algorithm>
#include <cmath>

#include "etlab/harness.hpp"
#include "parallel.hpp"

namespace etlab::harness {

using curvature::CurvatureBundle;
using curvature::PotentialBundle;
using jets::Jet;
using tensor::Tensor;

FieldKind parse_field(const std::string& s) {
  if (s == "X1") return FieldKind::kX1;
  if (s == "X2") return FieldKind::kX2;
  if (s == "fgradR") return FieldKind::kFGradR;
  if (s == "fgradLambda") return FieldKind::kFGradLambda;
  throw ConfigError("unknown field '" + s + "' (use X1, X2, fgradR or fgradLambda)");
}

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::kX1: return "X1";
    case FieldKind::kX2: return "X2";
    case FieldKind::kFGradR: return "fgradR";
    case FieldKind::kFGradLambda: return "fgradLambda";
  }
  return "?";
}

namespace {

Tensor<Jet> times(const Tensor<Jet>& v, const Jet& f) {
  Tensor<Jet> out = v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * f;
  return out;
}

Tensor<Jet> field(FieldKind kind, const PotentialBundle& pb, const CurvatureBundle& cb) {
  switch (kind) {
    case FieldKind::kX1: return identities::x_field(identities::XKind::kX1, pb, cb);
    case FieldKind::kX2: return identities::x_field(identities::XKind::kX2, pb, cb);
    case FieldKind::kFGradR: return times(cb.grad_scalar, pb.f);
    case FieldKind::kFGradLambda:
      return times(curvature::gradient(identities::big_lambda_jet(pb, cb)), pb.f);
  }
  throw ConfigError("unknown field");
}

double sqrt_det(const Tensor<double>& g) {
  // Cholesky; g is positive definite at accepted nodes.
  const int n = g.dim();
  std::vector<double> l(n * n, 0.0);
  double det = 1.0;
  for (int j = 0; j < n; ++j) {
    double d = g(j, j);
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0)) throw SingularMetric("metric is not positive definite at a quadrature node");
    l[j * n + j] = std::sqrt(d);
    det *= l[j * n + j];
    for (int i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return det;
}

}  // namespace

BoundaryIntegral stokes_check(const chart::ChartSpec& spec, FieldKind kind,
                              const StokesOptions& opt) {
  if (opt.grid < 2) throw ConfigError("stokes grid must be at least 2");
  if (!spec.f) throw UnsupportedGeometry(spec.name + ": Stokes fields need f");
  if (kind == FieldKind::kFGradLambda && !spec.h) {
    throw UnsupportedGeometry(spec.name + ": f grad Lambda needs h");
  }
  const int n = spec.dim;
  const auto box = spec.sampling_box();
  const auto cyclic = chart::cyclic_coordinates(spec);
  std::vector<int> active;
  double cyclic_measure = 1.0;
  std::vector<double> base(n);
  for (int a = 0; a < n; ++a) {
    base[a] = 0.5 * (box[a].lo + box[a].hi);
    if (std::find(cyclic.begin(), cyclic.end(), a) != cyclic.end()) {
      cyclic_measure *= box[a].length();
    } else {
      active.push_back(a);
    }
  }
  if (active.empty()) throw UnsupportedGeometry(spec.name + ": every coordinate is cyclic");
  const int G = opt.grid;
  const int m = static_cast<int>(active.size());
  std::vector<double> step(n);
  for (int a : active) step[a] = box[a].length() / G;

  // Node k along active axes other than `fixed` (which is pinned to `fixed_value`).
  auto node = [&](long k, int fixed, double fixed_value) {
    std::vector<double> p = base;
    for (int j = m - 1; j >= 0; --j) {
      const int a = active[j];
      if (a == fixed) {
        p[a] = fixed_value;
        continue;
      }
      p[a] = box[a].lo + (static_cast<double>(k % G) + 0.5) * step[a];
      k /= G;
    }
    return p;
  };
  auto eval = [&](const std::vector<double>& p, bool divergence, int axis) {
    const auto cb = curvature::bundle(spec, p, {1});
    const auto pb = curvature::potential(spec, cb);
    const auto x = field(kind, pb, cb);
    const double vol = sqrt_det(tensor::value(cb.g));
    if (divergence) return curvature::divergence(x, cb).value() * vol;
    const auto gi = tensor::value(cb.g_inv);
    double up = 0;
    for (int b = 0; b < n; ++b) up += gi(axis, b) * x(b).value();
    return up * vol;
  };
  auto ipow = [](long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
  };

  BoundaryIntegral out;
  out.model = spec.name;
  out.field = to_string(kind);
  out.grid = G;
  out.cyclic_axes = cyclic;

  const long cells = ipow(G, m);
  std::vector<double> interior(cells);
  const int threads = resolve_threads(opt.threads);
  detail::parallel_for(static_cast<int>(cells), threads,
                       [&](int k) { interior[k] = eval(node(k, -1, 0), true, -1); });
  double cell = cyclic_measure;
  for (int a : active) cell *= step[a];
  for (double v : interior) out.interior += v * cell;
  out.evaluations = static_cast<int>(cells);

  const long face_nodes = ipow(G, m - 1);
  for (int a : active) {
    double area = cyclic_measure;
    for (int b : active)
      if (b != a) area *= step[b];
    for (int side = 0; side < 2; ++side) {
      const double at = side == 0 ? box[a].lo : box[a].hi;
      std::vector<double> vals(face_nodes);
      detail::parallel_for(static_cast<int>(face_nodes), threads,
                           [&](int k) { vals[k] = eval(node(k, a, at), false, a); });
      double sum = 0;
      for (double v : vals) sum += v * area;
      if (side == 0) sum = -sum;
      out.face_flux[spec.coords[a] + (side == 0 ? "-" : "+")] = sum;
      out.flux += sum;
      out.evaluations += static_cast<int>(face_nodes);
    }
  }
  out.abs_mismatch = std::abs(out.interior - out.flux);
  const double scale = std::max(std::abs(out.interior), std::abs(out.flux));
  out.rel_mismatch = scale > 0 ? out.abs_mismatch / scale : 0.0;
  out.pass = std::isfinite(out.abs_mismatch) &&
             (out.rel_mismatch <= opt.rtol || out.abs_mismatch <= opt.atol);
  return out;
}

}  // namespace etlab::harness
