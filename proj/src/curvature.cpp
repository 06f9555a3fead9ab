#include "etlab/curvature.hpp"

#include <string>

namespace etlab::curvature {

namespace {

void require_order(const Jet& j, const char* what) {
  if (j.order() < 1) {
    throw HeadroomExceeded(std::string(what) + ": operand carries no derivative order");
  }
}

int tensor_order(const Tensor<Jet>& t) { return tensor::min_order(t); }

}  // namespace

Tensor<Jet> gradient(const Jet& s) {
  require_order(s, "gradient");
  const int n = s.nvars();
  Tensor<Jet> d(1, n, Jet(n, s.order() - 1));
  for (int i = 0; i < n; ++i) d(i) = s.derivative(i);
  return d;
}

Tensor<Jet> covariant_derivative(const Tensor<Jet>& t, const CurvatureBundle& cb) {
  const int n = t.dim();
  const int rank = t.rank();
  if (rank == 0) return gradient(t[0]);
  const int order = tensor_order(t);
  if (order < 1) throw HeadroomExceeded("covariant derivative of an order-0 tensor");
  const int out_order = order - 1;
  const auto gamma = tensor::truncated(cb.gamma, out_order);

  // Partial derivatives of every component along every direction.
  Tensor<Jet> r(rank + 1, n, Jet(n, out_order));
  const std::size_t block = t.size();
  for (int i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < block; ++f) {
      r[i * block + f] = t[f].truncated(order).derivative(i).truncated(out_order);
    }
  }

  std::vector<std::size_t> stride(rank);
  {
    std::size_t s = 1;
    for (int k = rank - 1; k >= 0; --k) {
      stride[k] = s;
      s *= n;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < block; ++f) {
      Jet& out = r[i * block + f];
      for (int s = 0; s < rank; ++s) {
        const int a = static_cast<int>((f / stride[s]) % n);
        const std::size_t base = f - static_cast<std::size_t>(a) * stride[s];
        for (int m = 0; m < n; ++m) {
          const Jet& gm = gamma(m, i, a);
          if (gm.is_constant() && gm.value() == 0.0) continue;
          out -= gm * t[base + m * stride[s]];
        }
      }
    }
  }
  return r;
}

Jet divergence(const Tensor<Jet>& x, const CurvatureBundle& cb) {
  if (x.rank() != 1) throw ShapeMismatch("divergence needs a rank-1 field");
  return tensor::trace(covariant_derivative(x, cb), cb.g_inv);
}

Tensor<Jet> hessian(const Jet& s, const CurvatureBundle& cb) {
  return covariant_derivative(gradient(s), cb);
}

Jet laplacian(const Jet& s, const CurvatureBundle& cb) {
  return tensor::trace(hessian(s, cb), cb.g_inv);
}

CurvatureBundle bundle_from_metric(const Tensor<Jet>& g_in, std::span<const double> point,
                                   BundleOptions options) {
  const int H = options.headroom;
  if (H < 0 || H > kMaxHeadroom) {
    throw ConfigError("headroom must lie in [0, " + std::to_string(kMaxHeadroom) + "]");
  }
  const int n = g_in.dim();
  const int metric_order = H + 3;
  if (tensor_order(g_in) < metric_order) {
    throw HeadroomExceeded("metric jets of order " + std::to_string(tensor_order(g_in)) +
                           " cannot support headroom " + std::to_string(H));
  }
  CurvatureBundle cb;
  cb.point.assign(point.begin(), point.end());
  cb.dim = n;
  cb.headroom = H;
  cb.lowering = options.lowering;
  cb.g = tensor::truncated(g_in, metric_order);
  cb.g_inv = tensor::inverse(cb.g);

  // Christoffel symbols of the second kind.
  const int go = H + 2;
  Tensor<Jet> dg(3, n, Jet(n, go));  // dg(m, j, k) = ∂_m g_jk
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        dg(m, j, k) = cb.g(j, k).derivative(m);
        dg(m, k, j) = dg(m, j, k);
      }
  const auto ginv_go = tensor::truncated(cb.g_inv, go);
  Tensor<Jet> first(3, n, Jet(n, go));  // Γ_mjk = ½(∂_j g_mk + ∂_k g_mj − ∂_m g_jk)
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        first(m, j, k) = 0.5 * (dg(j, m, k) + dg(k, m, j) - dg(m, j, k));
        first(m, k, j) = first(m, j, k);
      }
  cb.gamma = Tensor<Jet>(3, n, Jet(n, go));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Jet acc(n, go);
        for (int m = 0; m < n; ++m) acc += ginv_go(l, m) * first(m, j, k);
        cb.gamma(l, j, k) = acc;
        cb.gamma(l, k, j) = acc;
      }

  // R^m_{ijl} = ∂_i Γ^m_jl − ∂_j Γ^m_il + Γ^m_ip Γ^p_jl − Γ^m_jp Γ^p_il
  const int ro = H + 1;
  const auto gam = tensor::truncated(cb.gamma, ro);
  Tensor<Jet> dgam(4, n, Jet(n, ro));  // dgam(i, m, j, l) = ∂_i Γ^m_jl
  for (int i = 0; i < n; ++i)
    for (std::size_t f = 0; f < cb.gamma.size(); ++f) dgam[i * cb.gamma.size() + f] =
        cb.gamma[f].derivative(i);
  Tensor<Jet> up(4, n, Jet(n, ro));  // up(m, i, j, l) = R^m_{ijl}
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          Jet acc = dgam(i, m, j, l) - dgam(j, m, i, l);
          for (int p = 0; p < n; ++p) {
            acc += gam(m, i, p) * gam(p, j, l);
            acc -= gam(m, j, p) * gam(p, i, l);
          }
          up(m, i, j, l) = acc;
          up(m, j, i, l) = -acc;
        }

  const auto g_ro = tensor::truncated(cb.g, ro);
  cb.riemann = Tensor<Jet>(4, n, Jet(n, ro));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (i == j) continue;
          Jet acc(n, ro);
          for (int m = 0; m < n; ++m) {
            if (options.lowering == RiemannLowering::kStandard) {
              acc += g_ro(k, m) * up(m, i, j, l);
            } else {
              acc += g_ro(l, m) * up(m, i, j, k);
            }
          }
          cb.riemann(i, j, k, l) = acc;
        }

  cb.ric = Tensor<Jet>(2, n, Jet(n, ro));
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) {
      Jet acc(n, ro);
      for (int i = 0; i < n; ++i) acc += up(i, i, j, l);
      cb.ric(j, l) = acc;
      cb.ric(l, j) = acc;
    }
  cb.scalar = tensor::trace(cb.ric, cb.g_inv);

  cb.weyl = Tensor<Jet>(4, n, Jet(n, ro));
  if (n >= 4) {
    const auto ric_g = tensor::kulkarni_nomizu(cb.ric, g_ro);
    const auto g_g = tensor::kulkarni_nomizu(g_ro, g_ro);
    const Jet c2 = cb.scalar * (1.0 / (2.0 * (n - 1) * (n - 2)));
    for (std::size_t f = 0; f < cb.weyl.size(); ++f) {
      cb.weyl[f] = cb.riemann[f] - ric_g[f] * (1.0 / (n - 2)) + c2 * g_g[f];
    }
  }

  const int co = H;
  cb.grad_ric = covariant_derivative(cb.ric, cb);
  cb.grad_scalar = gradient(cb.scalar);
  const auto g_co = tensor::truncated(cb.g, co);
  cb.cotton = Tensor<Jet>(3, n, Jet(n, co));
  const double cc = 1.0 / (2.0 * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cb.cotton(i, j, k) = cb.grad_ric(i, j, k) - cb.grad_ric(j, i, k) -
                             cc * (cb.grad_scalar(i) * g_co(j, k) -
                                   cb.grad_scalar(j) * g_co(i, k));
      }
  return cb;
}

CurvatureBundle bundle(const chart::ChartSpec& spec, std::span<const double> point,
                       BundleOptions options) {
  if (options.headroom < 0 || options.headroom > kMaxHeadroom) {
    throw ConfigError("headroom must lie in [0, " + std::to_string(kMaxHeadroom) + "]");
  }
  if (static_cast<int>(point.size()) != spec.dim) {
    throw ShapeMismatch("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                        std::to_string(spec.dim));
  }
  return bundle_from_metric(chart::metric_jets(spec, point, options.headroom + 3), point,
                            options);
}

PotentialBundle potential_from_jets(const Jet& f, const Jet& h, const CurvatureBundle& cb) {
  const int order = cb.headroom + 3;
  if (f.order() < order || h.order() < order) {
    throw HeadroomExceeded("potential jets must carry order " + std::to_string(order));
  }
  PotentialBundle pb;
  pb.f = f.truncated(order);
  pb.h = h.truncated(order);
  pb.grad_f = gradient(pb.f);
  pb.grad_h = gradient(pb.h);
  pb.hess_f = covariant_derivative(pb.grad_f, cb);
  pb.hess_h = covariant_derivative(pb.grad_h, cb);
  pb.lap_f = tensor::trace(pb.hess_f, cb.g_inv);
  pb.lap_h = tensor::trace(pb.hess_h, cb.g_inv);
  return pb;
}

PotentialBundle potential(const chart::ChartSpec& spec, const CurvatureBundle& cb) {
  if (!spec.f) throw MissingStructure("chart carries no potential f");
  const int order = cb.headroom + 3;
  const Jet f = chart::evaluate_jet(spec, *spec.f, cb.point, order);
  if (!spec.h) {
    PotentialBundle pb = potential_from_jets(f, Jet(cb.dim, order), cb);
    pb.has_h = false;
    return pb;
  }
  return potential_from_jets(f, chart::evaluate_jet(spec, *spec.h, cb.point, order), cb);
}

}  // namespace etlab::curvature
