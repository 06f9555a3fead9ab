#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "etlab/errors.hpp"
#include "etlab/jets.hpp"

namespace etlab::tensor {

using jets::Jet;

enum class Variance { kCovariant, kContravariant };

// Scalar helpers that let tensor code run over doubles and jets alike.
inline double zero_like(double) { return 0.0; }
inline Jet zero_like(const Jet& j) { return Jet(j.nvars(), j.order()); }
inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.value(); }
inline int order_of(double) { return std::numeric_limits<int>::max(); }
inline int order_of(const Jet& j) { return j.order(); }
inline double truncate_to(double x, int) { return x; }
inline Jet truncate_to(const Jet& j, int order) { return j.truncated(order); }

/// Dense coordinate tensor over scalar S, row-major in its indices.
/// Variance markers are bookkeeping; operations assume covariant slots
/// unless they say otherwise.
template <class S>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rank, int dim, const S& fill)
      : rank_(rank),
        dim_(dim),
        comp_(size_for(rank, dim), fill),
        variance_(rank, Variance::kCovariant) {}

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t size() const { return comp_.size(); }
  const std::vector<Variance>& variance() const { return variance_; }
  void set_variance(int slot, Variance v) { variance_.at(slot) = v; }

  S& operator[](std::size_t flat) { return comp_[flat]; }
  const S& operator[](std::size_t flat) const { return comp_[flat]; }

  template <class... I>
  S& operator()(I... idx) {
    return comp_[flat_index(idx...)];
  }
  template <class... I>
  const S& operator()(I... idx) const {
    return comp_[flat_index(idx...)];
  }

  template <class... I>
  std::size_t flat_index(I... idx) const {
    std::size_t f = 0;
    ((f = f * dim_ + static_cast<std::size_t>(idx)), ...);
    return f;
  }

  // Multi-index of a flat position.
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(rank_);
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(flat % dim_);
      flat /= dim_;
    }
    return idx;
  }
  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int i : idx) f = f * dim_ + i;
    return f;
  }

  std::vector<S>& components() { return comp_; }
  const std::vector<S>& components() const { return comp_; }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] += o.comp_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] -= o.comp_[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& c : comp_) c *= s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  void check_same(const Tensor& o) const {
    if (rank_ != o.rank_ || dim_ != o.dim_) {
      throw ShapeMismatch("tensor shapes differ: rank " + std::to_string(rank_) + " dim " +
                          std::to_string(dim_) + " vs rank " + std::to_string(o.rank_) +
                          " dim " + std::to_string(o.dim_));
    }
  }

 private:
  static std::size_t size_for(int rank, int dim) {
    std::size_t s = 1;
    for (int i = 0; i < rank; ++i) s *= static_cast<std::size_t>(dim);
    return s;
  }

  int rank_ = 0;
  int dim_ = 0;
  std::vector<S> comp_;
  std::vector<Variance> variance_;
};

template <class S>
Tensor<S> scalar_tensor(const S& s, int dim) {
  return Tensor<S>(0, dim, s);
}

template <class S>
Tensor<S> scale(const Tensor<S>& t, const S& s) {
  Tensor<S> r = t;
  for (auto& c : r.components()) c = c * s;
  return r;
}

// Component-wise values of a jet tensor.
inline Tensor<double> value(const Tensor<Jet>& t) {
  Tensor<double> r(t.rank(), t.dim(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) r[i] = t[i].value();
  for (int s = 0; s < t.rank(); ++s) r.set_variance(s, t.variance()[s]);
  return r;
}
inline Tensor<double> value(const Tensor<double>& t) { return t; }

template <class S>
int min_order(const Tensor<S>& t) {
  int o = std::numeric_limits<int>::max();
  for (const auto& c : t.components()) o = std::min(o, order_of(c));
  return o;
}

template <class S>
Tensor<S> truncated(const Tensor<S>& t, int order) {
  Tensor<S> r = t;
  for (auto& c : r.components()) c = truncate_to(c, order);
  return r;
}

template <class S>
double max_abs(const Tensor<S>& t) {
  double m = 0.0;
  for (const auto& c : t.components()) m = std::max(m, std::abs(value_of(c)));
  return m;
}

/// Raises index `slot` with the inverse metric: r^{a} = g^{ab} t_{..b..}.
template <class S, class G>
Tensor<S> raise(const Tensor<S>& t, int slot, const Tensor<G>& g_inv) {
  if (slot < 0 || slot >= t.rank()) throw ShapeMismatch("raise: slot out of range");
  const int n = t.dim();
  const auto g = truncated(g_inv, min_order(t));
  Tensor<S> r(t.rank(), n, zero_like(t[0]));
  for (int s = 0; s < t.rank(); ++s) r.set_variance(s, t.variance()[s]);
  r.set_variance(slot, Variance::kContravariant);
  std::size_t stride = 1;
  for (int s = t.rank() - 1; s > slot; --s) stride *= n;
  for (std::size_t f = 0; f < t.size(); ++f) {
    const int a = static_cast<int>((f / stride) % n);
    const std::size_t base = f - static_cast<std::size_t>(a) * stride;
    auto acc = zero_like(t[0]);
    for (int b = 0; b < n; ++b) acc += g(a, b) * t[base + b * stride];
    r[f] = acc;
  }
  return r;
}

/// Contracts slots a and b through the inverse metric; rank drops by two.
template <class S, class G>
Tensor<S> contract(const Tensor<S>& t, int slot_a, int slot_b, const Tensor<G>& g_inv) {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= t.rank() ||
      slot_b >= t.rank()) {
    throw ShapeMismatch("contract: invalid slots " + std::to_string(slot_a) + ", " +
                        std::to_string(slot_b) + " for rank " + std::to_string(t.rank()));
  }
  const int n = t.dim();
  const auto g = truncated(g_inv, min_order(t));
  Tensor<S> r(t.rank() - 2, n, zero_like(t[0]));
  std::vector<int> out_idx(t.rank() - 2), in_idx(t.rank());
  for (std::size_t f = 0; f < r.size(); ++f) {
    out_idx = r.unflatten(f);
    auto acc = zero_like(t[0]);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        int k = 0;
        for (int s = 0; s < t.rank(); ++s) {
          if (s == slot_a) {
            in_idx[s] = a;
          } else if (s == slot_b) {
            in_idx[s] = b;
          } else {
            in_idx[s] = out_idx[k++];
          }
        }
        acc += g(a, b) * t[t.flatten(in_idx)];
      }
    }
    r[f] = acc;
  }
  return r;
}

/// (S∧T)_ijkl = S_ik T_jl + S_jl T_ik − S_il T_jk − S_jk T_il.
template <class S>
Tensor<S> kulkarni_nomizu(const Tensor<S>& s, const Tensor<S>& t) {
  if (s.rank() != 2 || t.rank() != 2 || s.dim() != t.dim()) {
    throw ShapeMismatch("kulkarni_nomizu needs two rank-2 tensors of equal dimension");
  }
  const int n = s.dim();
  Tensor<S> r(4, n, zero_like(s[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r(i, j, k, l) = s(i, k) * t(j, l) + s(j, l) * t(i, k) - s(i, l) * t(j, k) -
                          s(j, k) * t(i, l);
  return r;
}

/// Full self-contraction |t|^2 through g_inv on every slot.
template <class S, class G>
S norm_sq(const Tensor<S>& t, const Tensor<G>& g_inv) {
  if (t.rank() == 0) return t[0] * t[0];
  Tensor<S> up = t;
  for (int s = 0; s < t.rank(); ++s) up = raise(up, s, g_inv);
  auto acc = zero_like(t[0]);
  for (std::size_t f = 0; f < t.size(); ++f) acc += t[f] * up[f];
  return acc;
}

/// g^{ab} s_a t_b for rank-1 s, t.
template <class S, class G>
S inner(const Tensor<S>& s, const Tensor<S>& t, const Tensor<G>& g_inv) {
  if (s.rank() != 1 || t.rank() != 1) throw ShapeMismatch("inner needs rank-1 tensors");
  const auto g = truncated(g_inv, std::min(min_order(s), min_order(t)));
  auto acc = zero_like(s[0]);
  for (int a = 0; a < s.dim(); ++a)
    for (int b = 0; b < s.dim(); ++b) acc += g(a, b) * s[a] * t[b];
  return acc;
}

/// Full contraction of two equally shaped covariant tensors, <s, t>.
template <class S, class G>
S dot(const Tensor<S>& s, const Tensor<S>& t, const Tensor<G>& g_inv) {
  s.check_same(t);
  if (s.rank() == 0) return s[0] * t[0];
  Tensor<S> up = t;
  for (int k = 0; k < t.rank(); ++k) up = raise(up, k, g_inv);
  auto acc = zero_like(s[0]);
  for (std::size_t f = 0; f < s.size(); ++f) acc += s[f] * up[f];
  return acc;
}

template <class S, class G>
S trace(const Tensor<S>& t, const Tensor<G>& g_inv) {
  if (t.rank() != 2) throw ShapeMismatch("trace needs a rank-2 tensor");
  return contract(t, 0, 1, g_inv)[0];
}

/// T − (tr T / n) g.
template <class S, class G>
Tensor<S> traceless(const Tensor<S>& t, const Tensor<G>& g, const Tensor<G>& g_inv) {
  const S tr = trace(t, g_inv);
  const double n = t.dim();
  Tensor<S> r = t;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) r(i, j) -= (tr * (1.0 / n)) * g(i, j);
  return r;
}

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting on the
/// value part. Throws SingularMetric on a vanishing pivot.
template <class S>
Tensor<S> inverse(const Tensor<S>& m) {
  if (m.rank() != 2) throw ShapeMismatch("inverse needs a rank-2 tensor");
  const int n = m.dim();
  Tensor<S> a = m;
  Tensor<S> inv(2, n, zero_like(m[0]));
  for (int i = 0; i < n; ++i) inv(i, i) += 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(piv, col)))) piv = r;
    if (value_of(a(piv, col)) == 0.0) throw SingularMetric("singular matrix in inverse");
    if (piv != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(a(piv, k), a(col, k));
        std::swap(inv(piv, k), inv(col, k));
      }
    }
    const S p = a(col, col);
    for (int k = 0; k < n; ++k) {
      a(col, k) = a(col, k) / p;
      inv(col, k) = inv(col, k) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const S factor = a(r, col);
      for (int k = 0; k < n; ++k) {
        a(r, k) -= factor * a(col, k);
        inv(r, k) -= factor * inv(col, k);
      }
    }
  }
  return inv;
}

/// Cholesky test of positive definiteness of a symmetric matrix.
bool is_positive_definite(const Tensor<double>& m);

/// 1-norm condition number estimate ||A||_1 ||A^-1||_1; infinity when singular.
double condition_number(const Tensor<double>& m);

}  // namespace etlab::tensor
