#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "etlab/errors.hpp"
#include "etlab/expr.hpp"

namespace etlab::jets {

inline constexpr int kMaxVars = 6;
inline constexpr int kMaxOrder = 8;

using MultiIndex = std::array<std::uint8_t, kMaxVars>;

// Coefficient type. Extended precision absorbs the cancellation that polar
// charts produce near their coordinate singularities.
using Real = long double;

/// Graded-lexicographic enumeration of multi-indices for one variable count,
/// built once up to kMaxOrder. Because the enumeration is graded, the
/// indices of total degree <= k form a prefix, so one table serves every
/// truncation order.
class MultiIndexTable {
 public:
  struct Term {
    std::uint16_t a;
    std::uint16_t b;
  };

  static const MultiIndexTable& get(int nvars);

  int nvars() const { return nvars_; }
  // Number of multi-indices with |alpha| <= order.
  std::size_t size(int order) const { return count_[order]; }
  const MultiIndex& index(std::size_t i) const { return indices_[i]; }
  int degree(std::size_t i) const { return degree_[i]; }
  // Position of alpha in the enumeration; -1 when |alpha| > kMaxOrder.
  int find(const MultiIndex& alpha) const;
  // Position of alpha + e_var for the multi-index at position i.
  int raised(std::size_t i, int var) const { return raised_[i * nvars_ + var]; }
  // alpha! for the multi-index at position i.
  double factorial(std::size_t i) const { return factorial_[i]; }
  // All (a, b) with index(a) + index(b) == index(c), for c in [0, size).
  std::span<const Term> products(std::size_t c) const {
    return {terms_.data() + offsets_[c], terms_.data() + offsets_[c + 1]};
  }

 private:
  explicit MultiIndexTable(int nvars);

  int nvars_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degree_;
  std::vector<std::size_t> count_;
  std::vector<int> raised_;
  std::vector<double> factorial_;
  std::vector<Term> terms_;
  std::vector<std::size_t> offsets_;
};

struct JetShape {
  int nvars = 1;
  int order = 0;
};

/// Truncated multivariate Taylor series. Coefficient alpha holds
/// d^alpha(value) / alpha!. Binary operations require the same variable count;
/// operands of different truncation order combine at the lower order, since
/// the higher coefficients of the result are not determined.
class Jet {
 public:
  Jet() : Jet(1, 0) {}
  Jet(int nvars, int order);

  static Jet constant(double c, int nvars, int order);
  // The coordinate function x_i expanded about `value`.
  static Jet variable(int i, double value, int nvars, int order);

  int nvars() const { return table_->nvars(); }
  int order() const { return order_; }
  JetShape shape() const { return {nvars(), order_}; }
  double value() const { return static_cast<double>(c_[0]); }
  Real constant_term() const { return c_[0]; }
  std::span<const Real> coefficients() const { return c_; }
  std::span<Real> coefficients() { return c_; }
  double coefficient(const MultiIndex& alpha) const;
  // d^alpha of the represented function at the expansion point.
  double partial(const MultiIndex& alpha) const;
  bool is_constant() const;

  // First partial along `var`; the result has order - 1.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  const MultiIndexTable& table() const { return *table_; }

 private:
  const MultiIndexTable* table_;
  int order_;
  std::vector<Real> c_;
};

inline Jet operator*(const Jet& a, double s) {
  Jet r = a;
  r *= s;
  return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }
inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }
Jet operator/(const Jet& a, double s);
Jet operator/(double s, const Jet& a);

/// Composes the univariate series sum_k taylor[k] * t^k with the
/// non-constant part of `a` (Horner over truncated products).
Jet compose(const Jet& a, std::span<const Real> taylor);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
Jet exp(const Jet& a);
// log and sqrt throw DomainError on a non-positive value.
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow_int(const Jet& a, int k);
Jet apply(expr::Function fn, const Jet& a);

// Univariate Taylor coefficients f^(k)(x0)/k!, k = 0..order.
std::vector<Real> taylor_coefficients(expr::Function fn, Real x0, int order);

// Seeds every coordinate of `point` as a jet variable.
std::vector<Jet> seed_point(std::span<const double> point, int order);

}  // namespace etlab::jets

namespace etlab::expr {

template <>
struct ScalarOps<jets::Jet> {
  using Context = jets::JetShape;
  static Context context_of(const Env<jets::Jet>& env) {
    if (env.empty()) throw ConfigError("jet evaluation needs a bound variable or explicit shape");
    return env.begin()->second.shape();
  }
  static jets::Jet constant(double v, const Context& ctx) {
    return jets::Jet::constant(v, ctx.nvars, ctx.order);
  }
  static double value(const jets::Jet& x) { return x.value(); }
  static bool is_pure_constant(const jets::Jet& x) { return x.is_constant(); }
  static jets::Jet apply(Function fn, const jets::Jet& x) { return jets::apply(fn, x); }
};

}  // namespace etlab::expr
