#include "etlab/jets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>

namespace etlab::jets {

namespace {

std::uint32_t encode(const MultiIndex& alpha) {
  std::uint32_t key = 0;
  for (int v = 0; v < kMaxVars; ++v) key = key * (kMaxOrder + 1) + alpha[v];
  return key;
}

// All multi-indices of total degree `degree` in `nvars` variables, lex order
// with the first variable's exponent descending.
void enumerate_degree(int nvars, int degree, int var, MultiIndex& cur,
                      std::vector<MultiIndex>& out) {
  if (var == nvars - 1) {
    cur[var] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[var] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, degree - e, var + 1, cur, out);
  }
  cur[var] = 0;
}

struct TableCache {
  std::unordered_map<std::uint32_t, int> lookup;
};

double factorial_of(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

MultiIndexTable::MultiIndexTable(int nvars) : nvars_(nvars) {
  count_.resize(kMaxOrder + 1);
  for (int d = 0; d <= kMaxOrder; ++d) {
    MultiIndex cur{};
    enumerate_degree(nvars, d, 0, cur, indices_);
    count_[d] = indices_.size();
  }
  const std::size_t total = indices_.size();
  std::unordered_map<std::uint32_t, int> lookup;
  lookup.reserve(total * 2);
  degree_.resize(total);
  factorial_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    lookup.emplace(encode(indices_[i]), static_cast<int>(i));
    int deg = 0;
    double fact = 1.0;
    for (int v = 0; v < nvars; ++v) {
      deg += indices_[i][v];
      fact *= factorial_of(indices_[i][v]);
    }
    degree_[i] = deg;
    factorial_[i] = fact;
  }

  raised_.assign(total * nvars, -1);
  for (std::size_t i = 0; i < total; ++i) {
    if (degree_[i] == kMaxOrder) continue;
    for (int v = 0; v < nvars; ++v) {
      MultiIndex up = indices_[i];
      ++up[v];
      raised_[i * nvars + v] = lookup.at(encode(up));
    }
  }

  offsets_.reserve(total + 1);
  offsets_.push_back(0);
  for (std::size_t c = 0; c < total; ++c) {
    const MultiIndex& gamma = indices_[c];
    // Every a <= gamma componentwise pairs with b = gamma - a.
    MultiIndex a{};
    for (;;) {
      MultiIndex b{};
      for (int v = 0; v < nvars; ++v) b[v] = static_cast<std::uint8_t>(gamma[v] - a[v]);
      terms_.push_back({static_cast<std::uint16_t>(lookup.at(encode(a))),
                        static_cast<std::uint16_t>(lookup.at(encode(b)))});
      int v = 0;
      while (v < nvars) {
        if (a[v] < gamma[v]) {
          ++a[v];
          break;
        }
        a[v] = 0;
        ++v;
      }
      if (v == nvars) break;
    }
    offsets_.push_back(terms_.size());
  }
}

const MultiIndexTable& MultiIndexTable::get(int nvars) {
  static const std::vector<std::unique_ptr<MultiIndexTable>> tables = [] {
    std::vector<std::unique_ptr<MultiIndexTable>> t;
    for (int n = 1; n <= kMaxVars; ++n) t.emplace_back(new MultiIndexTable(n));
    return t;
  }();
  if (nvars < 1 || nvars > kMaxVars) {
    throw ShapeMismatch("jet variable count " + std::to_string(nvars) + " outside [1, " +
                        std::to_string(kMaxVars) + "]");
  }
  return *tables[nvars - 1];
}

int MultiIndexTable::find(const MultiIndex& alpha) const {
  int deg = 0;
  for (int v = 0; v < kMaxVars; ++v) {
    if (v >= nvars_ && alpha[v] != 0) return -1;
    deg += alpha[v];
  }
  if (deg > kMaxOrder) return -1;
  // Binary search within the degree block would do; linear is fine at this size.
  const std::size_t lo = deg == 0 ? 0 : count_[deg - 1];
  for (std::size_t i = lo; i < count_[deg]; ++i) {
    if (indices_[i] == alpha) return static_cast<int>(i);
  }
  return -1;
}

Jet::Jet(int nvars, int order) : table_(&MultiIndexTable::get(nvars)), order_(order) {
  if (order < 0 || order > kMaxOrder) {
    throw OrderExceeded("jet order " + std::to_string(order) + " outside [0, " +
                        std::to_string(kMaxOrder) + "]");
  }
  c_.assign(table_->size(order), 0.0);
}

Jet Jet::constant(double c, int nvars, int order) {
  Jet j(nvars, order);
  j.c_[0] = c;
  return j;
}

Jet Jet::variable(int i, double value, int nvars, int order) {
  if (i < 0 || i >= nvars) {
    throw ShapeMismatch("seed index " + std::to_string(i) + " out of range for " +
                        std::to_string(nvars) + " variables");
  }
  Jet j(nvars, order);
  j.c_[0] = value;
  if (order >= 1) j.c_[1 + i] = 1.0;
  return j;
}

double Jet::coefficient(const MultiIndex& alpha) const {
  const int idx = table_->find(alpha);
  if (idx < 0 || table_->degree(idx) > order_) {
    throw OrderExceeded("multi-index exceeds jet order " + std::to_string(order_));
  }
  return static_cast<double>(c_[idx]);
}

double Jet::partial(const MultiIndex& alpha) const {
  const int idx = table_->find(alpha);
  if (idx < 0 || table_->degree(idx) > order_) {
    throw OrderExceeded("derivative exceeds jet order " + std::to_string(order_));
  }
  return static_cast<double>(table_->factorial(idx) * c_[idx]);
}

bool Jet::is_constant() const {
  return std::all_of(c_.begin() + 1, c_.end(), [](Real x) { return x == 0.0L; });
}

Jet Jet::derivative(int var) const {
  if (order_ == 0) throw OrderExceeded("cannot differentiate an order-0 jet");
  if (var < 0 || var >= nvars()) throw ShapeMismatch("derivative variable out of range");
  Jet r(nvars(), order_ - 1);
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    const int up = table_->raised(i, var);
    r.c_[i] = static_cast<Real>(table_->index(up)[var]) * c_[up];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(nvars(), order);
  std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
  return r;
}

namespace {

void check_vars(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars()) {
    throw ShapeMismatch("jets over " + std::to_string(a.nvars()) + " and " +
                        std::to_string(b.nvars()) + " variables");
  }
}

}  // namespace

Jet Jet::operator-() const {
  Jet r = *this;
  for (Real& x : r.c_) x = -x;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  check_vars(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_vars(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (Real& x : c_) x *= s;
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  if (b.order() < a.order()) {
    Jet r = b;
    r += a;
    return r;
  }
  Jet r = a;
  r += b;
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  r -= b;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_vars(a, b);
  const int order = std::min(a.order(), b.order());
  Jet r(a.nvars(), order);
  const MultiIndexTable& t = a.table();
  const Real* pa = a.c_.data();
  const Real* pb = b.c_.data();
  for (std::size_t c = 0; c < r.c_.size(); ++c) {
    Real sum = 0.0;
    for (const auto& term : t.products(c)) sum += pa[term.a] * pb[term.b];
    r.c_[c] = sum;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  check_vars(a, b);
  const Real b0 = b.c_[0];
  if (b0 == 0.0) throw DomainError("division by a jet with zero value");
  const int order = std::min(a.order(), b.order());
  Jet q(a.nvars(), order);
  const MultiIndexTable& t = a.table();
  for (std::size_t c = 0; c < q.c_.size(); ++c) {
    Real sum = a.c_[c];
    for (const auto& term : t.products(c)) {
      if (term.a != 0) sum -= b.c_[term.a] * q.c_[term.b];
    }
    q.c_[c] = sum / b0;
  }
  return q;
}

Jet operator/(const Jet& a, double s) {
  if (s == 0.0) throw DomainError("division by zero");
  Jet r = a;
  for (Real& x : r.coefficients()) x /= s;
  return r;
}

Jet operator/(double s, const Jet& a) { return Jet::constant(s, a.nvars(), a.order()) / a; }

Jet compose(const Jet& a, std::span<const Real> taylor) {
  const int order = a.order();
  if (static_cast<int>(taylor.size()) < order + 1) {
    throw OrderExceeded("composition needs " + std::to_string(order + 1) + " coefficients");
  }
  Jet shift = a;
  shift.coefficients()[0] = 0.0;
  Jet r(a.nvars(), order);
  r.coefficients()[0] = taylor[order];
  for (int k = order - 1; k >= 0; --k) {
    r = r * shift;
    r.coefficients()[0] += taylor[k];
  }
  return r;
}

std::vector<Real> taylor_coefficients(expr::Function fn, Real x0, int order) {
  using expr::Function;
  std::vector<Real> c(order + 1, 0.0);
  auto cyclic = [&](std::array<Real, 4> d) {
    Real fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      c[k] = d[k % 4] / fact;
    }
  };
  switch (fn) {
    case Function::kSin: {
      const Real s = std::sin(x0), co = std::cos(x0);
      cyclic({s, co, -s, -co});
      break;
    }
    case Function::kCos: {
      const Real s = std::sin(x0), co = std::cos(x0);
      cyclic({co, -s, -co, s});
      break;
    }
    case Function::kSinh: {
      const Real s = std::sinh(x0), co = std::cosh(x0);
      cyclic({s, co, s, co});
      break;
    }
    case Function::kCosh: {
      const Real s = std::sinh(x0), co = std::cosh(x0);
      cyclic({co, s, co, s});
      break;
    }
    case Function::kExp: {
      const Real e = std::exp(x0);
      Real fact = 1.0;
      for (int k = 0; k <= order; ++k) {
        if (k > 0) fact *= k;
        c[k] = e / fact;
      }
      break;
    }
    case Function::kLog: {
      if (!(x0 > 0.0)) throw DomainError("log of non-positive value");
      c[0] = std::log(x0);
      Real p = 1.0;
      for (int k = 1; k <= order; ++k) {
        p *= x0;
        c[k] = ((k % 2 == 1) ? 1.0L : -1.0L) / (k * p);
      }
      break;
    }
    case Function::kSqrt: {
      if (!(x0 > 0.0)) throw DomainError("sqrt of non-positive value");
      c[0] = std::sqrt(x0);
      for (int k = 1; k <= order; ++k) c[k] = c[k - 1] * (0.5 - (k - 1)) / (k * x0);
      break;
    }
    case Function::kTan:
    case Function::kTanh: {
      // T' = 1 + T^2 (tan) or 1 - T^2 (tanh), solved order by order.
      const Real sign = fn == Function::kTan ? 1.0L : -1.0L;
      c[0] = fn == Function::kTan ? std::tan(x0) : std::tanh(x0);
      for (int k = 0; k < order; ++k) {
        Real sq = 0.0;
        for (int j = 0; j <= k; ++j) sq += c[j] * c[k - j];
        c[k + 1] = ((k == 0 ? 1.0L : 0.0L) + sign * sq) / (k + 1);
      }
      break;
    }
  }
  return c;
}

Jet apply(expr::Function fn, const Jet& a) {
  return compose(a, taylor_coefficients(fn, a.constant_term(), a.order()));
}

Jet sin(const Jet& a) { return apply(expr::Function::kSin, a); }
Jet cos(const Jet& a) { return apply(expr::Function::kCos, a); }
Jet tan(const Jet& a) { return apply(expr::Function::kTan, a); }
Jet sinh(const Jet& a) { return apply(expr::Function::kSinh, a); }
Jet cosh(const Jet& a) { return apply(expr::Function::kCosh, a); }
Jet tanh(const Jet& a) { return apply(expr::Function::kTanh, a); }
Jet exp(const Jet& a) { return apply(expr::Function::kExp, a); }
Jet log(const Jet& a) { return apply(expr::Function::kLog, a); }
Jet sqrt(const Jet& a) { return apply(expr::Function::kSqrt, a); }

Jet pow_int(const Jet& a, int k) {
  if (k == 0) return Jet::constant(1.0, a.nvars(), a.order());
  const int m = k < 0 ? -k : k;
  Jet acc = a;
  for (int i = 1; i < m; ++i) acc = acc * a;
  if (k < 0) return 1.0 / acc;
  return acc;
}

std::vector<Jet> seed_point(std::span<const double> point, int order) {
  const int n = static_cast<int>(point.size());
  std::vector<Jet> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(Jet::variable(i, point[i], n, order));
  return out;
}

}  // namespace etlab::jets
