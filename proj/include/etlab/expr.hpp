#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "etlab/errors.hpp"

namespace etlab::expr {

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };
enum class Function { kSin, kCos, kTan, kSinh, kCosh, kTanh, kExp, kLog, kSqrt };
enum class NamedConstant { kPi, kE };

struct Node;

/// Immutable scalar expression tree. Copies share structure.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const Node> node);
  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

struct Constant {
  double value;
};
struct Named {
  NamedConstant which;
};
struct Variable {
  std::string name;
};
struct Negate {
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Call {
  Function fn;
  Expr arg;
};

struct Node {
  std::variant<Constant, Named, Variable, Negate, Binary, Call> value;
};

Expr constant(double value);
Expr named(NamedConstant which);
// Throws SyntaxError when `name` is not a valid identifier or is reserved.
Expr variable(std::string name);
Expr negate(Expr operand);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
Expr call(Function fn, Expr arg);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr pow(Expr base, Expr exponent);

/// Parses `source` under the grammar
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | power
///   power  := atom ("^" factor)?
///   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
///
/// `pi` and `e` are named constants. Throws SyntaxError (with byte offset)
/// or UnknownFunction.
Expr parse(std::string_view source);

/// Canonical text form; parse(to_string(e)) reproduces e structurally.
std::string to_string(const Expr& e);

std::set<std::string> free_variables(const Expr& e);

std::string_view function_name(Function fn);
std::optional<Function> function_from_name(std::string_view name);
bool is_identifier(std::string_view name);

/// Scalar ring adapter used by evaluate(). Specialised for double here and
/// for jets in jets.hpp.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  struct Context {};
  static Context context_of(const std::map<std::string, double, std::less<>>&) {
    return {};
  }
  static double constant(double v, const Context&) { return v; }
  static double value(double x) { return x; }
  static bool is_pure_constant(double) { return true; }
  static double apply(Function fn, double x) {
    switch (fn) {
      case Function::kSin: return std::sin(x);
      case Function::kCos: return std::cos(x);
      case Function::kTan: return std::tan(x);
      case Function::kSinh: return std::sinh(x);
      case Function::kCosh: return std::cosh(x);
      case Function::kTanh: return std::tanh(x);
      case Function::kExp: return std::exp(x);
      case Function::kLog: return std::log(x);
      case Function::kSqrt: return std::sqrt(x);
    }
    return x;
  }
};

template <class S>
using Env = std::map<std::string, S, std::less<>>;

namespace detail {

// Integer exponents up to this magnitude are expanded into products.
inline constexpr double kMaxIntegerExponent = 64.0;

template <class S>
S integer_power(const S& base, long k, const typename ScalarOps<S>::Context& ctx) {
  using Ops = ScalarOps<S>;
  if (k == 0) return Ops::constant(1.0, ctx);
  const long m = k < 0 ? -k : k;
  S acc = base;
  for (long i = 1; i < m; ++i) acc = acc * base;
  if (k < 0) {
    if (Ops::value(acc) == 0.0) throw DomainError("division by zero in negative power");
    return Ops::constant(1.0, ctx) / acc;
  }
  return acc;
}

template <class S>
S eval(const Expr& e, const Env<S>& env, const typename ScalarOps<S>::Context& ctx) {
  using Ops = ScalarOps<S>;
  return std::visit(
      [&](const auto& n) -> S {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return Ops::constant(n.value, ctx);
        } else if constexpr (std::is_same_v<T, Named>) {
          return Ops::constant(n.which == NamedConstant::kPi ? M_PI : M_E, ctx);
        } else if constexpr (std::is_same_v<T, Variable>) {
          auto it = env.find(n.name);
          if (it == env.end()) throw UnboundVariable(n.name);
          return it->second;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval(n.operand, env, ctx);
        } else if constexpr (std::is_same_v<T, Binary>) {
          S a = eval(n.lhs, env, ctx);
          S b = eval(n.rhs, env, ctx);
          switch (n.op) {
            case BinaryOp::kAdd: return a + b;
            case BinaryOp::kSub: return a - b;
            case BinaryOp::kMul: return a * b;
            case BinaryOp::kDiv:
              if (Ops::value(b) == 0.0) throw DomainError("division by zero");
              return a / b;
            case BinaryOp::kPow: {
              const double bv = Ops::value(b);
              if (Ops::is_pure_constant(b) && bv == std::trunc(bv) &&
                  std::abs(bv) <= kMaxIntegerExponent) {
                return integer_power(a, static_cast<long>(bv), ctx);
              }
              if (!(Ops::value(a) > 0.0)) {
                throw DomainError("non-integer power of non-positive base");
              }
              return Ops::apply(Function::kExp, b * Ops::apply(Function::kLog, a));
            }
          }
          throw DomainError("bad binary operator");
        } else {
          S x = eval(n.arg, env, ctx);
          if ((n.fn == Function::kLog || n.fn == Function::kSqrt) &&
              !(Ops::value(x) > 0.0)) {
            throw DomainError(std::string(function_name(n.fn)) +
                              " of non-positive value " +
                              std::to_string(Ops::value(x)));
          }
          return Ops::apply(n.fn, x);
        }
      },
      e.node().value);
}

}  // namespace detail

/// Evaluates `e` in the scalar ring S. Every free variable must be bound.
template <class S>
S evaluate(const Expr& e, const Env<S>& env, const typename ScalarOps<S>::Context& ctx) {
  return detail::eval(e, env, ctx);
}

template <class S>
S evaluate(const Expr& e, const Env<S>& env) {
  return detail::eval(e, env, ScalarOps<S>::context_of(env));
}

}  // namespace etlab::expr
