#pragma once

// Symbolic differentiation of expression trees. Test-only oracle: jets must
// agree with repeated symbolic differentiation evaluated in plain doubles.

#include <stdexcept>
#include <string>
#include <variant>

#include "etlab/expr.hpp"

namespace testsupport {

using etlab::expr::Expr;
namespace ex = etlab::expr;

inline Expr diff(const Expr& e, const std::string& x) {
  using namespace etlab::expr;
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant> || std::is_same_v<T, Named>) {
          return constant(0);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return constant(n.name == x ? 1 : 0);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -diff(n.operand, x);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const Expr& a = n.lhs;
          const Expr& b = n.rhs;
          switch (n.op) {
            case BinaryOp::kAdd: return diff(a, x) + diff(b, x);
            case BinaryOp::kSub: return diff(a, x) - diff(b, x);
            case BinaryOp::kMul: return diff(a, x) * b + a * diff(b, x);
            case BinaryOp::kDiv: return (diff(a, x) * b - a * diff(b, x)) / pow(b, constant(2));
            case BinaryOp::kPow: {
              if (free_variables(b).empty()) {
                return b * pow(a, b - constant(1)) * diff(a, x);
              }
              // a^b = exp(b log a)
              return pow(a, b) * (diff(b, x) * call(Function::kLog, a) + b * diff(a, x) / a);
            }
          }
          throw std::logic_error("bad op");
        } else {
          const Expr& u = n.arg;
          const Expr du = diff(u, x);
          switch (n.fn) {
            case Function::kSin: return call(Function::kCos, u) * du;
            case Function::kCos: return -call(Function::kSin, u) * du;
            case Function::kTan:
              return du / pow(call(Function::kCos, u), constant(2));
            case Function::kSinh: return call(Function::kCosh, u) * du;
            case Function::kCosh: return call(Function::kSinh, u) * du;
            case Function::kTanh:
              return du / pow(call(Function::kCosh, u), constant(2));
            case Function::kExp: return call(Function::kExp, u) * du;
            case Function::kLog: return du / u;
            case Function::kSqrt: return du / (constant(2) * call(Function::kSqrt, u));
          }
          throw std::logic_error("bad function");
        }
      },
      e.node().value);
}

}  // namespace testsupport
