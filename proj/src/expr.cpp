#include "etlab/expr.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace etlab::expr {

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 9> kFunctions{{
    {"sin", Function::kSin},
    {"cos", Function::kCos},
    {"tan", Function::kTan},
    {"sinh", Function::kSinh},
    {"cosh", Function::kCosh},
    {"tanh", Function::kTanh},
    {"exp", Function::kExp},
    {"log", Function::kLog},
    {"sqrt", Function::kSqrt},
}};

Expr make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      if (src_[pos_] == ')') fail("unbalanced ')'");
      fail("expected operator or end of input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos_, what); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(BinaryOp::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(BinaryOp::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = binary(BinaryOp::kMul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = binary(BinaryOp::kDiv, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return negate(parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return binary(BinaryOp::kPow, base, parse_factor());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected number, identifier or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
      return parse_number();
    }
    if (ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      const std::string name(src_.substr(start, pos_ - start));
      skip_ws();
      const bool is_call = pos_ < src_.size() && src_[pos_] == '(';
      const auto fn = function_from_name(name);
      if (is_call) {
        if (!fn) throw UnknownFunction(name);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail("expected ')' closing call to " + name);
        return call(*fn, arg);
      }
      if (fn) fail("expected '(' after function name " + name);
      if (name == "pi") return named(NamedConstant::kPi);
      if (name == "e") return named(NamedConstant::kE);
      return make(Node{Variable{name}});
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    return constant(std::strtod(text.c_str(), nullptr));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Printing precedence levels; higher binds tighter.
enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Negate>) {
          return kUnary;
        } else if constexpr (std::is_same_v<T, Binary>) {
          switch (n.op) {
            case BinaryOp::kAdd:
            case BinaryOp::kSub: return kSum;
            case BinaryOp::kMul:
            case BinaryOp::kDiv: return kProduct;
            case BinaryOp::kPow: return kPower;
          }
          return kSum;
        } else {
          return kAtom;
        }
      },
      e.node().value);
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", n.value);
          // Negative literals only arise from builders; keep them atomic.
          if (std::signbit(n.value)) {
            out += '(';
            out += buf;
            out += ')';
          } else {
            out += buf;
          }
        } else if constexpr (std::is_same_v<T, Named>) {
          out += n.which == NamedConstant::kPi ? "pi" : "e";
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += '-';
          print_child(n.operand, precedence(n.operand) < kUnary, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = precedence(e);
          if (n.op == BinaryOp::kPow) {
            print_child(n.lhs, precedence(n.lhs) <= kPower, out);
            out += '^';
            print_child(n.rhs, precedence(n.rhs) < kUnary, out);
            return;
          }
          // A leading unary minus is fine on the left of + and *, since it
          // re-parses as a factor of the leftmost term.
          print_child(n.lhs, precedence(n.lhs) < p, out);
          switch (n.op) {
            case BinaryOp::kAdd: out += " + "; break;
            case BinaryOp::kSub: out += " - "; break;
            case BinaryOp::kMul: out += '*'; break;
            case BinaryOp::kDiv: out += '/'; break;
            case BinaryOp::kPow: break;
          }
          const int rp = precedence(n.rhs);
          print_child(n.rhs, rp < p || (rp == p && rp != kUnary), out);
        } else {
          out += function_name(n.fn);
          out += '(';
          print(n.arg, out);
          out += ')';
        }
      },
      e.node().value);
}

void collect(const Expr& e, std::set<std::string>& vars) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          vars.insert(n.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          collect(n.operand, vars);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect(n.lhs, vars);
          collect(n.rhs, vars);
        } else if constexpr (std::is_same_v<T, Call>) {
          collect(n.arg, vars);
        }
      },
      e.node().value);
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr constant(double value) { return make(Node{Constant{value}}); }
Expr named(NamedConstant which) { return make(Node{Named{which}}); }

Expr variable(std::string name) {
  if (!is_identifier(name) || name == "pi" || name == "e" || function_from_name(name)) {
    throw SyntaxError(0, "invalid variable name '" + name + "'");
  }
  return make(Node{Variable{std::move(name)}});
}

Expr negate(Expr operand) { return make(Node{Negate{std::move(operand)}}); }
Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
  return make(Node{Binary{op, std::move(lhs), std::move(rhs)}});
}
Expr call(Function fn, Expr arg) { return make(Node{Call{fn, std::move(arg)}}); }

Expr operator+(Expr a, Expr b) { return binary(BinaryOp::kAdd, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return binary(BinaryOp::kSub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return binary(BinaryOp::kMul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return binary(BinaryOp::kDiv, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return negate(std::move(a)); }
Expr pow(Expr base, Expr exponent) {
  return binary(BinaryOp::kPow, std::move(base), std::move(exponent));
}

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> vars;
  collect(e, vars);
  return vars;
}

std::string_view function_name(Function fn) {
  for (const auto& [name, f] : kFunctions) {
    if (f == fn) return name;
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  for (const auto& [n, f] : kFunctions) {
    if (n == name) return f;
  }
  return std::nullopt;
}

bool is_identifier(std::string_view name) {
  if (name.empty() || !ident_start(name.front())) return false;
  for (char c : name) {
    if (!ident_char(c)) return false;
  }
  return true;
}

}  // namespace etlab::expr
