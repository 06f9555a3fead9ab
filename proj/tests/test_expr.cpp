#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "etlab/expr.hpp"
#include "etlab/jets.hpp"
#include "etlab/random.hpp"

using namespace etlab;
using namespace etlab::expr;

namespace {

double eval_at(const std::string& src, Env<double> env) {
  return evaluate(parse(src), env);
}

// Random expression text over x and y, for round-trip checks.
std::string random_expr(SplitMix64& rng, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    switch (rng.below(4)) {
      case 0: return "x";
      case 1: return "y";
      case 2: return "pi";
      default: return std::to_string(rng.below(9) + 1) + "." + std::to_string(rng.below(10));
    }
  }
  static const char* ops[] = {"+", "-", "*", "/", "^"};
  static const char* fns[] = {"sin", "cos", "exp", "sqrt", "tanh"};
  switch (rng.below(4)) {
    case 0: return "-" + random_expr(rng, depth - 1);
    case 1: return std::string(fns[rng.below(5)]) + "(" + random_expr(rng, depth - 1) + ")";
    case 2:
      return "(" + random_expr(rng, depth - 1) + ")" + ops[rng.below(5)] + random_expr(rng, depth - 1);
    default:
      return random_expr(rng, depth - 1) + ops[rng.below(4)] + random_expr(rng, depth - 1);
  }
}

}  // namespace

TEST_CASE("parse builds the expected tree") {
  Expr e = parse("sin(sqrt(3)*t)");
  const auto& call_node = std::get<Call>(e.node().value);
  CHECK(call_node.fn == Function::kSin);
  const auto& mul = std::get<Binary>(call_node.arg.node().value);
  CHECK(mul.op == BinaryOp::kMul);
  CHECK(std::get<Call>(mul.lhs.node().value).fn == Function::kSqrt);
  CHECK(std::get<Variable>(mul.rhs.node().value).name == "t");
  CHECK(std::get<Variable>(parse("x").node().value).name == "x");
}

TEST_CASE("syntax errors carry offsets") {
  try {
    parse("1+");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse("(x+1"), SyntaxError);
  CHECK_THROWS_AS(parse("x+1)"), SyntaxError);
  CHECK_THROWS_AS(parse("sin x"), SyntaxError);
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("2**x"), SyntaxError);
  CHECK_THROWS_AS(parse("foo(x)"), UnknownFunction);
}

TEST_CASE("unbalanced parentheses are always rejected") {
  for (const char* s : {"(", ")", "((x)", "(x))", "sin(x", "sin(x))", "(1+(2*x)", ")x("}) {
    CHECK_THROWS_AS(parse(s), SyntaxError);
  }
}

TEST_CASE("operator precedence and associativity") {
  CHECK(eval_at("2^3^2", {}) == doctest::Approx(512));
  CHECK(eval_at("-2^2", {}) == doctest::Approx(-4));
  CHECK(eval_at("2^-1", {}) == doctest::Approx(0.5));
  CHECK(eval_at("8/4/2", {}) == doctest::Approx(1));
  CHECK(eval_at("1-2-3", {}) == doctest::Approx(-4));
  CHECK(eval_at("2*x+1", {{"x", 3.0}}) == 7.0);
  CHECK(eval_at("cos(r)", {{"r", 0.0}}) == 1.0);
  CHECK(eval_at("1.5e2 + 2.5E-1", {}) == doctest::Approx(150.25));
  CHECK(eval_at("2*pi", {}) == doctest::Approx(2 * M_PI));
  CHECK(eval_at("e", {}) == doctest::Approx(M_E));
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(eval_at("x + y", {{"x", 1.0}}), UnboundVariable);
  try {
    eval_at("x + y", {{"x", 1.0}});
  } catch (const UnboundVariable& e) {
    CHECK(e.name() == "y");
  }
  CHECK_THROWS_AS(eval_at("log(x)", {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(eval_at("sqrt(x)", {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(eval_at("1/x", {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(eval_at("x^0.5", {{"x", -1.0}}), DomainError);
}

TEST_CASE("free variables") {
  CHECK(free_variables(parse("2*pi")).empty());
  CHECK(free_variables(parse("sin(t)*cos(s)")) == std::set<std::string>{"s", "t"});
  CHECK(free_variables(parse("x + x^2")) == std::set<std::string>{"x"});
}

TEST_CASE("printing is a fixed point after one round trip") {
  SplitMix64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const std::string src = random_expr(rng, 4);
    Expr e = parse(src);
    const std::string once = to_string(e);
    const std::string twice = to_string(parse(once));
    CHECK_MESSAGE(once == twice, src);
    Env<double> env{{"x", 0.37}, {"y", 1.21}};
    double a = 0, b = 0;
    bool threw_a = false, threw_b = false;
    try { a = evaluate(e, env); } catch (const DomainError&) { threw_a = true; }
    try { b = evaluate(parse(once), env); } catch (const DomainError&) { threw_b = true; }
    CHECK(threw_a == threw_b);
    if (!threw_a && std::isfinite(a)) CHECK_MESSAGE(a == b, src);
  }
  CHECK(to_string(parse("-(x)^2")) == "-x^2");
  CHECK(to_string(parse("(-x)^2")) == "(-x)^2");
  CHECK(to_string(parse("a-(b-c)")) == "a - (b - c)");
}

TEST_CASE("double and order-0 jet evaluation agree bit for bit") {
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Expr e = parse(random_expr(rng, 4));
    Env<double> env{{"x", 0.61}, {"y", 1.7}};
    Env<jets::Jet> jenv{{"x", jets::Jet::variable(0, 0.61, 2, 0)},
                        {"y", jets::Jet::variable(1, 1.7, 2, 0)}};
    double a;
    try {
      a = evaluate(e, env);
    } catch (const DomainError&) {
      CHECK_THROWS_AS(evaluate(e, jenv), DomainError);
      continue;
    }
    if (!std::isfinite(a)) continue;
    // jets carry extended precision, so agreement is to rounding
    CHECK(evaluate(e, jenv).value() == doctest::Approx(a).epsilon(1e-13));
  }
}

TEST_CASE("cylinder potential as a jet") {
  const double t0 = M_PI / (2 * std::sqrt(3.0));
  Env<jets::Jet> env{{"t", jets::Jet::variable(0, t0, 1, 4)}};
  jets::Jet f = evaluate(parse("sin(sqrt(3)*t)"), env);
  CHECK(f.value() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(f.partial({1})) < 1e-14);
  CHECK(f.partial({2}) == doctest::Approx(-3.0).epsilon(1e-13));
}
