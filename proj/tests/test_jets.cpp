#include <cmath>
#include <vector>

#include "doctest.h"
#include "etlab/jets.hpp"
#include "etlab/random.hpp"
#include "support/symbolic_diff.hpp"

using namespace etlab;
using jets::Jet;
using jets::MultiIndex;

namespace {

Jet random_jet(SplitMix64& rng, int nvars, int order) {
  Jet j(nvars, order);
  for (auto& c : j.coefficients()) c = rng.uniform(-1, 1);
  return j;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Five-point central differences of g at x, then one Richardson step.
template <class G>
double fd_derivative(G g, double x, int k) {
  auto stencil = [&](double h) {
    switch (k) {
      case 1: return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
      case 2:
        return (-g(x - 2 * h) + 16 * g(x - h) - 30 * g(x) + 16 * g(x + h) - g(x + 2 * h)) /
               (12 * h * h);
      case 3:
        return (-g(x - 2 * h) + 2 * g(x - h) - 2 * g(x + h) + g(x + 2 * h)) / (2 * h * h * h);
      default:
        return (g(x - 2 * h) - 4 * g(x - h) + 6 * g(x) - 4 * g(x + h) + g(x + 2 * h)) /
               (h * h * h * h);
    }
  };
  const double h = k <= 2 ? 1e-2 : 2e-2;
  const double a = stencil(h), b = stencil(h / 2);
  const int p = k <= 2 ? 4 : 2;
  return b + (b - a) / (std::pow(2.0, p) - 1);
}

}  // namespace

TEST_CASE("multi-index table sizes") {
  for (int n = 1; n <= jets::kMaxVars; ++n) {
    const auto& t = jets::MultiIndexTable::get(n);
    for (int k = 0; k <= jets::kMaxOrder; ++k) CHECK(t.size(k) == binom(n + k, k));
  }
}

TEST_CASE("seed and constant") {
  Jet x = Jet::variable(0, 2.0, 2, 4);
  CHECK(x.coefficients()[0] == 2.0);
  CHECK(x.coefficients()[1] == 1.0);
  CHECK(x.coefficients()[2] == 0.0);
  Jet y = Jet::variable(1, 0.0, 2, 2);
  CHECK(y.partial({0, 1}) == 1.0);
  Jet c = Jet::constant(3.5, 3, 4);
  CHECK(c.is_constant());
  CHECK(c.partial({1, 1, 0}) == 0.0);
  CHECK(Jet::variable(0, 5, 1, 4).partial({1}) == 1.0);
  CHECK_THROWS(Jet::variable(3, 0.0, 2, 2));
}

TEST_CASE("basic products and series") {
  Jet x = Jet::variable(0, 3.0, 1, 4);
  Jet sq = x * x;
  CHECK(sq.value() == 9);
  CHECK(sq.partial({1}) == 6);
  CHECK(sq.coefficient({2}) == 1);
  Jet s = jets::sin(Jet::variable(0, 0.0, 1, 4));
  const double expect[] = {0, 1, 0, -1.0 / 6, 0};
  for (int k = 0; k <= 4; ++k) CHECK(s.coefficients()[k] == doctest::Approx(expect[k]));
  CHECK(jets::exp(Jet::variable(0, 0.0, 1, 4)).partial({4}) == doctest::Approx(1.0));
}

TEST_CASE("fourth derivative of sin(sqrt(3) t)") {
  const double t = 0.3;
  Jet tj = Jet::variable(0, t, 1, 4);
  Jet f = jets::sin(std::sqrt(3.0) * tj);
  CHECK(f.partial({4}) == doctest::Approx(9 * std::sin(std::sqrt(3.0) * t)).epsilon(1e-13));
  auto g = [](double x) { return std::sin(std::sqrt(3.0) * x); };
  CHECK(fd_derivative(g, t, 4) == doctest::Approx(f.partial({4})).epsilon(1e-5));
}

TEST_CASE("Leibniz rule for products") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    Jet a = random_jet(rng, n, 4), b = random_jet(rng, n, 4);
    Jet p = a * b;
    const auto& tab = p.table();
    for (std::size_t i = 0; i < tab.size(4); ++i) {
      const MultiIndex& alpha = tab.index(i);
      double sum = 0;
      for (std::size_t j = 0; j < tab.size(4); ++j) {
        const MultiIndex& beta = tab.index(j);
        bool le = true;
        double coef = 1;
        MultiIndex rest{};
        for (int v = 0; v < n; ++v) {
          if (beta[v] > alpha[v]) le = false;
          else {
            coef *= binom(alpha[v], beta[v]);
            rest[v] = alpha[v] - beta[v];
          }
        }
        if (le) sum += coef * a.partial(beta) * b.partial(rest);
      }
      CHECK(p.partial(alpha) == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("division inverts multiplication") {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Jet a = random_jet(rng, 3, 4), b = random_jet(rng, 3, 4);
    b.coefficients()[0] = 2.0 + rng.uniform();
    Jet q = (a * b) / b;
    for (std::size_t i = 0; i < q.coefficients().size(); ++i)
      CHECK(q.coefficients()[i] == doctest::Approx(a.coefficients()[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Jet::constant(1, 1, 2) / Jet(1, 2), DomainError);
}

TEST_CASE("sin^2 + cos^2 is the unit jet") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Jet a = random_jet(rng, 3, 4);
    Jet one = jets::sin(a) * jets::sin(a) + jets::cos(a) * jets::cos(a);
    CHECK(std::abs(one.value() - 1) <= 1e-14);
    for (std::size_t i = 1; i < one.coefficients().size(); ++i)
      CHECK(std::abs(one.coefficients()[i]) <= 1e-14);
  }
}

TEST_CASE("chain rule against symbolic and finite-difference oracles") {
  const char* outer[] = {"sin(u)", "exp(u)", "sqrt(1+u^2)", "log(2+u)", "tan(u)", "tanh(u)",
                         "cosh(u)", "sinh(u)"};
  SplitMix64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    // Random univariate composition g(x) = outer1(a*outer2(b*x + c)).
    std::string inner = std::string(outer[rng.below(8)]);
    const double a = rng.uniform(-0.8, 0.8), b = rng.uniform(-1, 1), c = rng.uniform(-0.5, 0.5);
    auto subst = [](std::string s, const std::string& u) {
      std::string out;
      for (char ch : s) {
        if (ch == 'u') out += "(" + u + ")";
        else out += ch;
      }
      return out;
    };
    const std::string in = subst(inner, std::to_string(b) + "*x+" + std::to_string(c));
    const std::string src = subst(outer[rng.below(8)], std::to_string(a) + "*" + in);
    auto e = etlab::expr::parse(src);
    const double x0 = rng.uniform(-0.5, 0.5);
    etlab::expr::Env<Jet> env{{"x", Jet::variable(0, x0, 1, 4)}};
    Jet j = etlab::expr::evaluate(e, env);
    auto g = [&](double x) { return etlab::expr::evaluate(e, etlab::expr::Env<double>{{"x", x}}); };
    auto d = e;
    for (int k = 1; k <= 4; ++k) {
      d = testsupport::diff(d, "x");
      const double sym = etlab::expr::evaluate(d, etlab::expr::Env<double>{{"x", x0}});
      const double jet = j.partial({static_cast<std::uint8_t>(k)});
      const double scale = std::max(1.0, std::abs(sym));
      CHECK_MESSAGE(std::abs(jet - sym) <= 1e-12 * scale, src, " k=", k);
      CHECK_MESSAGE(std::abs(fd_derivative(g, x0, k) - jet) <= 1e-5 * scale, src, " k=", k);
    }
  }
}

TEST_CASE("multivariate jets against symbolic mixed partials") {
  auto e = etlab::expr::parse("exp(x*y)*sin(z+x^2)/sqrt(2+y*z)");
  const double p[] = {0.3, -0.4, 0.7};
  Jet j = etlab::expr::evaluate(
      e, etlab::expr::Env<Jet>{{"x", Jet::variable(0, p[0], 3, 4)},
                               {"y", Jet::variable(1, p[1], 3, 4)},
                               {"z", Jet::variable(2, p[2], 3, 4)}});
  const auto& tab = j.table();
  const char* names[] = {"x", "y", "z"};
  for (std::size_t i = 0; i < tab.size(4); ++i) {
    auto d = e;
    for (int v = 0; v < 3; ++v)
      for (int k = 0; k < tab.index(i)[v]; ++k) d = testsupport::diff(d, names[v]);
    const double sym = etlab::expr::evaluate(
        d, etlab::expr::Env<double>{{"x", p[0]}, {"y", p[1]}, {"z", p[2]}});
    CHECK(j.partial(tab.index(i)) == doctest::Approx(sym).epsilon(1e-12));
  }
}

TEST_CASE("derivative, truncation and mixed orders") {
  Jet x = Jet::variable(0, 1.5, 2, 4);
  Jet y = Jet::variable(1, -0.5, 2, 4);
  Jet f = x * x * y;
  Jet fx = f.derivative(0);
  CHECK(fx.order() == 3);
  CHECK(fx.value() == doctest::Approx(2 * 1.5 * -0.5));
  CHECK(fx.partial({0, 1}) == doctest::Approx(3.0));
  CHECK((f + fx).order() == 3);
  CHECK_THROWS_AS(Jet::constant(1, 2, 0).derivative(0), OrderExceeded);
  CHECK_THROWS_AS(Jet(2, 3) + Jet(3, 3), ShapeMismatch);
  CHECK(f.truncated(2).coefficients().size() == 6);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(jets::log(Jet::constant(0, 1, 2)), DomainError);
  CHECK_THROWS_AS(jets::sqrt(Jet::constant(-1, 1, 2)), DomainError);
}
