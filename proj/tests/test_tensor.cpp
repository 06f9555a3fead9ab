#include <cmath>

#include "doctest.h"
#include "etlab/random.hpp"
#include "etlab/tensor.hpp"

using namespace etlab;
using tensor::Tensor;

namespace {

Tensor<double> random_spd(SplitMix64& rng, int n) {
  Tensor<double> a(2, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
  Tensor<double> m(2, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) m(i, j) += a(i, k) * a(j, k);
      if (i == j) m(i, j) += n;
    }
  return m;
}

}  // namespace

TEST_CASE("index layout") {
  Tensor<double> t(3, 4, 0.0);
  CHECK(t.size() == 64);
  CHECK(t.flat_index(1, 2, 3) == 1 * 16 + 2 * 4 + 3);
  CHECK(t.unflatten(27) == std::vector<int>{1, 2, 3});
  CHECK(t.flatten({1, 2, 3}) == 27);
}

TEST_CASE("inverse of an SPD matrix") {
  SplitMix64 rng(2);
  for (int n = 3; n <= 5; ++n) {
    auto m = random_spd(rng, n);
    auto inv = tensor::inverse(m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += m(i, k) * inv(k, j);
        CHECK(std::abs(s - (i == j)) <= 1e-13);
      }
    CHECK(tensor::is_positive_definite(m));
    CHECK(tensor::condition_number(m) >= 1.0);
  }
  Tensor<double> sing(2, 3, 1.0);
  CHECK_THROWS_AS(tensor::inverse(sing), SingularMetric);
  CHECK_FALSE(tensor::is_positive_definite(sing));
}

TEST_CASE("inverse of a jet matrix differentiates correctly") {
  // d(g^-1) = -g^-1 dg g^-1 along each variable
  using jets::Jet;
  const int n = 3;
  Tensor<Jet> g(2, n, Jet(2, 2));
  Jet x = Jet::variable(0, 0.2, 2, 2), y = Jet::variable(1, -0.1, 2, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = (i == j ? 2.0 : 0.3) + 0.1 * (i + 1) * x * y + 0.2 * (j == i) * x;
  auto inv = tensor::inverse(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s = Jet(2, 2);
      for (int k = 0; k < n; ++k) s += g(i, k) * inv(k, j);
      CHECK(std::abs(s.value() - (i == j)) <= 1e-14);
      for (std::size_t c = 1; c < s.coefficients().size(); ++c)
        CHECK(std::abs(s.coefficients()[c]) <= 1e-14);
    }
}

TEST_CASE("contractions") {
  SplitMix64 rng(9);
  const int n = 4;
  auto g = random_spd(rng, n);
  auto gi = tensor::inverse(g);
  // tr g = n, |g|^2 = n, traceless part of g vanishes
  CHECK(tensor::trace(g, gi) == doctest::Approx(n));
  CHECK(tensor::norm_sq(g, gi) == doctest::Approx(n));
  CHECK(tensor::max_abs(tensor::traceless(g, g, gi)) <= 1e-13);
  // raising the first slot of g gives the identity
  auto up = tensor::raise(g, 0, gi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(std::abs(up(i, j) - (i == j)) <= 1e-13);
  // (g ∧ g) contracted on slots 0,2 is 2(n-1) g
  auto kn = tensor::kulkarni_nomizu(g, g);
  auto c = tensor::contract(kn, 0, 2, gi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(c(i, j) == doctest::Approx(2.0 * (n - 1) * g(i, j)));
  // Riemann-type symmetries of the Kulkarni–Nomizu product
  Tensor<double> s(2, n, 0.0), t(2, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      s(i, j) = s(j, i) = rng.uniform(-1, 1);
      t(i, j) = t(j, i) = rng.uniform(-1, 1);
    }
  auto st = tensor::kulkarni_nomizu(s, t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          CHECK(st(i, j, k, l) == doctest::Approx(-st(j, i, k, l)));
          CHECK(st(i, j, k, l) == doctest::Approx(st(k, l, i, j)));
          CHECK(std::abs(st(i, j, k, l) + st(j, k, i, l) + st(k, i, j, l)) <= 1e-14);
        }
  CHECK_THROWS_AS(tensor::contract(kn, 1, 1, gi), ShapeMismatch);
}
