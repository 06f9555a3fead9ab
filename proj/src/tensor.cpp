#include "etlab/tensor.hpp"

namespace etlab::tensor {

bool is_positive_definite(const Tensor<double>& m) {
  const int n = m.dim();
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return true;
}

double condition_number(const Tensor<double>& m) {
  auto norm1 = [](const Tensor<double>& a) {
    double best = 0.0;
    for (int j = 0; j < a.dim(); ++j) {
      double s = 0.0;
      for (int i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
      best = std::max(best, s);
    }
    return best;
  };
  try {
    return norm1(m) * norm1(inverse(m));
  } catch (const SingularMetric&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace etlab::tensor
