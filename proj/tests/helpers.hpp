#pragma once

#include <cmath>
#include <functional>

#include "cointegra/linalg.hpp"

namespace testing {

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? double(m.cwiseAbs().maxCoeff()) : 0.0;
}

inline cointegra::Mat mat2(double a, double b, double c, double d) {
  cointegra::Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

/// Composite Simpson on [a, b] with an even number of cells; kept independent
/// of the library quadrature.
template <class F>
auto simpson(F f, double a, double b, int cells) {
  const double h = (b - a) / cells;
  auto acc = (f(a) + f(b)).eval();
  for (int i = 1; i < cells; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return (acc * (h / 3.0)).eval();
}

}  // namespace testing
