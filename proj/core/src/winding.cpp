#include "cointegra/winding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cointegra/errors.hpp"

namespace cointegra {

namespace {

class PhaseTracker {
 public:
  PhaseTracker(const ScalarFunction& fn, const WindingOptions& opts) : fn_(fn), opts_(opts) {}

  Complex eval(Complex z) const {
    const Complex v = fn_(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ScanResolutionError("non-finite function value on the scan contour");
    }
    if (std::abs(v) == 0.0) throw ScanResolutionError("function vanishes on the scan contour");
    return v;
  }

  // Total phase change along the parametrized path p(s), s in [s0, s1].
  template <class Path>
  double phase(const Path& path, double s0, double s1, int segments) const {
    double total = 0.0;
    const double ds = (s1 - s0) / segments;
    Complex prev = eval(path(s0));
    for (int i = 0; i < segments; ++i) {
      const double a = s0 + i * ds;
      const double b = (i + 1 == segments) ? s1 : a + ds;
      const Complex next = eval(path(b));
      total += refine(path, a, b, prev, next, 0);
      prev = next;
    }
    return total;
  }

 private:
  template <class Path>
  double refine(const Path& path, double a, double b, Complex fa, Complex fb, int depth) const {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < opts_.max_phase_step && depth > 0) return d;
    if (std::abs(d) < 0.25 * opts_.max_phase_step) return d;
    if (depth >= opts_.max_depth) {
      throw ScanResolutionError("winding scan did not stabilize: phase increment " + std::to_string(d) +
                                " after " + std::to_string(depth) + " bisections");
    }
    const double m = 0.5 * (a + b);
    const Complex fm = eval(path(m));
    return refine(path, a, m, fa, fm, depth + 1) + refine(path, m, b, fm, fb, depth + 1);
  }

  const ScalarFunction& fn_;
  const WindingOptions& opts_;
};

int to_count(double phase) {
  const double turns = phase / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    throw ScanResolutionError("winding phase is not a multiple of 2 pi: " + std::to_string(turns) + " turns");
  }
  return int(rounded);
}

int polygon_once(const ScalarFunction& fn, const std::vector<Complex>& v, const WindingOptions& opts) {
  PhaseTracker tracker(fn, opts);
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Complex a = v[i];
    const Complex b = v[(i + 1) % v.size()];
    total += tracker.phase([&](double s) { return a + s * (b - a); }, 0.0, 1.0, opts.base_segments);
  }
  return to_count(total);
}

int circle_once(const ScalarFunction& fn, Complex center, double radius, const WindingOptions& opts) {
  PhaseTracker tracker(fn, opts);
  const double total = tracker.phase(
      [&](double s) { return center + radius * std::polar(1.0, s); }, 0.0, 2.0 * std::numbers::pi,
      opts.base_segments);
  return to_count(total);
}

}  // namespace

int winding_polygon(const ScalarFunction& fn, const std::vector<Complex>& vertices,
                    const WindingOptions& opts) {
  const int coarse = polygon_once(fn, vertices, opts);
  WindingOptions fine = opts;
  fine.base_segments *= 2;
  const int refined = polygon_once(fn, vertices, fine);
  if (coarse != refined) {
    throw ScanResolutionError("winding count changed under refinement doubling (" + std::to_string(coarse) +
                              " vs " + std::to_string(refined) + ")");
  }
  return refined;
}

int winding_circle(const ScalarFunction& fn, Complex center, double radius, const WindingOptions& opts) {
  const int coarse = circle_once(fn, center, radius, opts);
  WindingOptions fine = opts;
  fine.base_segments *= 2;
  const int refined = circle_once(fn, center, radius, fine);
  if (coarse != refined) {
    throw ScanResolutionError("circle winding count changed under refinement doubling");
  }
  return refined;
}

RectangleCount count_zeros_indented(const ScalarFunction& fn, double epsilon, double radius,
                                    double indentation, const WindingOptions& opts) {
  const std::vector<Complex> rect{{-epsilon, -radius}, {radius, -radius}, {radius, radius}, {-epsilon, radius}};
  RectangleCount out;
  const int inside = winding_polygon(fn, rect, opts);
  out.at_origin = winding_circle(fn, 0.0, indentation, opts);
  out.outside_origin = inside - out.at_origin;
  return out;
}

}  // namespace cointegra
