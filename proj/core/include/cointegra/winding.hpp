#pragma once

#include <functional>
#include <vector>

#include "cointegra/linalg.hpp"

namespace cointegra {

using ScalarFunction = std::function<Complex(Complex)>;

struct WindingOptions {
  /// Initial number of segments on each polygon edge (or on the circle).
  int base_segments = 64;
  /// Maximum number of bisections of a single segment.
  int max_depth = 16;
  /// A segment is accepted once its phase increment is below this value.
  double max_phase_step = 1.5707963267948966;
};

/// Winding number of fn around 0 along the closed polygon through `vertices`
/// (counter-clockwise), i.e. the number of zeros enclosed when fn is analytic.
///
/// Each segment is bisected until its phase increment is below
/// max_phase_step; the count is then recomputed with twice the base
/// subdivision and must agree. Throws ScanResolutionError otherwise, or when
/// fn vanishes on the contour.
int winding_polygon(const ScalarFunction& fn, const std::vector<Complex>& vertices,
                    const WindingOptions& opts = {});

/// Winding number along the circle |z - center| = radius.
int winding_circle(const ScalarFunction& fn, Complex center, double radius,
                   const WindingOptions& opts = {});

/// Zeros of fn inside the rectangle [-epsilon, radius] x [-radius, radius],
/// excluding those inside the disc |z| < indentation around the origin.
struct RectangleCount {
  int outside_origin = 0;
  int at_origin = 0;
};
RectangleCount count_zeros_indented(const ScalarFunction& fn, double epsilon, double radius,
                                    double indentation, const WindingOptions& opts = {});

}  // namespace cointegra
