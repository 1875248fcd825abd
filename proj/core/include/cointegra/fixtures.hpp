#pragma once

#include <cstdint>

#include "cointegra/levy.hpp"
#include "cointegra/mcarma.hpp"
#include "cointegra/measure.hpp"
#include "cointegra/var_oracle.hpp"

namespace cointegra::fixtures {

/// eta = -I_2 delta_0.
SignedMatrixMeasure ou_stationary();
/// eta = A delta_0 with A = [[-1, 1], [0, 0]].
SignedMatrixMeasure ou_cointegrated();
Mat ou_cointegrated_matrix();
SignedMatrixMeasure zero_measure(int n);
/// eta = -delta_1 (n = 1); rightmost zeros of z + e^{-z} sit at -0.318 +- 1.337i,
/// so the certified decay rate is set to 0.2.
SignedMatrixMeasure unit_delay();

/// p = 1, P_1 = [[1, -1], [0, 0]].
MCARMASpec mcarma_p1();
/// Bivariate cointegrated MCARMA(2, 1).
MCARMASpec mcarma_bivariate();
/// First n = 3, p = 2 spec from a seeded search that passes all four
/// cointegration clauses and keeps the nonzero zeros of det P in Re z < -0.25.
MCARMASpec mcarma_random(std::uint64_t seed = 7);

/// Gamma_1 = [[0.5, 0.5], [0.5, 0.5]].
VARSpec var_bivariate();
/// n = 1, Gamma_1 = 1.
VARSpec var_random_walk();
/// n = 1, Gamma_1 = 0.5.
VARSpec var_ar1();

/// Standard n-dimensional Brownian motion.
LevyModel brownian(int n);

}  // namespace cointegra::fixtures
