#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cointegra/kernel.hpp"
#include "cointegra/levy.hpp"
#include "cointegra/var_oracle.hpp"

namespace cointegra {

/// Shortest round-trip form with 17 significant digits ("%.17g").
std::string format_number(double x);

/// "t, Ctilde_11..Ctilde_nn, C_11..C_nn, f_11..f_nn", row-major flattening.
void write_kernel_csv(std::ostream& os, const KernelGrid& kernel, std::size_t stride = 1);

/// "path_id, t, X_1..X_n" for every stride-th grid time of every path.
void write_paths_csv(std::ostream& os, const std::vector<SolutionPath>& paths, std::size_t stride = 1);

/// "t, direction_label, variance".
void write_variance_csv(std::ostream& os, const std::vector<std::pair<std::string, VarianceProfile>>& profiles,
                        std::size_t stride = 1);

/// "j, C_11..C_nn" with row j = -1 holding C_0.
void write_granger_csv(std::ostream& os, const VARGrangerRep& rep);

}  // namespace cointegra
