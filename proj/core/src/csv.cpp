#include "cointegra/csv.hpp"

#include <algorithm>
#include <cstdio>

namespace cointegra {

namespace {

void matrix_header(std::ostream& os, const char* name, int n) {
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) os << ", " << name << '_' << i << j;
}

void matrix_row(std::ostream& os, const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ", " << format_number(m(i, j));
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_kernel_csv(std::ostream& os, const KernelGrid& kernel, std::size_t stride) {
  const int n = kernel.dim();
  os << 't';
  matrix_header(os, "Ctilde", n);
  matrix_header(os, "C", n);
  matrix_header(os, "f", n);
  os << '\n';
  stride = std::max<std::size_t>(1, stride);
  for (std::size_t k = 0; k < kernel.size(); k += stride) {
    os << format_number(kernel.time(k));
    matrix_row(os, kernel.c_tilde[k]);
    matrix_row(os, kernel.c[k]);
    matrix_row(os, kernel.f[k]);
    os << '\n';
  }
}

void write_paths_csv(std::ostream& os, const std::vector<SolutionPath>& paths, std::size_t stride) {
  const int n = paths.empty() ? 0 : int(paths.front().x.rows());
  os << "path_id, t";
  for (int i = 1; i <= n; ++i) os << ", X_" << i;
  os << '\n';
  stride = std::max<std::size_t>(1, stride);
  for (std::size_t id = 0; id < paths.size(); ++id) {
    const auto& p = paths[id];
    for (long c = 0; c < long(p.x.cols()); c += long(stride)) {
      os << id << ", " << format_number(p.time(p.first + c));
      for (int i = 0; i < n; ++i) os << ", " << format_number(p.x(i, c));
      os << '\n';
    }
  }
}

void write_variance_csv(std::ostream& os, const std::vector<std::pair<std::string, VarianceProfile>>& profiles,
                        std::size_t stride) {
  os << "t, direction_label, variance\n";
  stride = std::max<std::size_t>(1, stride);
  for (const auto& [label, prof] : profiles) {
    for (std::size_t i = 0; i < prof.t.size(); i += stride) {
      os << format_number(prof.t[i]) << ", " << label << ", " << format_number(prof.variance[i]) << '\n';
    }
  }
}

void write_granger_csv(std::ostream& os, const VARGrangerRep& rep) {
  const int n = int(rep.c0.rows());
  os << 'j';
  matrix_header(os, "C", n);
  os << '\n' << -1;
  matrix_row(os, rep.c0);
  os << '\n';
  for (std::size_t j = 0; j < rep.c.size(); ++j) {
    os << j;
    matrix_row(os, rep.c[j]);
    os << '\n';
  }
}

}  // namespace cointegra
