#include "simplexi/kernels.hpp"

namespace simplexi::kernels::detail {

double dot_scalar(const double* x, const double* y, std::int64_t len) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::int64_t len) {
  for (std::int64_t i = 0; i < len; ++i) y[i] += a * x[i];
}

double gather_dot_scalar(const std::int64_t* idx, const double* vals, const double* y,
                         std::int64_t len) {
  double acc = 0.0;
  for (std::int64_t p = 0; p < len; ++p) acc += vals[p] * y[idx[p]];
  return acc;
}

void scatter_axpy_scalar(double a, const std::int64_t* idx, const double* vals, double* y,
                         std::int64_t len) {
  for (std::int64_t p = 0; p < len; ++p) y[idx[p]] += a * vals[p];
}

}  // namespace simplexi::kernels::detail
