#pragma once

// Data-parallel inner loops used by the sparse products and the dense
// projections. Every kernel has a portable scalar reference and, on x86-64
// builds, an AVX2+FMA variant. The variant is chosen once at runtime from
// CPUID and can be pinned for equivalence testing.

#include <cstdint>
#include <span>
#include <string_view>

namespace simplexi::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::int64_t len);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::int64_t len);
  // sum_p vals[p] * y[idx[p]]
  double (*gather_dot)(const std::int64_t* idx, const double* vals, const double* y,
                       std::int64_t len);
  // y[idx[p]] += a * vals[p]
  void (*scatter_axpy)(double a, const std::int64_t* idx, const double* vals, double* y,
                       std::int64_t len);
};

const KernelTable& table(Isa isa);

// Best variant the running CPU supports.
Isa detect_isa();

// Variant used by the library; defaults to detect_isa().
Isa active_isa();

// Pins the variant used by subsequent calls. Throws if the CPU or build
// lacks it.
void set_active_isa(Isa isa);

bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), static_cast<std::int64_t>(x.size()));
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), static_cast<std::int64_t>(x.size()));
}

namespace detail {
double dot_scalar(const double* x, const double* y, std::int64_t len);
void axpy_scalar(double a, const double* x, double* y, std::int64_t len);
double gather_dot_scalar(const std::int64_t* idx, const double* vals, const double* y,
                         std::int64_t len);
void scatter_axpy_scalar(double a, const std::int64_t* idx, const double* vals, double* y,
                         std::int64_t len);

double dot_avx2(const double* x, const double* y, std::int64_t len);
void axpy_avx2(double a, const double* x, double* y, std::int64_t len);
double gather_dot_avx2(const std::int64_t* idx, const double* vals, const double* y,
                       std::int64_t len);
void scatter_axpy_avx2(double a, const std::int64_t* idx, const double* vals, double* y,
                       std::int64_t len);
}  // namespace detail

}  // namespace simplexi::kernels
