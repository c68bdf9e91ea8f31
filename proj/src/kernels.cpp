#include "simplexi/kernels.hpp"

#include <atomic>

#include "simplexi/types.hpp"

namespace simplexi::kernels {

namespace {

constexpr KernelTable kScalar{&detail::dot_scalar, &detail::axpy_scalar,
                              &detail::gather_dot_scalar, &detail::scatter_axpy_scalar};

#if defined(SIMPLEXI_HAVE_AVX2)
constexpr KernelTable kAvx2{&detail::dot_avx2, &detail::axpy_avx2, &detail::gather_dot_avx2,
                            &detail::scatter_axpy_avx2};
#endif

bool cpu_has_avx2() {
#if defined(SIMPLEXI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(detect_isa())};
  return slot;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa detect_isa() {
  static const Isa detected = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return detected;
}

const KernelTable& table(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return kScalar;
    case Isa::avx2:
#if defined(SIMPLEXI_HAVE_AVX2)
      if (cpu_has_avx2()) return kAvx2;
#endif
      throw Error("AVX2 kernels unavailable on this build or CPU");
  }
  return kScalar;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

Isa active_isa() { return &active() == &kScalar ? Isa::scalar : Isa::avx2; }

void set_active_isa(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace simplexi::kernels
