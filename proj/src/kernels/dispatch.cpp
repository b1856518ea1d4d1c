#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sgid/kernels.hpp"

namespace sgid::kernels {

namespace {

constexpr KernelTable kScalarTable{scalar::dot,         scalar::axpy,
                                   scalar::scale,       scalar::sum_squares,
                                   scalar::sparse_dot,  scalar::sparse_axpy};
#if SGID_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2Table{avx2::dot,        avx2::axpy,       avx2::scale,
                                 avx2::sum_squares, avx2::sparse_dot, avx2::sparse_axpy};
#endif

Backend initial_backend() {
  if (const char* env = std::getenv("SGID_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::kScalar;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& selected() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool cpu_has_avx2() {
#if SGID_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::kAvx2 && !cpu_has_avx2()) {
    throw std::runtime_error("AVX2 kernels requested but not supported by this CPU");
  }
  selected().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
#if SGID_HAVE_AVX2_KERNELS
  if (b == Backend::kAvx2) return kAvx2Table;
#else
  (void)b;
#endif
  return kScalarTable;
}

std::string_view backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace sgid::kernels
