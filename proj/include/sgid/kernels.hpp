#pragma once

// Dense and sparse-dense arithmetic used by the linear models.
//
// Every kernel has a scalar reference in sgid::kernels::scalar. On x86-64 an
// AVX2+FMA variant lives in sgid::kernels::avx2 and is selected at runtime
// when the CPU supports it. SGID_KERNELS=scalar in the environment forces the
// reference path. Reductions in the SIMD path use a different summation
// order, so results agree with the reference to rounding, not bit-for-bit.

#include <cstdint>
#include <span>
#include <string_view>

namespace sgid::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*scale)(double, std::span<double>);
  double (*sum_squares)(std::span<const double>);
  double (*sparse_dot)(std::span<const std::uint32_t>, std::span<const double>,
                       std::span<const double>);
  void (*sparse_axpy)(double, std::span<const std::uint32_t>, std::span<const double>,
                      std::span<double>);
};

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> y);
double sum_squares(std::span<const double> a);
double sparse_dot(std::span<const std::uint32_t> idx, std::span<const double> val,
                  std::span<const double> dense);
void sparse_axpy(double alpha, std::span<const std::uint32_t> idx,
                 std::span<const double> val, std::span<double> dense);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SGID_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> y);
double sum_squares(std::span<const double> a);
double sparse_dot(std::span<const std::uint32_t> idx, std::span<const double> val,
                  std::span<const double> dense);
void sparse_axpy(double alpha, std::span<const std::uint32_t> idx,
                 std::span<const double> val, std::span<double> dense);
}  // namespace avx2
#else
#define SGID_HAVE_AVX2_KERNELS 0
#endif

/// True when the running CPU can execute the AVX2 variants.
bool cpu_has_avx2();

/// Currently selected backend.
Backend active_backend();

/// Overrides the selection. Requesting kAvx2 on a CPU without it is an error.
void set_backend(Backend b);

const KernelTable& table(Backend b);

std::string_view backend_name(Backend b);

// Dispatched entry points.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return table(active_backend()).dot(a, b);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  table(active_backend()).axpy(alpha, x, y);
}
inline void scale(double alpha, std::span<double> y) {
  table(active_backend()).scale(alpha, y);
}
inline double sum_squares(std::span<const double> a) {
  return table(active_backend()).sum_squares(a);
}
inline double sparse_dot(std::span<const std::uint32_t> idx, std::span<const double> val,
                         std::span<const double> dense) {
  return table(active_backend()).sparse_dot(idx, val, dense);
}
inline void sparse_axpy(double alpha, std::span<const std::uint32_t> idx,
                        std::span<const double> val, std::span<double> dense) {
  table(active_backend()).sparse_axpy(alpha, idx, val, dense);
}

}  // namespace sgid::kernels
