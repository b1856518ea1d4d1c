#include "sgid/kernels.hpp"

namespace sgid::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> y) {
  for (auto& v : y) v *= alpha;
}

double sum_squares(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double sparse_dot(std::span<const std::uint32_t> idx, std::span<const double> val,
                  std::span<const double> dense) {
  double s = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * dense[idx[k]];
  return s;
}

void sparse_axpy(double alpha, std::span<const std::uint32_t> idx,
                 std::span<const double> val, std::span<double> dense) {
  for (std::size_t k = 0; k < idx.size(); ++k) dense[idx[k]] += alpha * val[k];
}

}  // namespace sgid::kernels::scalar
