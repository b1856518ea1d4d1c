#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "sgid/kernels.hpp"
#include "sgid/models.hpp"
#include "sgid/rng.hpp"

namespace sgid {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::sum_squares(v)); }

}  // namespace

LogisticObjective::LogisticObjective(const Dataset& data, std::span<const double> weights,
                                     double l2)
    : data_(data), weights_(weights), l2_(l2), dims_(data.dims) {}

double LogisticObjective::value(std::span<const double> params) const {
  auto w = params.first(dims_);
  double b = params[dims_];
  double loss = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const SparseVector& x = data_.rows[i];
    double z = kernels::sparse_dot(x.indices, x.values, w) + b;
    loss += weights_[i] * (softplus(z) - (data_.labels[i] == 1 ? z : 0.0));
  }
  return loss + 0.5 * l2_ * kernels::sum_squares(w);
}

double LogisticObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> grad) const {
  auto w = params.first(dims_);
  double b = params[dims_];
  std::fill(grad.begin(), grad.end(), 0.0);
  auto gw = grad.first(dims_);
  double loss = 0.0;
  double gb = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const SparseVector& x = data_.rows[i];
    double z = kernels::sparse_dot(x.indices, x.values, w) + b;
    double y = data_.labels[i] == 1 ? 1.0 : 0.0;
    loss += weights_[i] * (softplus(z) - y * z);
    double coef = weights_[i] * (sigmoid(z) - y);
    kernels::sparse_axpy(coef, x.indices, x.values, gw);
    gb += coef;
  }
  kernels::axpy(l2_, w, gw);
  grad[dims_] = gb;
  return loss + 0.5 * l2_ * kernels::sum_squares(w);
}

// L-BFGS with a backtracking Armijo line search. Every accepted step lowers
// the loss, so the trace is non-increasing.
LinearModel fit_logistic(const Dataset& data, std::span<const double> weights,
                         const LogisticParams& params, OptimizerTrace* trace) {
  LogisticObjective obj(data, weights, params.l2);
  const std::size_t n = obj.dims();
  std::vector<double> x(n, 0.0), g(n), x_new(n), g_new(n), dir(n);
  double f = obj.value_and_gradient(x, g);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> alpha;

  OptimizerTrace local;
  OptimizerTrace& tr = trace ? *trace : local;
  tr = OptimizerTrace{};
  tr.losses.push_back(f);

  double gnorm = norm2(g);
  std::size_t it = 0;
  for (; it < params.max_iterations && gnorm >= params.tolerance; ++it) {
    // Two-loop recursion.
    std::copy(g.begin(), g.end(), dir.begin());
    alpha.assign(memory.size(), 0.0);
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * kernels::dot(memory[k].s, dir);
      kernels::axpy(-alpha[k], memory[k].y, dir);
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      double gamma = kernels::dot(last.s, last.y) / kernels::dot(last.y, last.y);
      kernels::scale(gamma, dir);
    } else {
      kernels::scale(1.0 / std::max(1.0, gnorm), dir);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      double beta = memory[k].rho * kernels::dot(memory[k].y, dir);
      kernels::axpy(alpha[k] - beta, memory[k].s, dir);
    }
    kernels::scale(-1.0, dir);

    double slope = kernels::dot(g, dir);
    if (!(slope < 0.0)) {
      memory.clear();
      std::copy(g.begin(), g.end(), dir.begin());
      kernels::scale(-1.0 / std::max(1.0, gnorm), dir);
      slope = kernels::dot(g, dir);
    }

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      std::copy(x.begin(), x.end(), x_new.begin());
      kernels::axpy(step, dir, x_new);
      f_new = obj.value_and_gradient(x_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || f_new > f) break;

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      p.s[k] = x_new[k] - x[k];
      p.y[k] = g_new[k] - g[k];
    }
    double sy = kernels::dot(p.s, p.y);
    if (sy > 1e-12 * norm2(p.s) * norm2(p.y)) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (memory.size() > std::max<std::size_t>(params.history, 1)) memory.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    gnorm = norm2(g);
    tr.losses.push_back(f);
  }
  tr.iterations = it;
  tr.final_gradient_norm = gnorm;

  LinearModel m;
  m.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(data.dims));
  m.bias = x[data.dims];
  return m;
}

// Pegasos-style stochastic subgradient descent on the weighted hinge loss.
// The bias is treated as a constant feature and regularized with the rest.
// w is stored as a * v so the per-step shrink costs O(1).
LinearModel fit_linear_svm(const Dataset& data, std::span<const double> weights,
                           const SvmParams& params, std::uint64_t seed) {
  const std::size_t n = data.size();
  const double lambda = 1.0 / (params.c * static_cast<double>(n));
  const double max_weight = *std::max_element(weights.begin(), weights.end());
  const double radius = std::sqrt(max_weight / lambda);

  std::vector<double> v(data.dims, 0.0);
  double vb = 0.0;
  double a = 1.0;
  double v_sq = 0.0;  // ||v||^2 + vb^2

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::size_t t = 1;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const SparseVector& x = data.rows[i];
      const double y = data.labels[i] == 1 ? 1.0 : -1.0;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y * a * (kernels::sparse_dot(x.indices, x.values, v) + vb);

      const double shrink = 1.0 - 1.0 / static_cast<double>(t);
      if (shrink == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        v_sq = 0.0;
        a = 1.0;
      } else {
        a *= shrink;
      }
      if (margin < 1.0) {
        double c = eta * weights[i] * y / a;
        double vx = kernels::sparse_dot(x.indices, x.values, v) + vb;
        double xx = kernels::sum_squares(x.values) + 1.0;
        kernels::sparse_axpy(c, x.indices, x.values, v);
        vb += c;
        v_sq += 2.0 * c * vx + c * c * xx;
      }
      double norm = std::abs(a) * std::sqrt(std::max(v_sq, 0.0));
      if (norm > radius) a *= radius / norm;
      if (std::abs(a) < 1e-9) {
        kernels::scale(a, v);
        vb *= a;
        a = 1.0;
        v_sq = kernels::sum_squares(v) + vb * vb;
      }
      ++t;
    }
  }

  LinearModel m;
  m.weights = std::move(v);
  kernels::scale(a, m.weights);
  m.bias = vb * a;
  return m;
}

}  // namespace sgid
