#include "capax/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace capax::kernels {

namespace {

constexpr double kSingularityFloor = 1e-14;

int g_max_order = 12;

using Key = std::tuple<int, int, int, int>;  // (e1, e2, e3, d)

std::map<Key, KernelDerivative>& cache() {
  static std::map<Key, KernelDerivative> c;
  return c;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

TaylorPoly r_squared() {
  TaylorPoly r2(2);
  r2.set_coeff(MultiIndex{{2, 0, 0}}, 1.0);
  r2.set_coeff(MultiIndex{{0, 2, 0}}, 1.0);
  r2.set_coeff(MultiIndex{{0, 0, 2}}, 1.0);
  return r2;
}

// Builds P_beta recursively; callers hold the cache lock.
const KernelDerivative& build(const MultiIndex& beta, int d) {
  const Key key{beta.e[0], beta.e[1], beta.e[2], d};
  auto it = cache().find(key);
  if (it != cache().end()) return it->second;

  KernelDerivative kd;
  kd.beta = beta;
  kd.d = d;
  kd.power = d - 2 + 2 * beta.order();
  if (beta.order() == 0) {
    kd.numerator = TaylorPoly::constant(1.0);
  } else {
    int axis = 0;
    while (beta.e[axis] == 0) ++axis;
    MultiIndex prev = beta;
    prev.e[axis] -= 1;
    const KernelDerivative& p = build(prev, d);
    TaylorPoly xj = TaylorPoly::monomial(MultiIndex{{axis == 0, axis == 1, axis == 2}});
    kd.numerator = r_squared()
                       .times(p.numerator.derivative(axis))
                       .plus(xj.times(p.numerator).scaled(-static_cast<double>(p.power)));
  }
  return cache().emplace(key, std::move(kd)).first->second;
}

}  // namespace

double unit_sphere_measure(int d) {
  if (d < 3) throw NumericalError("unit_sphere_measure: requires d >= 3");
  return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

double fundamental_solution(const Vec3& x, int d) {
  const double r = x.norm();
  if (r < kSingularityFloor)
    throw NumericalError("fundamental_solution: evaluation at the singularity");
  return 1.0 / ((2.0 - d) * unit_sphere_measure(d) * std::pow(r, d - 2));
}

Vec3 grad_fundamental_solution(const Vec3& x, int d) {
  const double r = x.norm();
  if (r < kSingularityFloor)
    throw NumericalError("grad_fundamental_solution: evaluation at the singularity");
  return x / (unit_sphere_measure(d) * std::pow(r, d));
}

const KernelDerivative& kernel_derivative(const MultiIndex& beta, int d) {
  if (beta.order() > g_max_order)
    throw NumericalError("kernel_derivative: |beta| exceeds the configured max order");
  if (d < 3) throw NumericalError("kernel_derivative: requires d >= 3");
  std::lock_guard<std::mutex> lock(cache_mutex());
  return build(beta, d);
}

double eval_kernel_derivative(const KernelDerivative& kd, const Vec3& x) {
  const double r = x.norm();
  if (r < kSingularityFloor)
    throw NumericalError("eval_kernel_derivative: evaluation at the singularity");
  return kd.numerator.eval(x) /
         ((2.0 - kd.d) * unit_sphere_measure(kd.d) * std::pow(r, kd.power));
}

Vec3 grad_kernel_derivative(const KernelDerivative& kd, const Vec3& x) {
  return grad_kernel_derivative(kd.beta, kd.d, x);
}

Vec3 grad_kernel_derivative(const MultiIndex& beta, int d, const Vec3& x) {
  Vec3 g;
  for (int axis = 0; axis < 3; ++axis)
    g[axis] = eval_kernel_derivative(kernel_derivative(beta.bumped(axis), d), x);
  return g;
}

int max_order() { return g_max_order; }

void set_max_order(int order) {
  if (order < 1) throw ConfigError("kernel max order must be >= 1");
  g_max_order = order;
}

void warm_cache(int order, int d) {
  for (const auto& b : MultiIndex::enumerate_up_to(order)) kernel_derivative(b, d);
}

}  // namespace capax::kernels
