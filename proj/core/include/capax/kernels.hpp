#pragma once

#include "capax/common.hpp"
#include "capax/multi_index.hpp"
#include "capax/taylor_poly.hpp"

namespace capax::kernels {

/// (d-1)-dimensional measure of the unit sphere in R^d, s_d = 2 pi^(d/2) / Gamma(d/2).
double unit_sphere_measure(int d);

/// Fundamental solution of the Laplacian, S_d(x) = 1 / ((2-d) s_d |x|^(d-2)).
/// Negative for d >= 3. Points live in R^3; d enters through s_d and the
/// exponent only.
double fundamental_solution(const Vec3& x, int d = 3);

/// Gradient of S_d, (grad S_d)(x) = x / (s_d |x|^d).
Vec3 grad_fundamental_solution(const Vec3& x, int d = 3);

/// Derivative D^beta S_d represented exactly as
///   D^beta S_d(x) = P_beta(x) / ((2-d) s_d |x|^power),  power = d-2+2|beta|,
/// with the numerator polynomial built by the recursion
///   P_{beta+e_j} = |x|^2 d_j P_beta - (d-2+2|beta|) x_j P_beta,  P_0 = 1.
struct KernelDerivative {
  MultiIndex beta;
  int d = 3;
  TaylorPoly numerator;
  int power = 1;
};

/// Memoized derivative table; safe for concurrent readers once populated.
/// |beta| is capped (default 12, see set_max_order).
const KernelDerivative& kernel_derivative(const MultiIndex& beta, int d = 3);

double eval_kernel_derivative(const KernelDerivative& kd, const Vec3& x);
Vec3 grad_kernel_derivative(const KernelDerivative& kd, const Vec3& x);
Vec3 grad_kernel_derivative(const MultiIndex& beta, int d, const Vec3& x);

int max_order();
void set_max_order(int order);

/// Pre-populates the cache for all |beta| <= order (call before parallel use).
void warm_cache(int order, int d = 3);

}  // namespace capax::kernels
