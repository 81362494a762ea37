#pragma once

namespace capax::spectral {

/// Spherical Bessel functions of the first and second kind, closed forms
/// for l <= 2 with a series fallback of j_l near zero (the closed forms
/// cancel catastrophically for small arguments).
double sph_bessel_j(int l, double z);
double sph_bessel_y(int l, double z);

/// n-th positive root of j_l (Dirichlet ball modes); bisection to 1e-13.
double ball_mode_wavenumber(int l, int n);

/// Dirichlet eigenvalue of the spherical shell eps < |x| < 1: lambda = k^2
/// with k the n-th positive root of the radial cross product
/// j_l(k eps) y_l(k) - j_l(k) y_l(k eps). For l = 0 this is (n pi/(1-eps))^2.
double shell_eigenvalue_oracle(double eps, int angular_order, int radial_index);

}  // namespace capax::spectral
