#include "capax/shell_modes.hpp"

#include "capax/common.hpp"

#include <cmath>
#include <functional>

namespace capax::spectral {

double sph_bessel_j(int l, double z) {
  if (l < 0 || l > 2) throw ConfigError("sph_bessel_j: only l <= 2 supported");
  if (std::abs(z) < 1e-3) {
    // j_l(z) = z^l / (2l+1)!! (1 - z^2/(2(2l+3)) + z^4/(8(2l+3)(2l+5)) - ...)
    const double z2 = z * z;
    const double dblfac = l == 0 ? 1.0 : (l == 1 ? 3.0 : 15.0);
    const double series =
        1.0 - z2 / (2.0 * (2 * l + 3)) + z2 * z2 / (8.0 * (2 * l + 3) * (2 * l + 5));
    return std::pow(z, l) / dblfac * series;
  }
  switch (l) {
    case 0:
      return std::sin(z) / z;
    case 1:
      return std::sin(z) / (z * z) - std::cos(z) / z;
    default:
      return (3.0 / (z * z * z) - 1.0 / z) * std::sin(z) - 3.0 * std::cos(z) / (z * z);
  }
}

double sph_bessel_y(int l, double z) {
  if (l < 0 || l > 2) throw ConfigError("sph_bessel_y: only l <= 2 supported");
  if (z <= 0) throw ConfigError("sph_bessel_y: argument must be positive");
  switch (l) {
    case 0:
      return -std::cos(z) / z;
    case 1:
      return -std::cos(z) / (z * z) - std::sin(z) / z;
    default:
      return (-3.0 / (z * z * z) + 1.0 / z) * std::cos(z) - 3.0 * std::sin(z) / (z * z);
  }
}

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double nth_root(const std::function<double(double)>& f, double k_start, int n,
                double step) {
  int found = 0;
  double k = k_start;
  double fk = f(k);
  for (int it = 0; it < 2000000; ++it) {
    const double k2 = k + step;
    const double f2 = f(k2);
    if ((fk < 0) != (f2 < 0)) {
      ++found;
      if (found == n) return bisect(f, k, k2);
    }
    k = k2;
    fk = f2;
  }
  throw NumericalError("root bracketing failure in the shell eigenvalue oracle");
}

}  // namespace

double ball_mode_wavenumber(int l, int n) {
  if (n < 1) throw ConfigError("ball_mode_wavenumber: radial index must be >= 1");
  return nth_root([l](double k) { return sph_bessel_j(l, k); }, 0.3, n, 0.02);
}

double shell_eigenvalue_oracle(double eps, int angular_order, int radial_index) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ConfigError("shell_eigenvalue_oracle: need 0 < eps < 1");
  if (radial_index < 1) throw ConfigError("shell_eigenvalue_oracle: radial index >= 1");
  const int l = angular_order;
  const auto cross = [&](double k) {
    return sph_bessel_j(l, k * eps) * sph_bessel_y(l, k) -
           sph_bessel_j(l, k) * sph_bessel_y(l, k * eps);
  };
  const double k = nth_root(cross, 0.05, radial_index, 0.01);
  return k * k;
}

}  // namespace capax::spectral
