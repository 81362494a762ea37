#pragma once

#include "capax/common.hpp"
#include "capax/multi_index.hpp"

#include <string>
#include <vector>

namespace capax {

/// Polynomial in three variables stored by multi-index coefficients in
/// graded-lex order. Doubles as a truncated Taylor table: the coefficient
/// of x^beta is D^beta f(0) / beta!.
class TaylorPoly {
 public:
  TaylorPoly() = default;
  explicit TaylorPoly(int max_degree);

  static TaylorPoly constant(double c);
  static TaylorPoly monomial(const MultiIndex& beta, double c = 1.0);
  /// p(x) = sum_k c[k] * |x|^(2k); handy for radial Taylor data.
  static TaylorPoly radial_even(const std::vector<double>& c);

  int max_degree() const { return max_degree_; }
  std::size_t size() const { return coef_.size(); }

  double coeff(const MultiIndex& beta) const;
  void set_coeff(const MultiIndex& beta, double v);
  void add_coeff(const MultiIndex& beta, double v);

  double eval(const Vec3& x) const;
  Vec3 grad_eval(const Vec3& x) const;

  TaylorPoly derivative(int axis) const;
  TaylorPoly laplacian() const;
  TaylorPoly times(const TaylorPoly& other) const;
  TaylorPoly plus(const TaylorPoly& other) const;
  TaylorPoly scaled(double a) const;

  /// Homogeneous part of the given total degree.
  TaylorPoly slice(int degree) const;

  double max_abs_coeff() const;
  double max_abs_coeff_of_degree(int degree) const;

  /// Smallest degree whose coefficient block exceeds rel_tol times the
  /// table's max coefficient. Throws NumericalError when the whole table
  /// is below threshold ("identically zero").
  int vanishing_order(double rel_tol = 1e-10) const;
  bool is_zero(double rel_tol = 1e-10) const;
  bool is_homogeneous(double rel_tol = 1e-10) const;
  /// Max-norm of the Laplacian coefficients, relative to the polynomial's
  /// own scale; ~0 for harmonic polynomials.
  bool is_harmonic(double rel_tol = 1e-8) const;

  std::string to_string() const;

  const std::vector<double>& raw() const { return coef_; }

 private:
  int max_degree_ = 0;
  std::vector<double> coef_ = {0.0};
};

}  // namespace capax
