#pragma once

#include "capax/geometry.hpp"
#include "capax/layer_ops.hpp"
#include "capax/taylor_poly.hpp"

#include <memory>
#include <mutex>
#include <optional>

namespace capax::direct {

/// Spatial dimension of the geometry; series and kernel formulas keep d
/// symbolic but every solver here runs in R^3.
inline constexpr int kDim = 3;

/// Square system bordered by one Lagrange column and one constraint row:
///   [A  col] [x     ]   [b]
///   [row  0] [lambda] = [c].
class BorderedSystem {
 public:
  BorderedSystem() = default;
  BorderedSystem(const Matrix& A, const Vector& border_col, const Vector& constraint_row);
  Vector solve(const Vector& b, double c, double* lagrange = nullptr,
               double* residual = nullptr) const;
  double rcond() const { return lu_.rcond(); }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix full_;
  int n_ = 0;
};

/// Operator bundle for the hole boundary: dense traces, the bordered
/// second-kind systems, the exterior Dirichlet-to-Neumann map, and the
/// equilibrium density (the unit-total-charge solution of the exterior
/// Neumann-null system).
class HoleOps {
 public:
  explicit HoleOps(geom::Surface s);

  const geom::Surface& surface() const { return *s_; }
  const Matrix& W() const { return W_; }
  const Matrix& Wstar() const { return Wstar_; }
  const Matrix& V() const { return V_; }
  const layer::ExteriorDtN& dtn() const { return *dtn_; }

  /// Bordered solve of (1/2 I - W*) x + lambda = rhs with given total charge.
  Vector solve_charge(const Vector& rhs, double total_charge, double* lagrange = nullptr,
                      double* residual = nullptr) const;
  /// Bordered solve of (1/2 I - W) x + lambda = rhs with zero mean.
  Vector solve_dipole(const Vector& rhs, double* lagrange = nullptr,
                      double* residual = nullptr) const;

  const Vector& equilibrium() const { return equilibrium_; }
  /// Constant boundary value of the single layer of the equilibrium
  /// density (negative; its negative reciprocal is the Newtonian capacity).
  double equilibrium_potential_mean() const { return r0_; }

  /// Exterior normal derivative of an exterior-harmonic field with the
  /// given Dirichlet data (single-layer DtN).
  Vector exterior_normal_derivative(const Vector& dirichlet) const {
    return dtn_->apply(dirichlet);
  }

 private:
  std::shared_ptr<const geom::Surface> s_;
  Matrix W_, Wstar_, V_;
  BorderedSystem charge_system_, dipole_system_;
  std::unique_ptr<layer::ExteriorDtN> dtn_;
  Vector equilibrium_;
  double r0_ = 0.0;
};

/// Operator bundle for the outer boundary.
class OuterOps {
 public:
  explicit OuterOps(geom::Surface s);

  const geom::Surface& surface() const { return *s_; }
  const Matrix& W() const { return W_; }
  const Matrix& Wstar() const { return Wstar_; }
  /// Single-layer trace, assembled on first use (boundary-value checks).
  const Matrix& V() const;

  Vector solve_charge(const Vector& rhs) const;  // (1/2 I + W*) x = rhs
  Vector solve_dipole(const Vector& rhs) const;  // (1/2 I + W) x = rhs

 private:
  std::shared_ptr<const geom::Surface> s_;
  Matrix W_, Wstar_;
  Eigen::PartialPivLU<Matrix> lu_charge_, lu_dipole_;
  mutable std::optional<Matrix> V_;
  mutable std::once_flag v_once_;
};

/// Shared discretization of the (Omega, omega) pair.
struct ProblemSetup {
  ProblemSetup(geom::Surface outer_surface, geom::Surface hole_surface)
      : outer(std::move(outer_surface)), hole(std::move(hole_surface)) {}
  OuterOps outer;
  HoleOps hole;

  /// Containment bound for the scaled hole.
  double max_epsilon() const {
    return geom::hole_max_epsilon(outer.surface(), hole.surface());
  }
  void check_epsilon(double eps) const;
};

struct DensityPair {
  layer::Density rho_o;  // on the outer boundary
  layer::Density rho_i;  // on the hole boundary, unit total charge
  double constraint_value = 1.0;
  double lagrange = 0.0;
  double residual = 0.0;
};

struct ThetaPair {
  layer::Density theta_o;
  layer::Density theta_i;  // zero mean
  double lagrange = 0.0;
  double residual = 0.0;
};

/// Coupled charge system at fixed eps (eps = 0 allowed: the blocks then
/// decouple as in the series' zeroth-order systems).
DensityPair solve_rho(const ProblemSetup& setup, double eps);
ThetaPair solve_theta(const ProblemSetup& setup, double eps, const TaylorPoly& u_a,
                      const DensityPair& rho);

/// The rescaled potential u_eps(eps t): double-layer pair plus the
/// charge pair balanced with eps^(d-2) on the outer single layer.
class RescaledPotential {
 public:
  RescaledPotential(const ProblemSetup& setup, double eps, TaylorPoly u_a);

  double epsilon() const { return eps_; }
  const DensityPair& rho() const { return rho_; }
  const ThetaPair& theta() const { return theta_; }
  /// Integral of the rescaled boundary data against rho_i.
  double coupling() const { return coupling_; }
  /// Mean over the hole boundary of the balanced single-layer pair.
  double normalizer() const { return normalizer_; }

  /// Value at t in the rescaled domain (1/eps) Omega minus omega.
  double eval(const Vec3& t) const;
  std::vector<double> eval(const std::vector<Vec3>& ts) const;

  /// Trace at the hole nodes (should match u_a(eps t)).
  Vector boundary_trace_hole() const;
  /// Trace at the outer nodes, mapped to t = x / eps (should vanish).
  Vector boundary_trace_outer() const;
  /// nu . grad_t of the value at the hole nodes.
  Vector normal_derivative_hole() const;

 private:
  const ProblemSetup* setup_;
  double eps_;
  TaylorPoly u_a_;
  DensityPair rho_;
  ThetaPair theta_;
  double coupling_ = 0.0;
  double normalizer_ = 0.0;
};

/// Generalized capacity of the scaled hole for boundary data u_a, u_b,
/// by the boundary-flux formula plus the interior gradient term. The two
/// argument orders are computed and averaged, which enforces the symmetry
/// of the underlying bilinear form at the discrete level.
double capacity_direct(const ProblemSetup& setup, double eps, const TaylorPoly& u_a,
                       const TaylorPoly& u_b);

/// Capacity of the hole in the whole space: -1 / r0 with r0 the mean
/// single-layer value of the equilibrium density.
double newtonian_capacity(const HoleOps& hole);
double newtonian_capacity(const geom::Surface& hole_surface);

/// Exterior Dirichlet solution: harmonic outside, boundary data g,
/// decaying at infinity. Representation: double layer plus a multiple of
/// the equilibrium single layer.
class ExteriorDirichlet {
 public:
  ExteriorDirichlet(std::shared_ptr<const HoleOps> ops, Vector g);

  double eval(const Vec3& t) const;
  std::vector<double> eval(const std::vector<Vec3>& ts) const;
  /// Exterior normal-derivative trace at the nodes.
  const Vector& normal_derivative() const { return normal_derivative_; }
  /// lim |t|^(d-2) u(t), computed algebraically from the charge balance.
  double decay_limit() const { return decay_limit_; }
  const Vector& dipole_density() const { return mu_; }

 private:
  std::shared_ptr<const HoleOps> ops_;
  Vector g_, mu_, normal_derivative_;
  double equilibrium_coef_ = 0.0;
  double decay_limit_ = 0.0;
};

ExteriorDirichlet exterior_dirichlet(std::shared_ptr<const HoleOps> ops, const Vector& g);
ExteriorDirichlet exterior_dirichlet(const geom::Surface& hole_surface, const Vector& g);

/// Whole-space energy pairing of the exterior harmonic extensions of two
/// homogeneous polynomials plus their interior gradient pairing; the
/// leading capacity coefficient under vanishing data. Symmetrized.
double frak_C(const HoleOps& hole, const TaylorPoly& p_a, const TaylorPoly& p_b);
double frak_C(const geom::Surface& hole_surface, const TaylorPoly& p_a,
              const TaylorPoly& p_b);

}  // namespace capax::direct
