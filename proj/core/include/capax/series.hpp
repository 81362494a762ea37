#pragma once

#include "capax/direct_solver.hpp"
#include "capax/taylor_poly.hpp"

#include <map>
#include <string>
#include <vector>

namespace capax::series {

/// Coefficient tables of the charge/dipole density expansions in eps.
/// Storage is "divided": entry k holds the k-th Taylor coefficient, i.e.
/// the k-th derivative divided by k!; every recursion below is the
/// divided rewrite of its factorial-normalized original (the binomial
/// factors collapse into 1/(k-j)! and are absorbed by the stored tables).
struct CoefficientTables {
  int k_max = 0;
  // rho_o[k] on the outer boundary, rho_i[k] on the hole boundary.
  std::vector<Vector> rho_o, rho_i;
  // theta tables for the boundary data the tables were built with.
  std::vector<Vector> theta_o, theta_i;

  /// Hole-boundary monomial moments of rho_i: moment_rho[k][beta rank]
  /// = integral of rho_i[k](s) s^beta.
  std::vector<std::vector<double>> moment_rho;
  /// Vector moments of theta_i against nu s^beta.
  std::vector<std::vector<Vec3>> moment_theta;
};

/// Charge-density coefficient tables: rho_i[k] vanishes for
/// k in {1, .., d-2}; rho_i[0] is the equilibrium density.
CoefficientTables rho_coefficients(const direct::ProblemSetup& setup, int k_max);

/// Adds the dipole tables driven by the boundary data u_a (requires the
/// rho tables at the same or higher order).
void theta_coefficients(const direct::ProblemSetup& setup, int k_max,
                        const TaylorPoly& u_a, CoefficientTables& tables);

/// Auxiliary sequences of one argument order (u_a drives the densities,
/// u_b multiplies the Taylor slices).
struct AuxSequences {
  int k_max = 0;
  const direct::ProblemSetup* setup = nullptr;

  /// Polynomial parts of the exterior fields u_m and v_m (moment sums).
  std::vector<TaylorPoly> um_poly, vm_poly;
  std::vector<Vector> um_trace_nd;  // nu . grad u_m at hole nodes
  std::vector<Vector> vm_trace_nd;  // nu . grad v_m at hole nodes
  std::vector<Vector> vm_trace;     // v_m at hole nodes
  std::vector<double> g;            // g^a_k
  std::vector<double> r;            // r_k (normalizer coefficients)
  std::vector<Vector> u_tilde, v_tilde, g_tilde;
  // densities behind the layer-potential parts of u_m / v_m
  std::vector<Vector> theta_i, rho_i;

  /// Exterior field values at an off-surface point.
  double eval_um(int k, const Vec3& t) const;
  double eval_vm(int k, const Vec3& t) const;
};

AuxSequences aux_sequences(const CoefficientTables& tables,
                           const direct::ProblemSetup& setup, const TaylorPoly& u_a,
                           const TaylorPoly& u_b, int k_max);

/// Flux-density coefficients lambda_tilde via the reciprocal-series
/// composition of (sum g~ eps^k)(sum v~ eps^k) / (sum r eps^k) plus the
/// u~ terms; lambda0 = a0 / r0.
std::vector<Vector> lambda_tilde(const AuxSequences& aux, int k_max);

/// Interior gradient-pairing coefficients: xi_n = 0 for n < d, then sums
/// of slice-gradient integrals over the hole; exact for polynomial data.
std::vector<double> xi_coefficients(const TaylorPoly& u_a, const TaylorPoly& u_b,
                                    const geom::Surface& hole_surface, int k_max);

/// Capacity coefficient sequence c_n; both argument orders of the flux
/// formula are computed and averaged so the discrete coefficients inherit
/// the symmetry of the underlying bilinear form.
struct CapacitySeries {
  int k_max = 0;
  std::vector<double> c;        // c[n], n = 0..k_max
  std::vector<double> xi;       // xi[n]
  double r0 = 0.0;              // equilibrium potential mean
  double empirical_radius = 0.0;  // 1 / max |c_n|^(1/n); ratio-test heuristic
  std::uint64_t outer_hash = 0, hole_hash = 0;
};

CapacitySeries capacity_series(const direct::ProblemSetup& setup, const TaylorPoly& u_a,
                               const TaylorPoly& u_b, int k_max);
CapacitySeries capacity_series(const geom::Surface& outer, const geom::Surface& hole,
                               const TaylorPoly& u_a, const TaylorPoly& u_b, int k_max);

double eval_series(const CapacitySeries& series, double eps);

/// Leading term of the capacity under vanishing boundary data: exponent
/// k_a + k_b + d - 2 with the whole-space energy pairing of the principal
/// parts as coefficient (independent of the outer boundary).
struct LeadingTerm {
  int exponent = 0;
  double coefficient = 0.0;
};
LeadingTerm leading_coefficient_vanishing(const direct::HoleOps& hole,
                                          const TaylorPoly& u_a, const TaylorPoly& u_b);
LeadingTerm leading_coefficient_vanishing(const geom::Surface& hole_surface,
                                          const TaylorPoly& u_a, const TaylorPoly& u_b);

/// CSV rows "n,c_n"; JSON carries geometry hashes, k_max and tolerances.
void export_csv(const CapacitySeries& series, const std::string& path);
std::string to_json(const CapacitySeries& series);

}  // namespace capax::series
