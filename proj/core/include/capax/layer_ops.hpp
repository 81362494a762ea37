#pragma once

#include "capax/common.hpp"
#include "capax/geometry.hpp"

#include <string>

namespace capax::layer {

/// Real-valued function on a Surface sampled at its quadrature nodes.
struct Density {
  const geom::Surface* surface = nullptr;
  Vector values;
  bool mean_zero = false;

  double integral() const;
  double mean() const;
  /// |integral| <= tol * integral of |values| when the mean-zero flag is set.
  bool mean_zero_ok(double tol = 1e-10) const;
};

enum class OperatorKind : std::uint32_t {
  SingleLayerTrace = 0,    // V: phi -> trace of the single layer
  DoubleLayerTrace = 1,    // W
  AdjointDoubleLayer = 2,  // W*, weighted adjoint of W
};

/// Dense Nystrom discretization of a boundary operator. W rows sum to 1/2
/// exactly (diagonal completion); W* is the adjoint of W in the weighted
/// inner product sum w_i f_i g_i, so the duality and the jump relations
/// hold at matrix level.
struct BoundaryOperator {
  Matrix matrix;
  OperatorKind kind;
  const geom::Surface* surface = nullptr;

  Vector apply(const Vector& v) const { return matrix * v; }
};

BoundaryOperator assemble(OperatorKind kind, const geom::Surface& s);

/// W* = D^-1 W^T D with D = diag(weights); exact discrete duality.
Matrix weighted_adjoint(const Matrix& W, const geom::Surface& s);

/// Off-surface potential evaluation; every target must keep at least one
/// local mesh width away from the surface, else NearFieldError.
Vector eval_single_layer(const geom::Surface& s, const Vector& density,
                         const std::vector<Vec3>& targets);
Vector eval_double_layer(const geom::Surface& s, const Vector& density,
                         const std::vector<Vec3>& targets);
std::vector<Vec3> eval_grad_single_layer(const geom::Surface& s, const Vector& density,
                                         const std::vector<Vec3>& targets);
std::vector<Vec3> eval_grad_double_layer(const geom::Surface& s, const Vector& density,
                                         const std::vector<Vec3>& targets);

enum class Side { Interior, Exterior };

/// Trace of the normal derivative of the single layer: (-1/2 I + W*) from
/// the interior, (+1/2 I + W*) from the exterior.
Density normal_derivative_trace(Side side, const geom::Surface& s, const Density& phi);

/// Exterior Dirichlet-to-Neumann map realized through the single-layer
/// ansatz: solve V phi = g, return (1/2 I + W*) phi. Used wherever the
/// normal derivative of a double-layer field is needed on the surface.
class ExteriorDtN {
 public:
  ExteriorDtN(const geom::Surface& s, const BoundaryOperator& V,
              const BoundaryOperator& Wstar);
  Vector apply(const Vector& dirichlet_data) const;
  const geom::Surface& surface() const { return *surface_; }

 private:
  const geom::Surface* surface_;
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix half_plus_wstar_;
};

/// Binary regression dump: 16-byte header (8-byte magic "CAPAXBO1",
/// uint32 N, uint32 kind), then row-major little-endian float64.
void dump_operator(const BoundaryOperator& op, const std::string& path);
BoundaryOperator load_operator(const std::string& path, const geom::Surface& s);

}  // namespace capax::layer
