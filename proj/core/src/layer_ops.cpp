#include "capax/layer_ops.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace capax::layer {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// nu(y) . (y - x) / (4 pi |y - x|^3), the solid-angle kernel of W.
double double_layer_kernel(const Vec3& x, const Vec3& y, const Vec3& nu_y) {
  const Vec3 d = y - x;
  const double r = d.norm();
  return nu_y.dot(d) / (kFourPi * r * r * r);
}

double single_layer_kernel(const Vec3& x, const Vec3& y) {
  return -1.0 / (kFourPi * (x - y).norm());
}

// Sum of Legendre polynomials P_0..P_L at c; the degree-L bandlimited
// stand-in for 1/|s - s'| = sqrt(2 - 2c)^-1 on the unit sphere.
double legendre_kernel_sum(double c, int L) {
  double pm1 = 1.0, p = c, sum = 1.0;
  if (L == 0) return sum;
  sum += p;
  for (int l = 1; l < L; ++l) {
    const double pn = ((2.0 * l + 1.0) * c * p - l * pm1) / (l + 1.0);
    pm1 = p;
    p = pn;
    sum += p;
  }
  return sum;
}

void check_no_coincident_nodes(const geom::Surface& s) {
  for (int i = 0; i < s.size(); ++i)
    for (int j = i + 1; j < s.size(); ++j)
      if ((s.node(i) - s.node(j)).norm() < 1e-14 * std::max(1.0, s.diameter()))
        throw GeometryError("assemble: surface has coincident nodes");
}

// integral of 1/|p| over the triangle (0, A, B) in the plane, measured in
// the metric q(p) = sqrt(E p1^2 + 2 F p1 p2 + G p2^2), with the true
// integrand evaluated along rays: used for the parametric single-layer
// self cell. f(r, theta) must stay smooth in r after the 1/r cancellation.
template <typename F>
double fan_triangle_quadrature(const Eigen::Vector2d& A, const Eigen::Vector2d& B,
                               int n_theta, int n_r, const F& f) {
  const double cross_ab = A.x() * B.y() - A.y() * B.x();
  if (std::abs(cross_ab) < 1e-30) return 0.0;
  double ta = std::atan2(A.y(), A.x());
  double tb = std::atan2(B.y(), B.x());
  if (cross_ab > 0 && tb < ta) tb += 2.0 * M_PI;
  if (cross_ab < 0 && tb > ta) tb -= 2.0 * M_PI;
  std::vector<double> tn, tw, rn, rw;
  gauss_legendre(n_theta, tn, tw);
  gauss_legendre(n_r, rn, rw);
  const Eigen::Vector2d e = B - A;
  double total = 0.0;
  for (int it = 0; it < n_theta; ++it) {
    const double theta = 0.5 * (ta + tb) + 0.5 * (tb - ta) * tn[it];
    const double jt = 0.5 * std::abs(tb - ta) * tw[it];
    const Eigen::Vector2d d(std::cos(theta), std::sin(theta));
    const double denom = d.x() * e.y() - d.y() * e.x();
    if (std::abs(denom) < 1e-30) continue;
    const double R = cross_ab / denom;
    if (!(R > 0)) continue;
    for (int ir = 0; ir < n_r; ++ir) {
      const double r = 0.5 * R * (rn[ir] + 1.0);
      const double jr = 0.5 * R * rw[ir];
      total += jt * jr * f(r * d.x(), r * d.y(), r);
    }
  }
  return total;
}

// Self-cell integral of S_3(x_i - X) dsigma over the parameter Voronoi
// cell of node i, in polar coordinates around the node (the r <-> 1/r
// cancellation makes the radial integrand smooth).
double parametric_self_term(const geom::Surface& s, int i) {
  const auto& g = s.grid();
  const int iu = i / g.n_phi;
  const int ip = i % g.n_phi;
  const double u0 = g.u_nodes[iu];
  const double phi0 = ip * g.phi_step;
  const double ulo = g.u_cell_edges[iu] - u0;
  const double uhi = g.u_cell_edges[iu + 1] - u0;
  const double plo = -0.5 * g.phi_step;
  const double phi = 0.5 * g.phi_step;  // half-width of the phi cell
  const Vec3 xi = s.node(i);

  const auto integrand = [&](double du, double dphi, double r) {
    const Vec3 y = s.chart_point(u0 + du, phi0 + dphi);
    const double dist = (xi - y).norm();
    const double jac = s.chart_jacobian(u0 + du, phi0 + dphi);
    if (dist < 1e-300) return 0.0;
    return -jac * r / (kFourPi * dist);
  };

  const Eigen::Vector2d c1(uhi, plo), c2(uhi, phi), c3(ulo, phi), c4(ulo, plo);
  double total = 0.0;
  total += fan_triangle_quadrature(c1, c2, 12, 8, integrand);
  total += fan_triangle_quadrature(c2, c3, 12, 8, integrand);
  total += fan_triangle_quadrature(c3, c4, 12, 8, integrand);
  total += fan_triangle_quadrature(c4, c1, 12, 8, integrand);
  return total;
}

// Analytic integral of 1/|p - y| over a flat triangle, p strictly inside,
// as a fan over the edges: sum of h * asinh(tan(.)) terms.
double flat_triangle_inv_distance(const Vec3& p, const Vec3& v0, const Vec3& v1,
                                  const Vec3& v2) {
  const Vec3 e1 = (v1 - v0).normalized();
  const Vec3 nrm = (v1 - v0).cross(v2 - v0).normalized();
  const Vec3 e2 = nrm.cross(e1);
  const auto to2d = [&](const Vec3& v) {
    return Eigen::Vector2d((v - p).dot(e1), (v - p).dot(e2));
  };
  const Eigen::Vector2d a = to2d(v0), b = to2d(v1), c = to2d(v2);
  const auto edge_term = [](const Eigen::Vector2d& A, const Eigen::Vector2d& B) {
    const double cross_ab = A.x() * B.y() - A.y() * B.x();
    const Eigen::Vector2d e = B - A;
    const double len = e.norm();
    if (len < 1e-30 || std::abs(cross_ab) < 1e-30) return 0.0;
    const double h = std::abs(cross_ab) / len;       // distance to the edge line
    const double t0 = A.dot(e) / len;                // signed foot offsets
    const double t1 = B.dot(e) / len;
    const double sgn = cross_ab > 0 ? 1.0 : -1.0;
    return sgn * h * (std::asinh(t1 / h) - std::asinh(t0 / h));
  };
  return edge_term(a, b) + edge_term(b, c) + edge_term(c, a);
}

Matrix assemble_single_layer(const geom::Surface& s) {
  const int n = s.size();
  Matrix V(n, n);
  if (s.kind() == geom::PatchKind::Sphere) {
    // Bandlimited Legendre form of the chordal kernel; spectrally accurate
    // on the Gauss-Legendre x trapezoid grid and exact on constants.
    const double R = s.axis_a();
    const int L = s.grid().n_u - 1;
    std::vector<Vec3> dirs(n);
    for (int i = 0; i < n; ++i) dirs[i] = s.unit_dir(i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double c = std::clamp(dirs[i].dot(dirs[j]), -1.0, 1.0);
        V(i, j) = -(s.weight(j) / (kFourPi * R)) * legendre_kernel_sum(c, L);
      }
    return V;
  }
  for (int i = 0; i < n; ++i) {
    const Vec3 xi = s.node(i);
    for (int j = 0; j < n; ++j)
      V(i, j) = j == i ? 0.0 : s.weight(j) * single_layer_kernel(xi, s.node(j));
  }
  if (s.is_parametric()) {
    for (int i = 0; i < n; ++i) V(i, i) = parametric_self_term(s, i);
  } else {
    for (int i = 0; i < n; ++i) {
      const auto tri = s.face_vertices(s.node_face(i));
      V(i, i) = -flat_triangle_inv_distance(s.node(i), tri[0], tri[1], tri[2]) / kFourPi;
    }
  }
  return V;
}

Matrix assemble_double_layer(const geom::Surface& s) {
  const int n = s.size();
  Matrix W(n, n);
  if (s.kind() == geom::PatchKind::Sphere) {
    const int L = s.grid().n_u - 1;
    const double R = s.axis_a();
    std::vector<Vec3> dirs(n);
    for (int i = 0; i < n; ++i) dirs[i] = s.unit_dir(i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double c = std::clamp(dirs[i].dot(dirs[j]), -1.0, 1.0);
        W(i, j) = s.weight(j) / (8.0 * M_PI * R * R) * legendre_kernel_sum(c, L);
      }
  } else {
    for (int i = 0; i < n; ++i) {
      const Vec3 xi = s.node(i);
      for (int j = 0; j < n; ++j)
        W(i, j) =
            j == i ? 0.0 : s.weight(j) * double_layer_kernel(xi, s.node(j), s.normal(j));
    }
  }
  // Row-sum completion: W applied to 1 equals 1/2 exactly.
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += W(i, j);
    W(i, i) = 0.5 - off;
  }
  return W;
}

}  // namespace

double Density::integral() const {
  return surface->weights().dot(values);
}

double Density::mean() const { return integral() / surface->area(); }

bool Density::mean_zero_ok(double tol) const {
  if (!mean_zero) return true;
  return std::abs(integral()) <= tol * surface->weights().dot(values.cwiseAbs()) + 1e-300;
}

BoundaryOperator assemble(OperatorKind kind, const geom::Surface& s) {
  check_no_coincident_nodes(s);
  BoundaryOperator op;
  op.kind = kind;
  op.surface = &s;
  switch (kind) {
    case OperatorKind::SingleLayerTrace:
      op.matrix = assemble_single_layer(s);
      break;
    case OperatorKind::DoubleLayerTrace:
      op.matrix = assemble_double_layer(s);
      break;
    case OperatorKind::AdjointDoubleLayer:
      op.matrix = weighted_adjoint(assemble_double_layer(s), s);
      break;
  }
  return op;
}

Matrix weighted_adjoint(const Matrix& W, const geom::Surface& s) {
  Matrix out = W.transpose();
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j) out(i, j) *= s.weight(j) / s.weight(i);
  return out;
}

namespace {

void near_field_guard(const geom::Surface& s, const std::vector<Vec3>& targets) {
  for (const auto& t : targets)
    for (int j = 0; j < s.size(); ++j)
      if ((t - s.node(j)).norm() < s.local_width(j))
        throw NearFieldError(
            "evaluation target within one local mesh width of the surface");
}

}  // namespace

Vector eval_single_layer(const geom::Surface& s, const Vector& density,
                         const std::vector<Vec3>& targets) {
  near_field_guard(s, targets);
  Vector out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    double sum = 0.0;
    for (int j = 0; j < s.size(); ++j)
      sum += s.weight(j) * density[j] * single_layer_kernel(targets[k], s.node(j));
    out[k] = sum;
  }
  return out;
}

Vector eval_double_layer(const geom::Surface& s, const Vector& density,
                         const std::vector<Vec3>& targets) {
  near_field_guard(s, targets);
  Vector out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    double sum = 0.0;
    for (int j = 0; j < s.size(); ++j)
      sum += s.weight(j) * density[j] * double_layer_kernel(targets[k], s.node(j), s.normal(j));
    out[k] = sum;
  }
  return out;
}

std::vector<Vec3> eval_grad_single_layer(const geom::Surface& s, const Vector& density,
                                         const std::vector<Vec3>& targets) {
  near_field_guard(s, targets);
  std::vector<Vec3> out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    Vec3 sum = Vec3::Zero();
    for (int j = 0; j < s.size(); ++j) {
      const Vec3 z = targets[k] - s.node(j);
      const double r = z.norm();
      sum += s.weight(j) * density[j] * z / (kFourPi * r * r * r);
    }
    out[k] = sum;
  }
  return out;
}

std::vector<Vec3> eval_grad_double_layer(const geom::Surface& s, const Vector& density,
                                         const std::vector<Vec3>& targets) {
  near_field_guard(s, targets);
  std::vector<Vec3> out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    Vec3 sum = Vec3::Zero();
    for (int j = 0; j < s.size(); ++j) {
      const Vec3 z = targets[k] - s.node(j);
      const double r = z.norm();
      const Vec3 nu = s.normal(j);
      const Vec3 hess_nu = nu / (kFourPi * r * r * r) - 3.0 * z * z.dot(nu) / (kFourPi * std::pow(r, 5));
      sum -= s.weight(j) * density[j] * hess_nu;
    }
    out[k] = sum;
  }
  return out;
}

Density normal_derivative_trace(Side side, const geom::Surface& s, const Density& phi) {
  const BoundaryOperator Wstar = assemble(OperatorKind::AdjointDoubleLayer, s);
  const double half = side == Side::Interior ? -0.5 : 0.5;
  Density out;
  out.surface = &s;
  out.values = half * phi.values + Wstar.matrix * phi.values;
  return out;
}

ExteriorDtN::ExteriorDtN(const geom::Surface& s, const BoundaryOperator& V,
                         const BoundaryOperator& Wstar)
    : surface_(&s), lu_(V.matrix) {
  if (V.kind != OperatorKind::SingleLayerTrace ||
      Wstar.kind != OperatorKind::AdjointDoubleLayer)
    throw NumericalError("ExteriorDtN: wrong operator kinds");
  half_plus_wstar_ = Wstar.matrix;
  half_plus_wstar_.diagonal().array() += 0.5;
  const double rc = lu_.rcond();
  if (rc < 1e-14)
    throw NumericalError("ExteriorDtN: single-layer matrix numerically singular, rcond=" +
                         std::to_string(rc));
}

Vector ExteriorDtN::apply(const Vector& g) const { return half_plus_wstar_ * lu_.solve(g); }

void dump_operator(const BoundaryOperator& op, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("dump_operator: cannot open " + path);
  const char magic[8] = {'C', 'A', 'P', 'A', 'X', 'B', 'O', '1'};
  const std::uint32_t n = static_cast<std::uint32_t>(op.matrix.rows());
  const std::uint32_t kind = static_cast<std::uint32_t>(op.kind);
  std::fwrite(magic, 1, 8, f);
  std::fwrite(&n, 4, 1, f);
  std::fwrite(&kind, 4, 1, f);
  // Row-major on disk.
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      const double v = op.matrix(i, j);
      std::fwrite(&v, 8, 1, f);
    }
  std::fclose(f);
}

BoundaryOperator load_operator(const std::string& path, const geom::Surface& s) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error("load_operator: cannot open " + path);
  char magic[8];
  std::uint32_t n = 0, kind = 0;
  if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, "CAPAXBO1", 8) != 0) {
    std::fclose(f);
    throw Error("load_operator: bad magic");
  }
  if (std::fread(&n, 4, 1, f) != 1 || std::fread(&kind, 4, 1, f) != 1) {
    std::fclose(f);
    throw Error("load_operator: truncated header");
  }
  BoundaryOperator op;
  op.kind = static_cast<OperatorKind>(kind);
  op.surface = &s;
  op.matrix.resize(n, n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      double v;
      if (std::fread(&v, 8, 1, f) != 1) {
        std::fclose(f);
        throw Error("load_operator: truncated payload");
      }
      op.matrix(i, j) = v;
    }
  std::fclose(f);
  return op;
}

}  // namespace capax::layer
