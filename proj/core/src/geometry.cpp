#include "capax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace capax::geom {

struct Surface::Base {
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes, normals;
  Vector weights;
  double diameter = 0.0;
};

void Surface::materialize() {
  nodes_ = base_->nodes * scale_;
  normals_ = base_->normals;
  weights_ = base_->weights * (scale_ * scale_);
  diameter_ = base_->diameter * scale_;
  std::uint64_t h = fnv1a(nodes_.data(), sizeof(double) * nodes_.size());
  h = fnv1a(weights_.data(), sizeof(double) * weights_.size(), h);
  hash_ = fnv1a(&scale_, sizeof(scale_), h);
}

double Surface::max_radius() const { return nodes_.rowwise().norm().maxCoeff(); }
double Surface::min_radius() const { return nodes_.rowwise().norm().minCoeff(); }

Vec3 Surface::unit_dir(int i) const {
  if (!is_parametric())
    throw GeometryError("unit_dir: only defined for parametric surfaces");
  const int iu = i / grid_.n_phi;
  const int ip = i % grid_.n_phi;
  const double u = grid_.u_nodes[iu];
  const double phi = ip * grid_.phi_step;
  const double s = std::sqrt(1.0 - u * u);
  return Vec3(s * std::cos(phi), s * std::sin(phi), u);
}

Vec3 Surface::chart_point(double u, double phi) const {
  if (!is_parametric())
    throw GeometryError("chart_point: only defined for parametric surfaces");
  u = std::clamp(u, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  return Vec3(a_ * s * std::cos(phi), b_ * s * std::sin(phi), c_ * u);
}

double Surface::chart_jacobian(double u, double phi) const {
  u = std::clamp(u, -1.0, 1.0);
  const double s2 = std::max(0.0, 1.0 - u * u);
  const double cp = std::cos(phi), sp = std::sin(phi);
  return std::sqrt(b_ * b_ * c_ * c_ * s2 * cp * cp + a_ * a_ * c_ * c_ * s2 * sp * sp +
                   a_ * a_ * b_ * b_ * u * u);
}

void Surface::export_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("export_csv: cannot open " + path);
  std::fprintf(f, "x,y,z,weight,nx,ny,nz\n");
  for (int i = 0; i < size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", nodes_(i, 0),
                 nodes_(i, 1), nodes_(i, 2), weights_[i], normals_(i, 0), normals_(i, 1),
                 normals_(i, 2));
  std::fclose(f);
}

Surface make_ellipsoid(double a, double b, double c, int order) {
  if (a <= 0 || b <= 0 || c <= 0)
    throw GeometryError("make_ellipsoid: axes must be positive");
  if (a < 1e-8 || b < 1e-8 || c < 1e-8)
    throw GeometryError("degenerate axis rejected below threshold 1e-8");
  if (order < 1) throw GeometryError("quadrature order must be >= 1");

  Surface s;
  s.kind_ = (a == b && b == c) ? PatchKind::Sphere : PatchKind::Ellipsoid;
  s.a_ = a;
  s.b_ = b;
  s.c_ = c;
  s.order_ = order;

  ParamGrid g;
  g.n_u = 4 * order;
  g.n_phi = 2 * g.n_u;
  gauss_legendre(g.n_u, g.u_nodes, g.u_weights);
  g.phi_step = 2.0 * M_PI / g.n_phi;
  g.u_cell_edges.resize(g.n_u + 1);
  g.u_cell_edges[0] = -1.0;
  g.u_cell_edges[g.n_u] = 1.0;
  for (int i = 1; i < g.n_u; ++i)
    g.u_cell_edges[i] = 0.5 * (g.u_nodes[i - 1] + g.u_nodes[i]);
  s.grid_ = g;

  const int n = g.n_u * g.n_phi;
  auto base = std::make_shared<Surface::Base>();
  base->nodes.resize(n, 3);
  base->normals.resize(n, 3);
  base->weights.resize(n);
  for (int iu = 0; iu < g.n_u; ++iu) {
    const double u = g.u_nodes[iu];
    const double su = std::sqrt(1.0 - u * u);
    for (int ip = 0; ip < g.n_phi; ++ip) {
      const double phi = ip * g.phi_step;
      const double cp = std::cos(phi), sp = std::sin(phi);
      const int i = iu * g.n_phi + ip;
      base->nodes.row(i) = Vec3(a * su * cp, b * su * sp, c * u);
      Vec3 nrm(b * c * su * cp, a * c * su * sp, a * b * u);
      base->normals.row(i) = nrm.normalized();
      base->weights[i] = s.chart_jacobian(u, phi) * g.u_weights[iu] * g.phi_step;
    }
  }
  base->diameter = 2.0 * std::max({a, b, c});
  s.base_ = base;
  s.scale_ = 1.0;
  s.materialize();
  return s;
}

Surface make_sphere(double radius, int order) {
  if (radius <= 0) throw GeometryError("make_sphere: radius must be positive");
  return make_ellipsoid(radius, radius, radius, order);
}

Surface scale(const Surface& s, double eps) {
  if (eps <= 0) throw GeometryError("scale: factor must be positive");
  Surface out = s;
  out.a_ = s.a_ * eps;
  out.b_ = s.b_ * eps;
  out.c_ = s.c_ * eps;
  out.scale_ = s.scale_ * eps;
  out.materialize();
  return out;
}

double gauss_solid_angle(const Surface& s, const Vec3& x) {
  const double s3 = 4.0 * M_PI;
  double sum = 0.0;
  for (int j = 0; j < s.size(); ++j) {
    const Vec3 d = s.node(j) - x;
    const double r = d.norm();
    if (r < 1e-14) throw NearFieldError("gauss_solid_angle: x coincides with a node");
    sum += s.weight(j) * s.normal(j).dot(d) / (s3 * r * r * r);
  }
  return sum;
}

double signed_volume(const Surface& s) {
  double v = 0.0;
  for (int i = 0; i < s.size(); ++i) v += s.weight(i) * s.node(i).dot(s.normal(i));
  return v / 3.0;
}

VolumeRule volume_rule(const Surface& s, int poly_degree) {
  VolumeRule rule;
  if (s.is_parametric()) {
    const int deg = std::max(poly_degree, 1);
    const int n_r = deg / 2 + 2;
    const int n_u = deg / 2 + 2;
    const int n_phi = 2 * (deg + 2);
    std::vector<double> ru, rw, uu, uw;
    gauss_legendre(n_r, ru, rw);
    gauss_legendre(n_u, uu, uw);
    const double dphi = 2.0 * M_PI / n_phi;
    const double abc = s.axis_a() * s.axis_b() * s.axis_c();
    const int n = n_r * n_u * n_phi;
    rule.points.resize(n, 3);
    rule.weights.resize(n);
    int k = 0;
    for (int i = 0; i < n_r; ++i) {
      const double r = 0.5 * (ru[i] + 1.0);
      const double wr = 0.5 * rw[i];
      for (int j = 0; j < n_u; ++j) {
        const double u = uu[j];
        const double su = std::sqrt(1.0 - u * u);
        for (int p = 0; p < n_phi; ++p) {
          const double phi = p * dphi;
          rule.points.row(k) = Vec3(s.axis_a() * r * su * std::cos(phi),
                                    s.axis_b() * r * su * std::sin(phi),
                                    s.axis_c() * r * u);
          rule.weights[k] = abc * r * r * wr * uw[j] * dphi;
          ++k;
        }
      }
    }
    return rule;
  }

  // Mesh: tetrahedra fanned from the origin with a Duffy-mapped tensor
  // Gauss rule; signed tet volumes keep the fan valid when the origin is
  // not a star center.
  const auto verts = [&](int face, int corner) {
    return Vec3(s.mesh()->vertices[s.mesh()->faces[face][corner]] * s.mesh_scale());
  };
  const int q = poly_degree / 2 + 2;
  std::vector<double> gn, gw;
  gauss_legendre(q, gn, gw);
  std::vector<double> t(q), tw(q);
  for (int i = 0; i < q; ++i) {
    t[i] = 0.5 * (gn[i] + 1.0);
    tw[i] = 0.5 * gw[i];
  }
  const std::size_t per_tet = static_cast<std::size_t>(q) * q * q;
  const std::size_t nf = s.mesh()->faces.size();
  rule.points.resize(static_cast<Eigen::Index>(nf * per_tet), 3);
  rule.weights.resize(rule.points.rows());
  Eigen::Index k = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Vec3 v0 = verts(f, 0), v1 = verts(f, 1), v2 = verts(f, 2);
    const double vol6 = v0.dot(v1.cross(v2));
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int l = 0; l < q; ++l) {
          const double x = t[i];
          const double y = t[j] * x;
          const double z = t[l] * y;
          rule.points.row(k) = v0 * (x - y) + v1 * (y - z) + v2 * z;
          rule.weights[k] = vol6 * x * y * tw[i] * tw[j] * tw[l];
          ++k;
        }
  }
  return rule;
}

double hole_max_epsilon(const Surface& outer, const Surface& hole) {
  return outer.min_radius() / hole.diameter();
}

Hole::Hole(const Surface& outer, Surface hole_base, double eps)
    : base_surface(std::move(hole_base)), epsilon(eps) {
  if (eps <= 0) throw GeometryError("Hole: epsilon must be positive");
  const double cap = hole_max_epsilon(outer, base_surface);
  if (eps >= cap)
    throw GeometryError("Hole: eps * diam(omega) must stay below dist(0, boundary)");
}

}  // namespace capax::geom
