#pragma once

#include "capax/common.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace capax::geom {

enum class PatchKind { Sphere, Ellipsoid, TriangleMesh };

/// Tensor quadrature grid of a parametric patch: Gauss-Legendre in
/// u = cos(theta), uniform (trapezoidal) in phi. Node (iu, iphi) has flat
/// index iu * n_phi + iphi.
struct ParamGrid {
  int n_u = 0;
  int n_phi = 0;
  std::vector<double> u_nodes;
  std::vector<double> u_weights;
  double phi_step = 0.0;
  /// Voronoi edges of the u cells, size n_u + 1, from -1 to 1.
  std::vector<double> u_cell_edges;
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Closed surface in R^3 discretized into quadrature nodes with weights
/// (surface measure) and outward unit normals. Immutable after
/// construction; cheap to copy (mesh/base data shared).
class Surface {
 public:
  PatchKind kind() const { return kind_; }
  int size() const { return static_cast<int>(nodes_.rows()); }
  const Eigen::Matrix<double, Eigen::Dynamic, 3>& nodes() const { return nodes_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 3>& normals() const { return normals_; }
  const Vector& weights() const { return weights_; }
  Vec3 node(int i) const { return nodes_.row(i); }
  Vec3 normal(int i) const { return normals_.row(i); }
  double weight(int i) const { return weights_[i]; }

  double area() const { return weights_.sum(); }
  double diameter() const { return diameter_; }
  /// Max |x| over nodes (hole-containment checks).
  double max_radius() const;
  /// Min |x| over nodes (distance of the origin to the boundary, for
  /// star-shaped domains).
  double min_radius() const;

  /// Semi-axes of a parametric surface (sphere: a = b = c = radius).
  double axis_a() const { return a_; }
  double axis_b() const { return b_; }
  double axis_c() const { return c_; }
  int order() const { return order_; }
  const ParamGrid& grid() const { return grid_; }
  const std::shared_ptr<const TriMesh>& mesh() const { return mesh_; }
  /// Triangle id of a mesh node.
  int node_face(int i) const { return face_of_node_.empty() ? -1 : face_of_node_[i]; }
  /// Cumulative scale applied to the stored base mesh vertices.
  double mesh_scale() const { return scale_; }
  /// Scaled corner vertices of a mesh triangle.
  std::array<Vec3, 3> face_vertices(int face) const;

  bool is_parametric() const { return kind_ != PatchKind::TriangleMesh; }
  /// Unit-sphere parameter direction of node i (parametric surfaces).
  Vec3 unit_dir(int i) const;

  /// Local mesh width at node i, used by the near-field evaluation rule.
  double local_width(int i) const { return std::sqrt(weights_[i]); }

  /// Point and area element of the parametric chart at (u, phi).
  Vec3 chart_point(double u, double phi) const;
  double chart_jacobian(double u, double phi) const;

  std::uint64_t content_hash() const { return hash_; }

  /// Writes one "x,y,z,weight,nx,ny,nz" row per node.
  void export_csv(const std::string& path) const;

  friend Surface make_sphere(double radius, int order);
  friend Surface make_ellipsoid(double a, double b, double c, int order);
  friend Surface load_mesh(const std::string& path);
  friend Surface scale(const Surface& s, double eps);

 private:
  struct Base;  // immutable unscaled arrays, shared across scaled copies
  void materialize();

  PatchKind kind_ = PatchKind::Sphere;
  double a_ = 1, b_ = 1, c_ = 1;
  int order_ = 0;
  std::shared_ptr<const Base> base_;
  double scale_ = 1.0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes_, normals_;
  Vector weights_;
  ParamGrid grid_;
  std::shared_ptr<const TriMesh> mesh_;
  std::vector<int> face_of_node_;
  double diameter_ = 0.0;
  std::uint64_t hash_ = 0;
};

/// Sphere of the given radius; order k uses a 4k x 8k Gauss-Legendre x
/// trapezoid grid (N = 32 k^2 nodes).
Surface make_sphere(double radius, int order);

/// Ellipsoid with semi-axes (a, b, c); equal axes degrade to the sphere
/// path (identical node set to make_sphere). Axes below 1e-8 are rejected.
Surface make_ellipsoid(double a, double b, double c, int order);

/// Reads an ASCII OFF triangle mesh: closed, orientable; normals are
/// flipped outward when the signed volume comes out negative. One
/// centroid quadrature node per triangle.
Surface load_mesh(const std::string& path);

/// Nodes scaled by eps, weights by eps^2, normals unchanged.
Surface scale(const Surface& s, double eps);

/// Discrete solid-angle fraction sum_y w_y nu(y).(y - x) / (s_3 |y - x|^3):
/// ~1 strictly inside, ~0 strictly outside (on-surface values go through
/// the completed boundary operators instead).
double gauss_solid_angle(const Surface& s, const Vec3& x);

/// Signed volume enclosed by the surface via the divergence theorem,
/// (1/3) sum w x.nu.
double signed_volume(const Surface& s);

/// Volume quadrature over the enclosed solid, exact for polynomials up to
/// the given total degree on parametric bodies; triangle meshes use
/// tetrahedra fanned from the origin with Duffy-mapped tensor rules.
struct VolumeRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  Vector weights;
};
VolumeRule volume_rule(const Surface& s, int poly_degree);

/// Largest epsilon such that eps * closure(omega) stays inside Omega
/// (conservative: eps * diam(omega) < dist(0, boundary of Omega)).
double hole_max_epsilon(const Surface& outer, const Surface& hole);

/// Scaled hole with its runtime containment check.
struct Hole {
  Surface base_surface;
  double epsilon;
  Hole(const Surface& outer, Surface hole_base, double eps);
};

}  // namespace capax::geom
