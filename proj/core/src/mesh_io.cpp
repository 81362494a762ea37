#include "capax/geometry.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace capax::geom {

std::array<Vec3, 3> Surface::face_vertices(int face) const {
  if (!mesh_) throw GeometryError("face_vertices: not a mesh surface");
  const auto& f = mesh_->faces[face];
  return {Vec3(mesh_->vertices[f[0]] * scale_), Vec3(mesh_->vertices[f[1]] * scale_),
          Vec3(mesh_->vertices[f[2]] * scale_)};
}

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  return {};
}

double parse_num(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  if (tok.empty()) throw GeometryError(std::string("OFF parse failure: missing ") + what);
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw GeometryError(std::string("OFF parse failure: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

Surface load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("load_mesh: cannot open " + path);

  const std::string header = next_token(in);
  if (header != "OFF") throw GeometryError("OFF parse failure: missing OFF header");
  const int nv = static_cast<int>(parse_num(in, "vertex count"));
  const int nf = static_cast<int>(parse_num(in, "face count"));
  parse_num(in, "edge count");
  if (nv < 4 || nf < 4) throw GeometryError("OFF parse failure: too few vertices/faces");

  auto mesh = std::make_shared<TriMesh>();
  mesh->vertices.resize(nv);
  for (int i = 0; i < nv; ++i)
    for (int k = 0; k < 3; ++k) mesh->vertices[i][k] = parse_num(in, "vertex coordinate");

  mesh->faces.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const int arity = static_cast<int>(parse_num(in, "face arity"));
    if (arity != 3) throw GeometryError("OFF parse failure: triangles only");
    for (int k = 0; k < 3; ++k) {
      const int v = static_cast<int>(parse_num(in, "face index"));
      if (v < 0 || v >= nv) throw GeometryError("OFF parse failure: face index out of range");
      mesh->faces[i][k] = v;
    }
  }

  // Closedness and orientation: every undirected edge must occur in exactly
  // two faces, once per direction.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : mesh->faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      if (a == b) throw GeometryError("OFF parse failure: degenerate face");
      directed[{a, b}] += 1;
    }
  for (const auto& [edge, count] : directed) {
    if (count > 1) throw GeometryError("surface has inconsistent orientation");
    if (!directed.count({edge.second, edge.first}))
      throw GeometryError("surface not closed");
  }

  // Outward orientation via the signed volume.
  double vol6 = 0.0;
  for (const auto& f : mesh->faces)
    vol6 += mesh->vertices[f[0]].dot(mesh->vertices[f[1]].cross(mesh->vertices[f[2]]));
  if (std::abs(vol6) < 1e-14) throw GeometryError("surface encloses no volume");
  if (vol6 < 0)
    for (auto& f : mesh->faces) std::swap(f[1], f[2]);

  Surface s;
  s.kind_ = PatchKind::TriangleMesh;
  s.order_ = 1;
  s.mesh_ = mesh;
  s.face_of_node_.resize(nf);

  auto base = std::make_shared<Surface::Base>();
  base->nodes.resize(nf, 3);
  base->normals.resize(nf, 3);
  base->weights.resize(nf);
  for (int i = 0; i < nf; ++i) {
    const auto& f = mesh->faces[i];
    const Vec3 v0 = mesh->vertices[f[0]], v1 = mesh->vertices[f[1]],
               v2 = mesh->vertices[f[2]];
    base->nodes.row(i) = (v0 + v1 + v2) / 3.0;
    const Vec3 cr = (v1 - v0).cross(v2 - v0);
    const double area = 0.5 * cr.norm();
    if (area < 1e-16) throw GeometryError("OFF parse failure: zero-area face");
    base->normals.row(i) = cr.normalized();
    base->weights[i] = area;
    s.face_of_node_[i] = i;
  }
  double diam = 0.0;
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j)
      diam = std::max(diam, (mesh->vertices[i] - mesh->vertices[j]).norm());
  base->diameter = diam;

  s.base_ = base;
  s.scale_ = 1.0;
  s.materialize();
  return s;
}

}  // namespace capax::geom
