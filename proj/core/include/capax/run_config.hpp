#pragma once

#include "capax/geometry.hpp"
#include "capax/taylor_poly.hpp"
#include "capax/toml_lite.hpp"

#include <string>
#include <vector>

namespace capax::cli {

struct GeometrySpec {
  std::string kind = "sphere";  // sphere | ellipsoid | mesh
  std::vector<double> params = {1.0};
  std::string mesh_path;
  int order = 6;

  geom::Surface build() const;
};

/// Parsed and validated run configuration (TOML).
struct RunConfig {
  std::string mode;  // newtonian | direct | series | compare | eigen | converge
  GeometrySpec outer, hole;
  TaylorPoly u_a = TaylorPoly::constant(1.0);
  TaylorPoly u_b = TaylorPoly::constant(1.0);
  std::vector<double> epsilons;
  int k_max = 8;
  int kernel_max_order = 12;
  double residual_tol = 1e-8;
  std::string out_dir = "out";
  int jobs = 1;

  // mode = eigen
  double eigenvalue = 0.0;
  std::vector<TaylorPoly> eigen_basis;
  int oracle_l = -1;
  int oracle_n = 1;

  // mode = converge
  std::string converge_quantity = "newtonian";
  std::vector<int> converge_orders;

  std::uint64_t config_hash = 0;
};

/// Taylor table from rows [e1, e2, e3, coefficient].
TaylorPoly taylor_from_rows(const std::vector<toml::Value>& rows, const std::string& key);

RunConfig parse_config(const toml::Table& table);
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace capax::cli
