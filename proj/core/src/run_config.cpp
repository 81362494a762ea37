#include "capax/run_config.hpp"

#include "capax/kernels.hpp"

#include <set>

namespace capax::cli {

geom::Surface GeometrySpec::build() const {
  if (kind == "sphere") {
    if (params.size() != 1)
      throw ConfigError("sphere geometry needs params = [radius]");
    return geom::make_sphere(params[0], order);
  }
  if (kind == "ellipsoid") {
    if (params.size() != 3)
      throw ConfigError("ellipsoid geometry needs params = [a, b, c]");
    return geom::make_ellipsoid(params[0], params[1], params[2], order);
  }
  if (kind == "mesh") {
    if (mesh_path.empty()) throw ConfigError("mesh geometry needs a mesh path");
    return geom::load_mesh(mesh_path);
  }
  throw ConfigError("unknown geometry kind '" + kind + "'");
}

TaylorPoly taylor_from_rows(const std::vector<toml::Value>& rows, const std::string& key) {
  TaylorPoly p = TaylorPoly::constant(0.0);
  for (const auto& row : rows) {
    if (row.type != toml::Value::Type::Array || row.array.size() != 4)
      throw ConfigError("config key '" + key +
                        "': each row must be [e1, e2, e3, coefficient]");
    int e[3];
    for (int k = 0; k < 3; ++k) {
      if (row.array[k].type != toml::Value::Type::Number)
        throw ConfigError("config key '" + key + "': exponents must be numbers");
      const double v = row.array[k].number;
      e[k] = static_cast<int>(v);
      if (e[k] < 0 || static_cast<double>(e[k]) != v)
        throw ConfigError("config key '" + key +
                          "': exponents must be non-negative integers");
    }
    if (row.array[3].type != toml::Value::Type::Number)
      throw ConfigError("config key '" + key + "': coefficient must be a number");
    p.add_coeff(MultiIndex{{e[0], e[1], e[2]}}, row.array[3].number);
  }
  return p;
}

namespace {

GeometrySpec parse_geometry(const toml::Table& t, const std::string& name) {
  GeometrySpec g;
  g.kind = t.get_string_or("geometry." + name, "sphere");
  if (t.has("geometry." + name + "_params"))
    g.params = t.get_number_array("geometry." + name + "_params");
  g.mesh_path = t.get_string_or("geometry." + name + "_mesh", "");
  g.order = static_cast<int>(t.get_int_or("geometry." + name + "_order", 6));
  if (g.order < 1)
    throw ConfigError("geometry." + name + "_order must be a positive integer");
  return g;
}

}  // namespace

RunConfig parse_config(const toml::Table& t) {
  RunConfig cfg;
  cfg.config_hash = fnv1a(t.raw_text().data(), t.raw_text().size());
  cfg.mode = t.get_string("mode");
  static const std::set<std::string> modes{"newtonian", "direct",  "series",
                                           "compare",   "eigen",   "converge"};
  if (!modes.count(cfg.mode))
    throw ConfigError("mode '" + cfg.mode +
                      "' is not one of newtonian|direct|series|compare|eigen|converge");

  cfg.outer = parse_geometry(t, "Omega");
  cfg.hole = parse_geometry(t, "omega");

  if (t.has("functions.u_a")) cfg.u_a = taylor_from_rows(t.get_array("functions.u_a"), "functions.u_a");
  if (t.has("functions.u_b")) cfg.u_b = taylor_from_rows(t.get_array("functions.u_b"), "functions.u_b");

  if (t.has("epsilons.values")) {
    cfg.epsilons = t.get_number_array("epsilons.values");
  } else if (t.has("epsilons.start")) {
    const double start = t.get_number("epsilons.start");
    const double stop = t.get_number("epsilons.stop");
    const long count = t.get_int("epsilons.count");
    if (count < 2 || start <= 0 || stop <= start)
      throw ConfigError("epsilons range needs 0 < start < stop and count >= 2");
    for (long i = 0; i < count; ++i)
      cfg.epsilons.push_back(start * std::pow(stop / start, double(i) / (count - 1)));
  }
  for (double e : cfg.epsilons)
    if (!(e > 0)) throw ConfigError("epsilons must be positive");

  cfg.k_max = static_cast<int>(t.get_int_or("series.k_max", 8));
  if (cfg.k_max < 1) throw ConfigError("series.k_max must be >= 1");
  cfg.kernel_max_order = static_cast<int>(t.get_int_or("solver.kernel_max_order", 12));
  cfg.residual_tol = t.get_number_or("solver.residual_tol", 1e-8);
  cfg.out_dir = t.get_string_or("output.dir", "out");
  cfg.jobs = static_cast<int>(t.get_int_or("jobs", 1));

  if (cfg.k_max + 1 > cfg.kernel_max_order)
    throw ConfigError("series.k_max needs kernel derivatives of order k_max + 1; raise "
                      "solver.kernel_max_order");
  const int taylor_deg = std::max(cfg.u_a.max_degree(), cfg.u_b.max_degree());
  if (taylor_deg > cfg.kernel_max_order)
    throw ConfigError("Taylor degree exceeds solver.kernel_max_order");

  if (cfg.mode == "eigen") {
    cfg.eigenvalue = t.get_number("eigen.eigenvalue");
    for (const auto& fn : t.get_array("eigen.basis")) {
      if (fn.type != toml::Value::Type::Array)
        throw ConfigError("eigen.basis must be a list of coefficient tables");
      cfg.eigen_basis.push_back(taylor_from_rows(fn.array, "eigen.basis"));
    }
    if (cfg.eigen_basis.empty()) throw ConfigError("eigen.basis must not be empty");
    cfg.oracle_l = static_cast<int>(t.get_int_or("eigen.oracle_l", -1));
    cfg.oracle_n = static_cast<int>(t.get_int_or("eigen.oracle_n", 1));
  }

  if (cfg.mode == "converge") {
    cfg.converge_quantity = t.get_string_or("converge.quantity", "newtonian");
    if (cfg.converge_quantity != "newtonian" && cfg.converge_quantity != "area")
      throw ConfigError("converge.quantity must be 'newtonian' or 'area'");
    if (t.has("converge.orders"))
      for (double v : t.get_number_array("converge.orders"))
        cfg.converge_orders.push_back(static_cast<int>(v));
    if (cfg.converge_orders.size() < 2)
      throw ConfigError("converge needs at least 2 refinement levels");
  }

  const bool needs_eps = cfg.mode == "direct" || cfg.mode == "compare" ||
                         cfg.mode == "eigen";
  if (needs_eps && cfg.epsilons.empty())
    throw ConfigError("mode '" + cfg.mode + "' needs a non-empty epsilons list");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  return parse_config(toml::Table::parse_file(path));
}

RunConfig parse_config_text(const std::string& text) {
  return parse_config(toml::Table::parse_text(text));
}

}  // namespace capax::cli
