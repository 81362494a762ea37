#include "capax/cli.hpp"

#include "capax/direct_solver.hpp"
#include "capax/kernels.hpp"
#include "capax/series.hpp"
#include "capax/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace capax::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::FILE* open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/" + name;
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open output file " + path);
  return f;
}

void write_text(const RunConfig& cfg, const std::string& name, const std::string& text) {
  std::FILE* f = open_out(cfg, name);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

std::string hash_line(const RunConfig& cfg) {
  return "# config_hash=" + hash_hex(cfg.config_hash) + "\n";
}

// Analytic condenser value for concentric spheres with unit boundary data,
// 4 pi / (1/(eps r_hole) - 1/R_outer); empty when not applicable.
bool condenser_case(const RunConfig& cfg) {
  const bool spheres = cfg.outer.kind == "sphere" && cfg.hole.kind == "sphere";
  const bool unit_data = cfg.u_a.max_degree() == 0 && cfg.u_b.max_degree() == 0 &&
                         cfg.u_a.coeff({}) == 1.0 && cfg.u_b.coeff({}) == 1.0;
  return spheres && unit_data;
}

double condenser_analytic(const RunConfig& cfg, double eps) {
  const double r_hole = cfg.hole.params.at(0);
  const double r_outer = cfg.outer.params.at(0);
  return 4.0 * M_PI / (1.0 / (eps * r_hole) - 1.0 / r_outer);
}

void run_newtonian(const RunConfig& cfg) {
  const geom::Surface hole = cfg.hole.build();
  const double cap = direct::newtonian_capacity(hole);
  nlohmann::json j;
  j["capacity"] = cap;
  j["hole_surface_hash"] = hash_hex(hole.content_hash());
  j["config_hash"] = hash_hex(cfg.config_hash);
  write_text(cfg, "newtonian.json", j.dump(2) + "\n");
  std::cout << "newtonian capacity = " << num(cap) << "\n";
}

void run_direct(const RunConfig& cfg) {
  direct::ProblemSetup setup(cfg.outer.build(), cfg.hole.build());
  for (double eps : cfg.epsilons) setup.check_epsilon(eps);
  std::vector<double> caps(cfg.epsilons.size());
  parallel_for(cfg.epsilons.size(), cfg.jobs, [&](std::size_t i) {
    caps[i] = direct::capacity_direct(setup, cfg.epsilons[i], cfg.u_a, cfg.u_b);
  });
  std::string csv = hash_line(cfg) + "epsilon,capacity\n";
  for (std::size_t i = 0; i < caps.size(); ++i)
    csv += num(cfg.epsilons[i]) + "," + num(caps[i]) + "\n";
  write_text(cfg, "direct.csv", csv);
  std::cout << "direct capacities written for " << caps.size() << " epsilon values\n";
}

void run_series(const RunConfig& cfg) {
  direct::ProblemSetup setup(cfg.outer.build(), cfg.hole.build());
  const series::CapacitySeries s = series::capacity_series(setup, cfg.u_a, cfg.u_b, cfg.k_max);
  std::string csv = hash_line(cfg) + "n,c_n\n";
  for (int n = 0; n <= s.k_max; ++n) csv += std::to_string(n) + "," + num(s.c[n]) + "\n";
  write_text(cfg, "series.csv", csv);
  nlohmann::json j = nlohmann::json::parse(series::to_json(s));
  j["config_hash"] = hash_hex(cfg.config_hash);
  j["residual_tol"] = cfg.residual_tol;
  write_text(cfg, "series.json", j.dump(2) + "\n");
  std::cout << "series coefficients written up to order " << s.k_max
            << " (empirical radius " << num(s.empirical_radius) << ")\n";
}

void run_compare(const RunConfig& cfg) {
  direct::ProblemSetup setup(cfg.outer.build(), cfg.hole.build());
  for (double eps : cfg.epsilons) setup.check_epsilon(eps);
  const series::CapacitySeries s = series::capacity_series(setup, cfg.u_a, cfg.u_b, cfg.k_max);
  std::vector<double> dir(cfg.epsilons.size());
  parallel_for(cfg.epsilons.size(), cfg.jobs, [&](std::size_t i) {
    dir[i] = direct::capacity_direct(setup, cfg.epsilons[i], cfg.u_a, cfg.u_b);
  });
  const bool analytic = condenser_case(cfg);
  std::string csv = hash_line(cfg) +
                    "epsilon,direct,series,analytic,rel_err_direct,rel_err_series,"
                    "rel_diff_series_direct\n";
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double eps = cfg.epsilons[i];
    const double ser = series::eval_series(s, eps);
    csv += num(eps) + "," + num(dir[i]) + "," + num(ser) + ",";
    if (analytic) {
      const double an = condenser_analytic(cfg, eps);
      csv += num(an) + "," + num(std::abs(dir[i] - an) / std::abs(an)) + "," +
             num(std::abs(ser - an) / std::abs(an)) + ",";
    } else {
      csv += ",,,";
    }
    const double scale = std::max(std::abs(dir[i]), 1e-300);
    csv += num(std::abs(ser - dir[i]) / scale) + "\n";
  }
  write_text(cfg, "compare.csv", csv);
  std::cout << "compare table written for " << cfg.epsilons.size() << " epsilon values\n";
}

void run_eigen(const RunConfig& cfg) {
  const geom::Surface hole_surface = cfg.hole.build();
  const direct::HoleOps hole(hole_surface);
  spectral::EigenSpace space;
  space.eigenvalue = cfg.eigenvalue;
  for (std::size_t i = 0; i < cfg.eigen_basis.size(); ++i)
    space.basis.push_back({cfg.eigen_basis[i], "u" + std::to_string(i + 1)});
  const spectral::EigenPrediction pred =
      spectral::predict_multiple(space, hole, cfg.epsilons);

  std::optional<spectral::OracleComparison> oracle;
  if (cfg.oracle_l >= 0) {
    spectral::OracleComparison oc;
    oc.epsilons = cfg.epsilons;
    for (double eps : cfg.epsilons) {
      oc.oracle_values.push_back(
          spectral::shell_eigenvalue_oracle(eps, cfg.oracle_l, cfg.oracle_n));
      oc.predicted_values.push_back(
          pred.eigenvalue +
          pred.branches.front().mu * std::pow(eps, pred.branches.front().exponent));
    }
    oracle = oc;
  }
  nlohmann::json j = nlohmann::json::parse(spectral::prediction_to_json(pred, oracle));
  j["config_hash"] = hash_hex(cfg.config_hash);
  write_text(cfg, "eigen.json", j.dump(2) + "\n");
  std::cout << "eigen prediction written (" << pred.branches.size() << " branches)\n";
}

}  // namespace

std::vector<ConvergenceRow> converge(const RunConfig& cfg) {
  if (cfg.converge_orders.size() < 2)
    throw ConfigError("converge needs at least 2 refinement levels");
  std::vector<ConvergenceRow> rows;
  for (std::size_t l = 0; l < cfg.converge_orders.size(); ++l) {
    GeometrySpec spec = cfg.hole;
    spec.order = cfg.converge_orders[l];
    const geom::Surface s = spec.build();
    ConvergenceRow row;
    row.level = static_cast<int>(l);
    row.n_nodes = s.size();
    row.value = cfg.converge_quantity == "area" ? s.area() : direct::newtonian_capacity(s);
    rows.push_back(row);
  }
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (l >= 2) {
      const double d1 = rows[l - 1].value - rows[l - 2].value;
      const double d2 = rows[l].value - rows[l - 1].value;
      const double h1 = 1.0 / cfg.converge_orders[l - 1];
      const double h0 = 1.0 / cfg.converge_orders[l - 2];
      const double h2 = 1.0 / cfg.converge_orders[l];
      if (d1 != 0.0 && d2 != 0.0 && std::abs(d2) < std::abs(d1))
        rows[l].observed_order =
            std::log(std::abs(d1 / d2)) / std::log((h0 / h1 + h1 / h2) / 2.0);
    }
    if (l >= 1) {
      // Richardson with the locally observed order (fallback 2).
      const double p = rows[l].observed_order > 0 ? rows[l].observed_order : 2.0;
      const double ratio = std::pow(double(cfg.converge_orders[l]) /
                                        cfg.converge_orders[l - 1],
                                    p);
      rows[l].richardson =
          rows[l].value + (rows[l].value - rows[l - 1].value) / (ratio - 1.0);
    } else {
      rows[l].richardson = rows[l].value;
    }
  }
  return rows;
}

void run(const RunConfig& cfg) {
  kernels::set_max_order(cfg.kernel_max_order);
  if (cfg.mode == "newtonian") {
    run_newtonian(cfg);
  } else if (cfg.mode == "direct") {
    run_direct(cfg);
  } else if (cfg.mode == "series") {
    run_series(cfg);
  } else if (cfg.mode == "compare") {
    run_compare(cfg);
  } else if (cfg.mode == "eigen") {
    run_eigen(cfg);
  } else if (cfg.mode == "converge") {
    const auto rows = converge(cfg);
    std::string csv = hash_line(cfg) + "level,n_nodes,value,richardson,observed_order\n";
    for (const auto& r : rows)
      csv += std::to_string(r.level) + "," + std::to_string(r.n_nodes) + "," +
             num(r.value) + "," + num(r.richardson) + "," + num(r.observed_order) + "\n";
    write_text(cfg, "converge.csv", csv);
    std::cout << "convergence table written (" << rows.size() << " levels)\n";
  } else {
    throw ConfigError("unknown mode '" + cfg.mode + "'");
  }
}

int run_catching(const RunConfig& cfg) {
  try {
    run(cfg);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace capax::cli
