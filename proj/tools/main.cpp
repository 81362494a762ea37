// capax: boundary-integral capacities of domains with a small hole and the
// eigenvalue shifts they predict. Subcommands run one mode each; every mode
// reads the same TOML config and writes CSV/JSON artifacts.

#include <CLI11.hpp>

#include "capax/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"capax: generalized capacities with small holes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  int k_max = 0;
  int quad_order = 0;

  const char* modes[] = {"newtonian", "direct", "series", "compare", "eigen", "converge"};
  for (const char* mode : modes) {
    CLI::App* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "TOML config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--jobs", jobs, "parallel epsilon solves (default 1)");
    sub->add_option("--k-max", k_max, "series truncation order (overrides config)");
    sub->add_option("--quad-order", quad_order,
                    "quadrature order for both surfaces (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    capax::cli::RunConfig cfg = capax::cli::parse_config_file(config_path);
    cfg.mode = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    if (k_max > 0) cfg.k_max = k_max;
    if (quad_order > 0) {
      cfg.outer.order = quad_order;
      cfg.hole.order = quad_order;
    }
    return capax::cli::run_catching(cfg);
  } catch (const capax::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return capax::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return capax::cli::kExitNumerical;
  }
}
