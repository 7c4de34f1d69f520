// annpair: construct, verify, bm-audit, export.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "annpair/cli_harness.hpp"

int main(int argc, char** argv) {
  using namespace annpair;
  CLI::App app{"Annihilating-pair counterexample construction and audits"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string n_range = "2..4";
  std::string integrator = "automatic";
  std::string placement = "density";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n-range", n_range, "levels as a..b")->capture_default_str();
    sub->add_option("--target-c", cfg.target_c, "target ratio constant C (ratio <= C/n)")->capture_default_str();
    sub->add_option("--n-cap", cfg.n_cap, "largest admissible scale N")->capture_default_str();
    sub->add_option("--grid-refinement", cfg.grid_refinement, "direct quadrature panel refinement")
        ->capture_default_str();
    sub->add_option("--integrator", integrator, "automatic, direct or modulation")->capture_default_str();
    sub->add_option("--placement", placement, "density or double-scale")->capture_default_str();
    sub->add_option("--sigma", cfg.sigma, "gap fraction sigma")->capture_default_str();
    sub->add_option("--j-max", cfg.j_max, "largest dyadic block index audited")->capture_default_str();
    sub->add_option("--alpha-samples", cfg.alpha_samples, "number of sampled alphas")->capture_default_str();
    sub->add_option("--lambda-count", cfg.lambda_count, "alphas merged into Lambda")->capture_default_str();
    sub->add_option("--lambda-window", cfg.lambda_window, "Lambda is emitted on [0, w)")->capture_default_str();
    sub->add_option("-o,--output", cfg.output_path, "output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for alpha sampling")->capture_default_str();
    sub->add_option("--q-file", cfg.q_file, "set JSON to audit (bm-audit)");
  };
  for (const char* name : {"construct", "verify", "bm-audit", "export"}) {
    add_common(app.add_subcommand(name, std::string(name) + " command"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::config_error;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  static const std::map<std::string, Integrator> integrators{
      {"automatic", Integrator::automatic}, {"direct", Integrator::direct}, {"modulation", Integrator::modulation}};
  static const std::map<std::string, Placement> placements{{"density", Placement::density_rule},
                                                           {"double-scale", Placement::double_scale}};
  try {
    std::tie(cfg.n_lo, cfg.n_hi) = parse_n_range(n_range);
    if (!integrators.contains(integrator)) throw ConfigError("unknown --integrator '" + integrator + "'");
    if (!placements.contains(placement)) throw ConfigError("unknown --placement '" + placement + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  cfg.integrator = integrators.at(integrator);
  cfg.placement = placements.at(placement);

  try {
    return run(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::check_failed;
  }
}
