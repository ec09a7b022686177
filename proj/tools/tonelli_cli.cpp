#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tonelli/config.hpp"
#include "tonelli/fixtures.hpp"
#include "tonelli/runner.hpp"

namespace {

std::string fixture_list() {
  std::string out;
  for (const auto& n : tonelli::fixture_names()) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  tonelli::RunConfig cfg;

  // The config file seeds the defaults; explicit flags override it below.
  try {
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) cfg = tonelli::RunConfig::from_file(argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0)
        cfg = tonelli::RunConfig::from_file(arg.substr(9));
    }
  } catch (const tonelli::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Symplectic analysis of Hamiltonian flows and invariant submanifolds on the "
               "cotangent bundle of a torus"};
  app.require_subcommand(1);
  std::string config_sink;
  app.add_option("--config", config_sink, "INI-style configuration file (applied first)");

  auto add_common = [&cfg, &config_sink](CLI::App* sub) {
    sub->add_option("--config", config_sink, "INI-style configuration file (applied first)");
    sub->add_option("--out", cfg.output_dir, "output directory");
    sub->add_option("--policy", cfg.exec_policy, "serial or openmp");
    sub->add_option("--seed", cfg.seed, "random seed for all sampling");
    sub->add_option("--resolution", cfg.grid_resolution, "grid nodes per parameter axis");
    return sub;
  };
  auto add_fixture = [&cfg](CLI::App* sub) {
    sub->add_option("fixture", cfg.fixture, "fixture name: " + fixture_list())->required();
    return sub;
  };

  CLI::App* analyze = add_fixture(add_common(app.add_subcommand(
      "analyze", "grid analysis: restricted form, kernel, graph and winding tests, "
                 "invariance, conjugate scan")));
  analyze->add_option("--times", cfg.invariance_times, "invariance check horizons");
  analyze->add_option("--conjugate-horizon", cfg.conjugate_horizon,
                      "conjugate scan horizon (0 = fixture default)");

  CLI::App* flowcmd = add_fixture(add_common(
      app.add_subcommand("flow", "integrate one orbit and record it as CSV")));
  flowcmd->add_option("--t", cfg.flow_t, "integration time");
  flowcmd->add_option("--x0", cfg.x0, "initial point, q components then p components");

  CLI::App* green = add_fixture(add_common(app.add_subcommand(
      "green", "limit-bundle estimate along the orbit of a point")));
  green->add_option("--x0", cfg.x0, "base point, q components then p components")->required();
  green->add_option("--side", cfg.green_side, "plus or minus");

  CLI::App* conj = add_fixture(add_common(app.add_subcommand(
      "conjugate", "scan an orbit segment for conjugate points")));
  conj->add_option("--x0", cfg.x0, "initial point, q components then p components");
  conj->add_option("--T", cfg.conjugate_horizon, "scan horizon (0 = fixture default)");

  CLI::App* charc = add_fixture(add_common(app.add_subcommand(
      "characteristic", "characteristic field and one integrated curve")));
  charc->add_option("--theta0", cfg.theta0, "starting parameter");
  charc->add_option("--t", cfg.flow_t, "integration time");

  CLI::App* extend = add_common(app.add_subcommand(
      "extend", "symplectic extension of a near-identity torus map"));
  extend->add_option("basemap", cfg.basemap,
                     "identity[:dim] | translation:c1[,c2,...] | sine:eps[,dim] | "
                     "tabulated:path")
      ->required();

  CLI::App* homology = add_common(app.add_subcommand(
      "homology", "integer iteration of a determinant-one matrix on lattice classes"));
  homology->add_option("--matrix", cfg.matrix, "four integers a b c d, row major")
      ->expected(4);
  homology->add_option("--v0", cfg.v0, "starting class, two integers")->expected(2);
  homology->add_option("--n", cfg.homology_n, "iteration budget");

  CLI::App* report = app.add_subcommand(
      "report", "merge summary.json files under a directory into one verdict");
  report->add_option("--dir", cfg.output_dir, "directory holding summaries")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (CLI::App* sub : {analyze, flowcmd, green, conj, charc, extend, homology, report})
    if (sub->parsed()) cfg.operation = sub->get_name();

  try {
    int code = tonelli::run(cfg);
    const char* file = cfg.operation == "report" ? "report.json" : "summary.json";
    std::cout << (code == 0 ? "PASS" : "FAIL") << " (" << cfg.operation
              << "): " << cfg.output_dir << "/" << file << "\n";
    return code;
  } catch (const tonelli::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
