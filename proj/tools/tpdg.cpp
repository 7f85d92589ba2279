// Command-line driver: run simulations, convergence studies, hyperbolicity
// checks and reference solutions from an INI-style config file.

#include <CLI11.hpp>
#include <iostream>

#include "tpdg/tpdg.hpp"

using namespace tpdg;

namespace {

int do_run(const std::string& path, bool quiet) {
  const harness::RunConfig cfg = harness::load_config_file(path);
  const harness::RunResult res = harness::run_simulation(cfg, quiet ? nullptr : &std::cerr);
  if (!quiet)
    std::cerr << "completed " << res.steps << " steps to t=" << res.final_time
              << " (troubled cell-steps: " << res.troubled_total << ")\n";
  return 0;
}

int do_convergence(const std::string& path, std::vector<int> meshes, bool quiet) {
  const harness::RunConfig cfg = harness::load_config_file(path);
  if (cfg.tag != harness::CaseTag::VortexSteady && cfg.tag != harness::CaseTag::VortexAdvected)
    throw harness::ConfigError("convergence requires a vortex case (exact solution needed)");
  if (meshes.empty())
    meshes = {16, 32};
  const auto rows = harness::convergence_study(cfg, meshes, quiet ? nullptr : &std::cerr);
  harness::print_convergence_table(rows, std::cout);
  return 0;
}

int do_eigencheck(const std::string& path, int samples, int dim, std::uint64_t seed) {
  const harness::RunConfig cfg = harness::load_config_file(path);
  const auto sum = harness::eigencheck(cfg.ctx, samples, dim, seed, std::cout);
  std::cerr << "samples=" << sum.samples << " strong=" << sum.strong << " weak=" << sum.weak
            << " nonhyperbolic=" << sum.nonhyp << " rank=[" << sum.rank_min << ","
            << sum.rank_max << "] max_eig_mismatch=" << sum.max_eig_mismatch << "\n";
  return 0;
}

int do_reference(const std::string& path, int cells) {
  const harness::RunConfig cfg = harness::load_config_file(path);
  const auto prof = harness::reference_profile(cfg, cells);
  const std::string out =
      cfg.output_dir + "/" + cfg.output_prefix + "_reference.csv";
  harness::write_profile_csv(out, prof, cfg.case_name());
  std::cerr << "wrote " << out << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"tpdg: ADER-DG solver for barotropic two-phase flow"};
  app.require_subcommand(1);

  std::string config;
  bool quiet = false;
  std::vector<int> meshes;
  int samples = 1000, dim = 3, cells = 0;
  std::uint64_t seed = 20240901;

  auto* run = app.add_subcommand("run", "simulate a case and write outputs");
  run->add_option("config", config, "config file")->required();
  run->add_flag("-q,--quiet", quiet, "suppress progress output");

  auto* conv = app.add_subcommand("convergence", "mesh-refinement error table");
  conv->add_option("config", config, "config file")->required();
  conv->add_option("-m,--meshes", meshes, "cell counts per direction");
  conv->add_flag("-q,--quiet", quiet, "suppress progress output");

  auto* eig = app.add_subcommand("eigencheck", "hyperbolicity report over random states");
  eig->add_option("config", config, "config file")->required();
  eig->add_option("-n,--samples", samples, "number of sampled states");
  eig->add_option("-d,--dim", dim, "sampling dimension (2 or 3)");
  eig->add_option("--seed", seed, "RNG seed");

  auto* ref = app.add_subcommand("reference", "compute the reference profile");
  ref->add_option("config", config, "config file")->required();
  ref->add_option("-c,--cells", cells, "override reference resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return do_run(config, quiet);
    if (conv->parsed())
      return do_convergence(config, meshes, quiet);
    if (eig->parsed())
      return do_eigencheck(config, samples, dim, seed);
    if (ref->parsed())
      return do_reference(config, cells);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
