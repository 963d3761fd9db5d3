// opokit command-line front end: config-driven kernel construction,
// diagonalization, transverse sweeps, cluster-state synthesis and figure
// reproduction. Exit codes: 0 success, 2 config error, 3 numerical error.
#include <CLI11.hpp>

#include <opokit/config.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  long grid_n = 0;
  bool verbose = false;
  bool seedless = false; // reserved: every algorithm here is deterministic
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
  if (needs_config)
    cmd->add_option("--config", args.config, "path to the run configuration (JSON)")
        ->required();
  cmd->add_option("--out", args.out, "output directory (default: out)");
  cmd->add_option("--grid-n", args.grid_n, "override the grid point count");
  cmd->add_flag("--verbose", args.verbose, "print progress to stderr");
  cmd->add_flag("--seedless", args.seedless,
                "reserved; all algorithms are deterministic already");
}

opokit::cli::Overrides overrides(const CommonArgs& args) {
  opokit::cli::Overrides ov;
  if (args.grid_n > 0) ov.grid_n = static_cast<std::size_t>(args.grid_n);
  ov.verbose = args.verbose;
  return ov;
}

int run_one(const CommonArgs& args,
            void (*runner)(const opokit::cli::json&, const std::filesystem::path&,
                           const opokit::cli::Overrides&)) {
  const auto cfg = opokit::cli::load_config(args.config);
  if (args.verbose)
    std::fprintf(stderr, "opokit: running %s -> %s\n",
                 opokit::cli::config_kind(cfg).c_str(), args.out.c_str());
  runner(cfg, args.out, overrides(args));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"opokit: multimode parametric-interaction kernels, supermode "
               "spectra and cluster-state synthesis"};
  app.require_subcommand(1);

  CommonArgs kernel_args, transverse_args, cluster_args, figures_args;
  auto* kernel = app.add_subcommand(
      "kernel", "build and diagonalize a kernel (kinds: modulated-kernel, spopo)");
  add_common(kernel, kernel_args, true);
  auto* transverse = app.add_subcommand(
      "transverse", "sweep transverse couplings over the pump width (kind: transverse-sweep)");
  add_common(transverse, transverse_args, true);
  auto* clusterc = app.add_subcommand(
      "cluster", "cluster-state synthesis and GHZ diagnostics (kinds: cluster-synthesis, ghz)");
  add_common(clusterc, cluster_args, true);
  auto* figures =
      app.add_subcommand("figures", "run the shipped fig1a/fig1c/fig2-1ps/fig3/fig4 configs");
  add_common(figures, figures_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (kernel->parsed()) return run_one(kernel_args, &opokit::cli::run_kernel_config);
    if (transverse->parsed()) return run_one(transverse_args, &opokit::cli::run_transverse_config);
    if (clusterc->parsed()) return run_one(cluster_args, &opokit::cli::run_cluster_config);
    if (figures->parsed()) {
      opokit::cli::run_figures(figures_args.out, overrides(figures_args));
      return 0;
    }
  } catch (const opokit::cli::config_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const opokit::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
