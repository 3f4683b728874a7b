#include <iostream>

#include "CLI11.hpp"
#include "gapq/cli.hpp"
#include "gapq/error.hpp"

int main(int argc, char** argv) {
  using namespace gapq;
  CLI::App app{"Gap-acceptance queue analysis: exact delay moments, sweeps, simulation and approximations"};
  app.require_subcommand(1);

  std::string config;
  cli::RunOptions opt;
  std::uint64_t seed = 0;
  unsigned replications = 0, jet_order = 0;

  for (auto kind : {cli::ExperimentKind::analyze, cli::ExperimentKind::sweep, cli::ExperimentKind::simulate,
                    cli::ExperimentKind::approx, cli::ExperimentKind::table1}) {
    auto* sub = app.add_subcommand(std::string(cli::to_string(kind)));
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->default_val(".");
    sub->add_option("--seed", seed, "simulation master seed (overrides the config)");
    sub->add_option("--replications", replications, "simulation replications (overrides the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--jet-order", jet_order, "order of the cached service expansion (overrides the config)")
        ->check(CLI::Range(2u, 40u));
  }
  CLI11_PARSE(app, argc, argv);

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--replications")) opt.replications = replications;
  if (sub->count("--jet-order")) opt.jet_order = jet_order;

  try {
    auto spec = cli::parse_config(config);
    // The subcommand picks the experiment; re-validate the sections it needs.
    if (const auto requested = cli::experiment_from_string(sub->get_name()); spec.kind != requested) {
      spec.kind = requested;
      spec = cli::parse_config_text(cli::emit_config(spec));
    }
    const auto res = cli::run_experiment(spec, opt);
    std::cout << res.summary;
    for (const auto& f : res.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
    return cli::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}
