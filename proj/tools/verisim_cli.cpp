// Command line front end: single protocol runs, Monte Carlo experiment
// grids, and the solver/verifier payoff analysis.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "verisim/game.hpp"
#include "verisim/harness.hpp"

namespace {

int cmd_run(std::uint64_t a, std::uint64_t b, std::size_t n, double prior,
            std::uint64_t seed, bool trace) {
  verisim::ExperimentConfig config;
  const verisim::SingleRun run = verisim::run_single(config, a, b, n, prior, seed);
  std::cout << run.outcome;

  if (trace) {
    for (const verisim::ComputationService& service : run.pool.services) {
      if (service.address == run.outcome.solver) {
        const verisim::TraceTree tree = verisim::produce_solution(
            service, {a, b, run.outcome.request.seed});
        std::cout << "trace (solver):\n";
        verisim::dump_trace(tree, std::cout);
        break;
      }
    }
    std::cout << "events:\n";
    run.ledger.dump_events(std::cout);
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   std::optional<std::uint64_t> seed, bool compare) {
  verisim::ExperimentConfig config;
  bool seeded = false;
  if (!config_path.empty()) {
    const verisim::LoadedConfig loaded = verisim::load_config_file(config_path);
    config = loaded.config;
    seeded = loaded.has_master_seed;
  }
  if (seed) {
    config.master_seed = *seed;
    seeded = true;
  }
  if (!seeded) {
    std::cerr << "experiment: a master seed is required (config master_seed or "
                 "--seed); wall-clock seeding is not supported\n";
    return 1;
  }

  const verisim::Report report = verisim::run_grid(config);
  verisim::emit_csv(report, out_path);
  std::cout << "wrote " << report.cells.size() << " cells to " << out_path << '\n';
  for (const auto& [prior, fit] : report.gas_fits) {
    std::cout << "gas fit p=" << prior << ": slope=" << fit.slope
              << " intercept=" << fit.intercept << " r2=" << fit.r2 << '\n';
  }

  if (compare) {
    const verisim::Comparison comparison = verisim::compare_to_expected(report);
    std::cout << comparison;
    if (!comparison.pass) return 2;
  }
  return 0;
}

int cmd_game(std::uint64_t fee, std::size_t n, std::uint64_t deposit,
             bool slash_wrong_challengers) {
  verisim::ProtocolFlags flags;
  flags.slash_wrong_challengers = slash_wrong_challengers;
  const verisim::PayoffMatrix matrix = verisim::build_matrix(fee, n, deposit, flags);
  std::cout << matrix;

  const verisim::DominanceResult dominance = verisim::dominant_strategies(matrix);
  std::cout << "dominant strategy (solver): "
            << (dominance.solver ? to_string(*dominance.solver) : "none") << '\n';
  std::cout << "dominant strategy (verifier): "
            << (dominance.verifier ? to_string(*dominance.verifier) : "none") << '\n';

  std::cout << "nash equilibria:";
  for (const verisim::StrategyProfile& profile : verisim::nash_equilibria(matrix)) {
    std::cout << " (" << to_string(profile.solver) << ", "
              << to_string(profile.verifier) << ')';
  }
  std::cout << '\n';

  std::cout << "pareto efficient:";
  for (const verisim::StrategyProfile& profile : verisim::pareto_efficient(matrix)) {
    std::cout << " (" << to_string(profile.solver) << ", "
              << to_string(profile.verifier) << ')';
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator of an incentive-aligned verifiable "
               "computation protocol"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute a single computation request");
  std::uint64_t a = 0, b = 0, seed = 0;
  std::size_t verifiers = 1;
  double prior = 0.0;
  bool trace = false;
  run->add_option("--a", a, "First operand")->required();
  run->add_option("--b", b, "Second operand")->required();
  run->add_option("--verifiers", verifiers, "Verifier count n")->required()
      ->check(CLI::PositiveNumber);
  run->add_option("--prior", prior, "Probability a service is dishonest")
      ->required()->check(CLI::Range(0.0, 1.0));
  run->add_option("--seed", seed, "Run seed (mandatory, no wall-clock seeding)")
      ->required();
  run->add_flag("--trace", trace, "Dump the solver trace and the ledger event log");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Monte Carlo sweep over priors x verifier counts");
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> master_seed;
  bool compare = false;
  experiment->add_option("--config", config_path, "Key=value config file")
      ->check(CLI::ExistingFile);
  experiment->add_option("--out", out_path, "CSV output path")->required();
  experiment->add_option("--seed", master_seed,
                         "Master seed (overrides config master_seed)");
  experiment->add_flag("--compare", compare,
                       "Compare simulated rates against the expected p^(n+1) grid");

  // game
  auto* game = app.add_subcommand("game", "Payoff matrix and equilibrium checks");
  std::uint64_t fee = 60, deposit = 100;
  std::size_t game_verifiers = 2;
  bool slash_wrong_challengers = true;
  game->add_option("--fee", fee, "Total fee")->required();
  game->add_option("--verifiers", game_verifiers, "Verifier count n")->required()
      ->check(CLI::PositiveNumber);
  game->add_option("--deposit", deposit, "Service deposit at stake")->required();
  game->add_flag("--slash-wrong-challengers,!--no-slash-wrong-challengers",
                 slash_wrong_challengers,
                 "Whether judged-false challengers lose their deposit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1
  }

  try {
    if (run->parsed()) return cmd_run(a, b, verifiers, prior, seed, trace);
    if (experiment->parsed()) {
      return cmd_experiment(config_path, out_path, master_seed, compare);
    }
    if (game->parsed()) {
      return cmd_game(fee, game_verifiers, deposit, slash_wrong_challengers);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
