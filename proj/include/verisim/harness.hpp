#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "verisim/protocol.hpp"

namespace verisim {

struct ExperimentConfig {
  std::vector<double> priors{0.3, 0.5, 0.7};
  std::vector<std::size_t> verifier_counts{1, 2, 3, 4, 5, 6};
  std::size_t runs_per_cell{1000};
  std::size_t pool_size{64};
  FeePolicy fee_policy{};
  GasSchedule gas_schedule{};
  Currency deposit{100};
  Currency min_deposit{1};
  std::uint64_t master_seed{42};
  ProtocolFlags flags{};
  CorruptionSite corruption_site_policy{CorruptionSite::UniformInternal};
  /// Keep slashed services out of later runs of the same cell. Off by
  /// default: a constant prior per run is what the p^(n+1) analysis assumes.
  bool cross_run_exclusion{false};

  void validate() const;
};

/// Exact two-sided Clopper-Pearson bounds for a binomial proportion.
struct Interval {
  double low{0.0};
  double high{1.0};

  bool contains(double p) const { return p >= low && p <= high; }
};

Interval clopper_pearson(std::size_t successes, std::size_t trials,
                         double confidence = 0.95);

/// Probability that the solver and all n verifiers are dishonest colluders.
double expected_false_rate(double p, std::size_t n);

struct CellResult {
  double prior{0.0};
  std::size_t n{0};
  std::size_t runs{0};     // completed (non-aborted) runs
  std::size_t aborted{0};  // starvation events, excluded from rates
  std::size_t false_accepts{0};
  std::size_t disputes{0};
  std::size_t slashes{0};
  double false_accept_rate{0.0};
  double expected_false{0.0};
  double dispute_rate{0.0};
  double gas_mean{0.0};
  double gas_std{0.0};
  Interval false_accept_ci{};
};

struct LinearFit {
  double slope{0.0};
  double intercept{0.0};
  double r2{0.0};
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct Report {
  std::vector<CellResult> cells;
  std::vector<std::pair<double, LinearFit>> gas_fits;  // one per prior

  const CellResult* find_cell(double prior, std::size_t n) const;
};

/// One experiment cell: runs_per_cell protocol runs, each on a fresh ledger
/// with a freshly populated pool, seeded from (master_seed, prior, n, run).
CellResult run_cell(const ExperimentConfig& config, double prior, std::size_t n);

/// The full prior × verifier-count grid. Deterministic given master_seed.
Report run_grid(const ExperimentConfig& config);

/// One row per cell:
/// prior,n,runs,false_accept_rate,expected_false,dispute_rate,gas_mean,gas_std,slashes
void emit_csv(const Report& report, std::ostream& out);
void emit_csv(const Report& report, const std::string& path);

struct ComparisonRow {
  double prior{0.0};
  std::size_t n{0};
  double expected_pct{0.0};
  double actual_pct{0.0};
  Interval ci{};  // on the simulated proportion
  bool within_ci{false};
  bool within_margin{false};  // |actual - expected| <= 3.1 percentage points
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::size_t outside_ci{0};
  std::size_t outside_margin{0};
  bool pass{false};
};

std::ostream& operator<<(std::ostream& out, const Comparison& comparison);

/// Side-by-side expected vs simulated false-acceptance rates over the
/// reference grid (priors 0.3/0.5/0.7, n 1..6). Throws if cells are missing.
Comparison compare_to_expected(const Report& report);

/// Result of a single CLI-driven run, with enough context to dump traces.
struct SingleRun {
  Outcome outcome;
  Ledger ledger;
  ServicePool pool;
};

SingleRun run_single(const ExperimentConfig& config, std::uint64_t a,
                     std::uint64_t b, std::size_t n, double prior,
                     std::uint64_t seed);

/// Flat key=value config text; '#' starts a comment. Unknown keys are
/// rejected. Returns the parsed config and whether master_seed was given.
struct LoadedConfig {
  ExperimentConfig config;
  bool has_master_seed{false};
};

LoadedConfig load_config(std::istream& in);
LoadedConfig load_config_file(const std::string& path);

}  // namespace verisim
