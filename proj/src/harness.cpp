#include "verisim/harness.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "verisim/rng.hpp"

namespace verisim {

void ExperimentConfig::validate() const {
  if (runs_per_cell < 1) throw std::invalid_argument("config: runs_per_cell must be >= 1");
  if (priors.empty()) throw std::invalid_argument("config: priors must not be empty");
  for (double p : priors) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("config: prior out of [0,1]");
  }
  if (verifier_counts.empty()) {
    throw std::invalid_argument("config: verifier_counts must not be empty");
  }
  std::size_t max_n = 0;
  for (std::size_t n : verifier_counts) {
    if (n < 1) throw std::invalid_argument("config: verifier count must be >= 1");
    max_n = std::max(max_n, n);
  }
  if (pool_size < max_n + 1) {
    throw std::invalid_argument("config: pool_size must be >= max(verifier_counts)+1");
  }
  gas_schedule.validate();
}

Interval clopper_pearson(std::size_t successes, std::size_t trials,
                         double confidence) {
  if (trials == 0 || successes > trials) {
    throw std::invalid_argument("clopper_pearson: bad counts");
  }
  using boost::math::binomial_distribution;
  const double tail = (1.0 - confidence) / 2.0;
  Interval ci;
  ci.low = binomial_distribution<>::find_lower_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), tail);
  ci.high = binomial_distribution<>::find_upper_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), tail);
  return ci;
}

double expected_false_rate(double p, std::size_t n) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("expected_false_rate: bad prior");
  if (n < 1) throw std::invalid_argument("expected_false_rate: n must be >= 1");
  double rate = p;
  for (std::size_t i = 0; i < n; ++i) rate *= p;
  return rate;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need >= 2 paired points");
  }
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate x values");

  LinearFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;

  const double mean_y = sy / m;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double predicted = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - predicted) * (y[i] - predicted);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

namespace {

constexpr std::uint64_t kPoolTag = 0x706f6f6cULL;  // distinguishes cell-level draws

std::uint64_t run_seed(const ExperimentConfig& config, double prior,
                       std::size_t n, std::size_t run_index) {
  return mix_seed({config.master_seed, std::bit_cast<std::uint64_t>(prior),
                   static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(run_index)});
}

Outcome one_run(const ExperimentConfig& config, double prior, std::size_t n,
                std::uint64_t seed, Ledger& ledger, ServicePool& pool,
                std::optional<std::pair<std::uint64_t, std::uint64_t>> inputs) {
  Rng rng(seed);
  pool = populate_pool(config.pool_size, prior, config.deposit,
                       config.corruption_site_policy, ledger, rng);

  std::uint64_t a, b;
  if (inputs) {
    a = inputs->first;
    b = inputs->second;
  } else {
    a = rng.next_below(0xFFFFFFFFULL) + 1;  // [1, 2^32)
    b = rng.next_below(0xFFFFFFFFULL) + 1;
  }

  ComputationRequest request;
  request.a = a;
  request.b = b;
  request.n = n;
  request.fee = config.fee_policy.fee_for(a, b, n);
  request.seed = rng.next();

  const Address user = ledger.open_account(config.min_deposit);
  ledger.fund(user, request.fee);
  return run_request(request, pool, ledger, user, config.flags);
}

}  // namespace

CellResult run_cell(const ExperimentConfig& config, double prior, std::size_t n) {
  config.validate();

  CellResult cell;
  cell.prior = prior;
  cell.n = n;
  cell.expected_false = expected_false_rate(prior, n);

  // Cell-level service identities, only used with cross-run exclusion.
  std::vector<Behavior> persistent_behaviors;
  std::vector<bool> retired;
  if (config.cross_run_exclusion) {
    Rng pool_rng(mix_seed({config.master_seed, std::bit_cast<std::uint64_t>(prior),
                           static_cast<std::uint64_t>(n), kPoolTag}));
    persistent_behaviors.resize(config.pool_size);
    for (Behavior& behavior : persistent_behaviors) {
      behavior.kind = pool_rng.bernoulli(prior) ? BehaviorKind::CollusiveDishonest
                                                : BehaviorKind::Honest;
      behavior.corruption_site_policy = config.corruption_site_policy;
    }
    retired.assign(config.pool_size, false);
  }

  std::uint64_t gas_sum = 0;
  unsigned __int128 gas_sumsq = 0;

  for (std::size_t run = 0; run < config.runs_per_cell; ++run) {
    const std::uint64_t seed = run_seed(config, prior, n, run);
    Ledger ledger(LedgerConfig{config.min_deposit, config.gas_schedule});
    ServicePool pool;
    Outcome outcome;

    if (!config.cross_run_exclusion) {
      outcome = one_run(config, prior, n, seed, ledger, pool, std::nullopt);
    } else {
      // Re-admit only services that have not been slashed in earlier runs.
      Rng rng(seed);
      std::vector<std::size_t> admitted;
      for (std::size_t i = 0; i < persistent_behaviors.size(); ++i) {
        if (!retired[i]) {
          pool.services.push_back(ComputationService{
              ledger.open_account(config.deposit), persistent_behaviors[i]});
          admitted.push_back(i);
        }
      }
      pool.prior_p = prior;
      const std::uint64_t a = rng.next_below(0xFFFFFFFFULL) + 1;
      const std::uint64_t b = rng.next_below(0xFFFFFFFFULL) + 1;
      ComputationRequest request{a, b, n, config.fee_policy.fee_for(a, b, n),
                                 rng.next()};
      const Address user = ledger.open_account(config.min_deposit);
      ledger.fund(user, request.fee);
      outcome = run_request(request, pool, ledger, user, config.flags);
      for (std::size_t slot = 0; slot < pool.services.size(); ++slot) {
        if (ledger.excluded(pool.services[slot].address)) {
          retired[admitted[slot]] = true;
        }
      }
    }

    if (outcome.kind == Case::Aborted) {
      ++cell.aborted;
      continue;
    }
    ++cell.runs;
    if (outcome.kind == Case::FalseAccepted) ++cell.false_accepts;
    if (outcome.kind == Case::CorrectChallenged ||
        outcome.kind == Case::FalseChallenged) {
      ++cell.disputes;
    }
    cell.slashes += outcome.slashed.size();
    const Gas total = outcome.gas.total();
    gas_sum += total;
    gas_sumsq += static_cast<unsigned __int128>(total) * total;
  }

  if (cell.runs > 0) {
    const auto m = static_cast<double>(cell.runs);
    cell.false_accept_rate = static_cast<double>(cell.false_accepts) / m;
    cell.dispute_rate = static_cast<double>(cell.disputes) / m;
    cell.gas_mean = static_cast<double>(gas_sum) / m;
    if (cell.runs > 1) {
      const double mean = cell.gas_mean;
      const double sq = static_cast<double>(gas_sumsq);
      cell.gas_std = std::sqrt(std::max(
          0.0, (sq - m * mean * mean) / (m - 1.0)));
    }
    cell.false_accept_ci = clopper_pearson(cell.false_accepts, cell.runs);
  }
  return cell;
}

Report run_grid(const ExperimentConfig& config) {
  config.validate();
  Report report;
  for (double prior : config.priors) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t n : config.verifier_counts) {
      report.cells.push_back(run_cell(config, prior, n));
      xs.push_back(static_cast<double>(n));
      ys.push_back(report.cells.back().gas_mean);
    }
    if (xs.size() >= 2) {
      report.gas_fits.emplace_back(prior, linear_fit(xs, ys));
    }
  }
  return report;
}

const CellResult* Report::find_cell(double prior, std::size_t n) const {
  for (const CellResult& cell : cells) {
    if (cell.n == n && std::abs(cell.prior - prior) < 1e-12) return &cell;
  }
  return nullptr;
}

void emit_csv(const Report& report, std::ostream& out) {
  out << "prior,n,runs,false_accept_rate,expected_false,dispute_rate,"
         "gas_mean,gas_std,slashes\n";
  char line[256];
  for (const CellResult& cell : report.cells) {
    std::snprintf(line, sizeof(line), "%g,%zu,%zu,%.4f,%.4f,%.4f,%.4f,%.4f,%zu\n",
                  cell.prior, cell.n, cell.runs, cell.false_accept_rate,
                  cell.expected_false, cell.dispute_rate, cell.gas_mean,
                  cell.gas_std, cell.slashes);
    out << line;
  }
}

void emit_csv(const Report& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
  emit_csv(report, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

Comparison compare_to_expected(const Report& report) {
  static constexpr double kPriors[] = {0.3, 0.5, 0.7};
  static constexpr double kMarginPct = 3.1;

  std::string missing;
  Comparison comparison;
  for (double prior : kPriors) {
    for (std::size_t n = 1; n <= 6; ++n) {
      const CellResult* cell = report.find_cell(prior, n);
      if (cell == nullptr) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), " (%g,%zu)", prior, n);
        missing += buf;
        continue;
      }
      ComparisonRow row;
      row.prior = prior;
      row.n = n;
      row.expected_pct = expected_false_rate(prior, n) * 100.0;
      row.actual_pct = cell->false_accept_rate * 100.0;
      row.ci = cell->false_accept_ci;
      row.within_ci = row.ci.contains(row.expected_pct / 100.0);
      row.within_margin = std::abs(row.actual_pct - row.expected_pct) <= kMarginPct;
      if (!row.within_ci) ++comparison.outside_ci;
      if (!row.within_margin) ++comparison.outside_margin;
      comparison.rows.push_back(row);
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("compare_to_expected: missing cells:" + missing);
  }
  comparison.pass = comparison.outside_ci == 0 && comparison.outside_margin <= 1;
  return comparison;
}

std::ostream& operator<<(std::ostream& out, const Comparison& comparison) {
  out << "prior  n  expected[%]  actual[%]   95% CI [%]          flags\n";
  char line[160];
  for (const ComparisonRow& row : comparison.rows) {
    std::snprintf(line, sizeof(line),
                  "%-5g  %zu  %10.5f  %9.4f  [%8.4f, %8.4f]  %s%s\n", row.prior,
                  row.n, row.expected_pct, row.actual_pct, row.ci.low * 100.0,
                  row.ci.high * 100.0, row.within_ci ? "" : "OUTSIDE-CI ",
                  row.within_margin ? "" : "BEYOND-3.1PP");
    out << line;
  }
  out << "cells outside 95% CI: " << comparison.outside_ci
      << ", beyond 3.1 percentage points: " << comparison.outside_margin
      << ", result: " << (comparison.pass ? "PASS" : "FAIL") << '\n';
  return out;
}

SingleRun run_single(const ExperimentConfig& config, std::uint64_t a,
                     std::uint64_t b, std::size_t n, double prior,
                     std::uint64_t seed) {
  config.validate();
  SingleRun result{Outcome{}, Ledger(LedgerConfig{config.min_deposit, config.gas_schedule}),
                   ServicePool{}};
  result.outcome = one_run(config, prior, n, seed, result.ledger, result.pool,
                           std::make_pair(a, b));
  return result;
}

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + value + "'");
}

std::uint64_t parse_u64(const std::string& value) {
  std::size_t pos = 0;
  const std::uint64_t parsed = std::stoull(value, &pos);
  if (pos != value.size()) throw std::invalid_argument("config: bad integer '" + value + "'");
  return parsed;
}

double parse_double(const std::string& value) {
  std::size_t pos = 0;
  const double parsed = std::stod(value, &pos);
  if (pos != value.size()) throw std::invalid_argument("config: bad number '" + value + "'");
  return parsed;
}

}  // namespace

LoadedConfig load_config(std::istream& in) {
  LoadedConfig loaded;
  ExperimentConfig& config = loaded.config;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "priors") {
      config.priors.clear();
      for (const std::string& item : split_list(value)) {
        config.priors.push_back(parse_double(item));
      }
    } else if (key == "verifier_counts") {
      config.verifier_counts.clear();
      for (const std::string& item : split_list(value)) {
        config.verifier_counts.push_back(parse_u64(item));
      }
    } else if (key == "runs_per_cell") {
      config.runs_per_cell = parse_u64(value);
    } else if (key == "pool_size") {
      config.pool_size = parse_u64(value);
    } else if (key == "deposit") {
      config.deposit = parse_u64(value);
    } else if (key == "min_deposit") {
      config.min_deposit = parse_u64(value);
    } else if (key == "master_seed") {
      config.master_seed = parse_u64(value);
      loaded.has_master_seed = true;
    } else if (key == "fee_base") {
      config.fee_policy.base = parse_u64(value);
    } else if (key == "fee_per_step") {
      config.fee_policy.per_step = parse_u64(value);
    } else if (key == "fee_per_verifier") {
      config.fee_policy.per_verifier = parse_u64(value);
    } else if (key == "gas_transaction_base") {
      config.gas_schedule.transaction_base = parse_u64(value);
    } else if (key == "gas_storage_write") {
      config.gas_schedule.storage_write = parse_u64(value);
    } else if (key == "gas_comparison") {
      config.gas_schedule.comparison = parse_u64(value);
    } else if (key == "gas_judge_invocation") {
      config.gas_schedule.judge_invocation = parse_u64(value);
    } else if (key == "gas_dispute_step") {
      config.gas_schedule.dispute_step = parse_u64(value);
    } else if (key == "gas_role_assignment") {
      config.gas_schedule.role_assignment = parse_u64(value);
    } else if (key == "slash_wrong_challengers") {
      config.flags.slash_wrong_challengers = parse_bool(value);
    } else if (key == "dishonest_verifier_challenges") {
      config.flags.dishonest_verifier_challenges = parse_bool(value);
    } else if (key == "corruption_site_policy") {
      if (value == "root_only") {
        config.corruption_site_policy = CorruptionSite::RootOnly;
      } else if (value == "uniform_internal") {
        config.corruption_site_policy = CorruptionSite::UniformInternal;
      } else {
        throw std::invalid_argument("config: bad corruption_site_policy '" + value + "'");
      }
    } else if (key == "cross_run_exclusion") {
      config.cross_run_exclusion = parse_bool(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": unknown key '" + key + "'");
    }
  }
  config.validate();
  return loaded;
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return load_config(in);
}

}  // namespace verisim
