#include "verisim/game.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace verisim {

const char* to_string(SolverStrategy s) {
  return s == SolverStrategy::Correct ? "correct" : "false";
}

const char* to_string(VerifierStrategy v) {
  return v == VerifierStrategy::Challenge ? "challenge" : "accept";
}

PayoffMatrix::PayoffMatrix(Currency fee, std::size_t n, Currency deposit,
                           Payoff cells[2][2])
    : fee_(fee), n_(n), deposit_(deposit) {
  for (int s = 0; s < 2; ++s) {
    for (int v = 0; v < 2; ++v) cells_[s][v] = cells[s][v];
  }
}

PayoffMatrix build_matrix(Currency fee, std::size_t n, Currency deposit,
                          const ProtocolFlags& flags) {
  if (n < 1) throw std::invalid_argument("build_matrix: n must be >= 1");
  if (fee > static_cast<Currency>(std::numeric_limits<std::int64_t>::max()) ||
      deposit > static_cast<Currency>(std::numeric_limits<std::int64_t>::max())) {
    throw std::invalid_argument("build_matrix: fee/deposit out of range");
  }

  const std::vector<Currency> shares = split_fee(fee, n);
  const auto solver_share = static_cast<std::int64_t>(shares[0]);
  const auto verifier_share = static_cast<std::int64_t>(shares[1]);
  const auto loss = static_cast<std::int64_t>(deposit);

  Payoff cells[2][2];
  auto cell = [&](SolverStrategy s, VerifierStrategy v) -> Payoff& {
    return cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
  };

  // Case 1: everyone keeps their share.
  cell(SolverStrategy::Correct, VerifierStrategy::Accept) = {solver_share,
                                                             verifier_share};
  // Case 2: all n challengers forfeit their shares to the solver.
  cell(SolverStrategy::Correct, VerifierStrategy::Challenge) = {
      static_cast<std::int64_t>(fee),
      flags.slash_wrong_challengers ? -loss : 0};
  // Case 3: indistinguishable from Case 1 in fee terms.
  cell(SolverStrategy::False, VerifierStrategy::Accept) = {solver_share,
                                                           verifier_share};
  // Case 4: the solver's share is split over the n challengers, remainder to
  // the first; the solver is slashed.
  cell(SolverStrategy::False, VerifierStrategy::Challenge) = {
      -loss, verifier_share + solver_share / static_cast<std::int64_t>(n) +
                 solver_share % static_cast<std::int64_t>(n)};

  return PayoffMatrix(fee, n, deposit, cells);
}

namespace {

constexpr SolverStrategy kSolverStrategies[] = {SolverStrategy::Correct,
                                                SolverStrategy::False};
constexpr VerifierStrategy kVerifierStrategies[] = {VerifierStrategy::Challenge,
                                                    VerifierStrategy::Accept};

SolverStrategy other(SolverStrategy s) {
  return s == SolverStrategy::Correct ? SolverStrategy::False
                                      : SolverStrategy::Correct;
}
VerifierStrategy other(VerifierStrategy v) {
  return v == VerifierStrategy::Challenge ? VerifierStrategy::Accept
                                          : VerifierStrategy::Challenge;
}

}  // namespace

DominanceResult dominant_strategies(const PayoffMatrix& matrix) {
  DominanceResult result;
  for (SolverStrategy s : kSolverStrategies) {
    bool weakly_better = true;
    bool strictly_somewhere = false;
    for (VerifierStrategy v : kVerifierStrategies) {
      const std::int64_t mine = matrix.at(s, v).solver;
      const std::int64_t theirs = matrix.at(other(s), v).solver;
      if (mine < theirs) weakly_better = false;
      if (mine > theirs) strictly_somewhere = true;
    }
    if (weakly_better && strictly_somewhere) result.solver = s;
  }
  for (VerifierStrategy v : kVerifierStrategies) {
    bool weakly_better = true;
    bool strictly_somewhere = false;
    for (SolverStrategy s : kSolverStrategies) {
      const std::int64_t mine = matrix.at(s, v).verifier;
      const std::int64_t theirs = matrix.at(s, other(v)).verifier;
      if (mine < theirs) weakly_better = false;
      if (mine > theirs) strictly_somewhere = true;
    }
    if (weakly_better && strictly_somewhere) result.verifier = v;
  }
  return result;
}

std::vector<StrategyProfile> nash_equilibria(const PayoffMatrix& matrix) {
  std::vector<StrategyProfile> equilibria;
  for (SolverStrategy s : kSolverStrategies) {
    for (VerifierStrategy v : kVerifierStrategies) {
      const bool solver_deviates =
          matrix.at(other(s), v).solver > matrix.at(s, v).solver;
      const bool verifier_deviates =
          matrix.at(s, other(v)).verifier > matrix.at(s, v).verifier;
      if (!solver_deviates && !verifier_deviates) {
        equilibria.push_back(StrategyProfile{s, v});
      }
    }
  }
  return equilibria;
}

std::vector<StrategyProfile> pareto_efficient(const PayoffMatrix& matrix) {
  std::vector<StrategyProfile> efficient;
  for (SolverStrategy s : kSolverStrategies) {
    for (VerifierStrategy v : kVerifierStrategies) {
      const Payoff mine = matrix.at(s, v);
      bool dominated = false;
      for (SolverStrategy s2 : kSolverStrategies) {
        for (VerifierStrategy v2 : kVerifierStrategies) {
          const Payoff theirs = matrix.at(s2, v2);
          if (theirs.solver > mine.solver && theirs.verifier > mine.verifier) {
            dominated = true;
          }
        }
      }
      if (!dominated) efficient.push_back(StrategyProfile{s, v});
    }
  }
  return efficient;
}

double expected_utility(std::span<const double> values,
                        std::span<const double> probs) {
  if (values.size() != probs.size()) {
    throw std::invalid_argument("expected_utility: length mismatch");
  }
  double sum = 0.0;
  double utility = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) {
      throw std::invalid_argument("expected_utility: negative probability");
    }
    sum += probs[i];
    utility += probs[i] * values[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("expected_utility: probabilities must sum to 1");
  }
  return utility;
}

std::ostream& operator<<(std::ostream& out, const PayoffMatrix& matrix) {
  out << "payoff matrix (solver, verifier): fee " << matrix.fee() << ", n "
      << matrix.verifier_count() << ", deposit " << matrix.deposit() << '\n';
  for (SolverStrategy s : kSolverStrategies) {
    for (VerifierStrategy v : kVerifierStrategies) {
      const Payoff p = matrix.at(s, v);
      out << "  (" << to_string(s) << ", " << to_string(v) << "): S=" << p.solver
          << " V=" << p.verifier << '\n';
    }
  }
  return out;
}

}  // namespace verisim
