#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "verisim/protocol.hpp"

namespace verisim {

enum class SolverStrategy : std::uint8_t { Correct, False };
enum class VerifierStrategy : std::uint8_t { Challenge, Accept };

const char* to_string(SolverStrategy s);
const char* to_string(VerifierStrategy v);

/// All verifiers play the same strategy; four profiles total.
struct StrategyProfile {
  SolverStrategy solver{SolverStrategy::Correct};
  VerifierStrategy verifier{VerifierStrategy::Accept};

  friend bool operator==(StrategyProfile, StrategyProfile) = default;
};

/// Net payoffs in currency units; a destroyed deposit enters as a negative
/// term. The verifier entry is the first verifier in role order (the one a
/// redistribution remainder lands on).
struct Payoff {
  std::int64_t solver{0};
  std::int64_t verifier{0};

  friend bool operator==(Payoff, Payoff) = default;
};

class PayoffMatrix {
 public:
  PayoffMatrix(Currency fee, std::size_t n, Currency deposit, Payoff cells[2][2]);

  const Payoff& at(SolverStrategy s, VerifierStrategy v) const {
    return cells_[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
  }
  Currency fee() const { return fee_; }
  std::size_t verifier_count() const { return n_; }
  Currency deposit() const { return deposit_; }

 private:
  Currency fee_;
  std::size_t n_;
  Currency deposit_;
  Payoff cells_[2][2];
};

std::ostream& operator<<(std::ostream& out, const PayoffMatrix& matrix);

/// Derives the 2x2 matrix from the fee-split and slashing rules alone; the
/// protocol's run_request is the independent cross-check, not an input.
PayoffMatrix build_matrix(Currency fee, std::size_t n, Currency deposit,
                          const ProtocolFlags& flags = {});

struct DominanceResult {
  std::optional<SolverStrategy> solver;
  std::optional<VerifierStrategy> verifier;
};

/// Weak dominance: at least as good against both opponent strategies and
/// strictly better against at least one.
DominanceResult dominant_strategies(const PayoffMatrix& matrix);

/// Pure-strategy equilibria under weak best response: no player gains
/// strictly by unilateral deviation.
std::vector<StrategyProfile> nash_equilibria(const PayoffMatrix& matrix);

/// Profiles not strictly dominated in both coordinates by another profile.
std::vector<StrategyProfile> pareto_efficient(const PayoffMatrix& matrix);

/// Expected utility sum(p_i * v_i). Probabilities must be non-negative and
/// sum to 1 within 1e-9.
double expected_utility(std::span<const double> values,
                        std::span<const double> probs);

}  // namespace verisim
