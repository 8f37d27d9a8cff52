#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "verisim/actors.hpp"
#include "verisim/ledger.hpp"
#include "verisim/trace.hpp"

namespace verisim {

struct ComputationRequest {
  std::uint64_t a{0};
  std::uint64_t b{0};
  std::size_t n{1};      // verifier count, >= 1
  Currency fee{0};       // >= n+1 so every share is at least one unit
  std::uint64_t seed{0};
};

/// fee = base + per_step * #steps + per_verifier * n
struct FeePolicy {
  Currency base{40};
  Currency per_step{2};
  Currency per_verifier{20};

  Currency fee_for(std::uint64_t a, std::uint64_t b, std::size_t n) const;
};

struct ProtocolFlags {
  /// Case 2: challengers of a correct solution had their claim judged false;
  /// when set they lose their deposit like any other detected cheater.
  bool slash_wrong_challengers{true};
  /// Whether a dishonest verifier facing a differing (correct) solver root
  /// reports its own value (challenges) or mimics the solver's.
  bool dishonest_verifier_challenges{true};
};

/// Equal split into n+1 shares, remainder to the solver (index 0).
std::vector<Currency> split_fee(Currency fee, std::size_t n);

struct CompareResult {
  std::vector<Stance> stances;  // one per verifier, role order
  bool dispute_needed{false};
};

/// Arbiter-side comparison of the reported roots.
CompareResult compare_roots(std::uint64_t solver_root,
                            const std::vector<std::uint64_t>& verifier_roots);

/// Table-1 cases plus the starvation abort.
enum class Case : std::uint8_t {
  CorrectAccepted,
  CorrectChallenged,
  FalseAccepted,
  FalseChallenged,
  Aborted,
};

const char* to_string(Case c);
const char* to_string(Stance s);
const char* to_string(Decision d);

/// Full record of one protocol run.
struct Outcome {
  ComputationRequest request;
  Case kind{Case::Aborted};
  std::optional<std::uint64_t> accepted_value;
  bool correct{false};
  Address solver{};
  std::vector<Address> verifiers;
  std::vector<Stance> stances;
  std::map<std::uint32_t, Currency> payouts;  // address id -> amount
  std::vector<Address> slashed;
  GasMeter gas;
  std::optional<Disagreement> dispute;  // representative (all agree)
  std::optional<Decision> verdict;
};

std::ostream& operator<<(std::ostream& out, const Outcome& outcome);

/// Deterministic core: report, compare, dispute, settle for an already
/// assigned set of roles. The fee must already sit in `escrow`.
Outcome run_assigned(const ComputationRequest& request,
                     const RoleAssignment& roles, Ledger& ledger,
                     EscrowHandle escrow, const ProtocolFlags& flags = {});

/// One full request: fee escrow, random role assignment, then run_assigned.
/// Starvation (fewer than n+1 eligible services) aborts the run and refunds
/// the escrowed fee to the user.
Outcome run_request(const ComputationRequest& request, const ServicePool& pool,
                    Ledger& ledger, Address user,
                    const ProtocolFlags& flags = {});

}  // namespace verisim
