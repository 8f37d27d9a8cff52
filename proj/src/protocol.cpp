#include "verisim/protocol.hpp"

#include <bit>
#include <ostream>
#include <stdexcept>

namespace verisim {

namespace {

std::size_t step_count(std::uint64_t b) {
  // m leaves + m shifts + m-1 adds for m = popcount(b); single leaf for b=0.
  const int m = std::popcount(b);
  return b == 0 ? 1 : static_cast<std::size_t>(3 * m - 1);
}

}  // namespace

Currency FeePolicy::fee_for(std::uint64_t a, std::uint64_t b, std::size_t n) const {
  (void)a;  // operand size is fixed by the word width; b drives the step count
  return base + per_step * step_count(b) + per_verifier * n;
}

std::vector<Currency> split_fee(Currency fee, std::size_t n) {
  const Currency parties = n + 1;
  if (fee < parties) {
    throw std::invalid_argument("split_fee: fee must be at least n+1");
  }
  std::vector<Currency> shares(parties, fee / parties);
  shares[0] += fee % parties;  // remainder to the solver
  return shares;
}

CompareResult compare_roots(std::uint64_t solver_root,
                            const std::vector<std::uint64_t>& verifier_roots) {
  CompareResult result;
  result.stances.reserve(verifier_roots.size());
  for (std::uint64_t root : verifier_roots) {
    const Stance stance = verifier_stance(root, solver_root);
    result.stances.push_back(stance);
    if (stance == Stance::Challenge) result.dispute_needed = true;
  }
  return result;
}

const char* to_string(Case c) {
  switch (c) {
    case Case::CorrectAccepted: return "CorrectAccepted";
    case Case::CorrectChallenged: return "CorrectChallenged";
    case Case::FalseAccepted: return "FalseAccepted";
    case Case::FalseChallenged: return "FalseChallenged";
    case Case::Aborted: return "Aborted";
  }
  throw std::logic_error("unknown case");
}

const char* to_string(Stance s) {
  return s == Stance::Accept ? "accept" : "challenge";
}

const char* to_string(Decision d) {
  return d == Decision::SolverCorrect ? "SolverCorrect" : "SolverFalse";
}

Outcome run_assigned(const ComputationRequest& request,
                     const RoleAssignment& roles, Ledger& ledger,
                     EscrowHandle escrow, const ProtocolFlags& flags) {
  const std::size_t n = roles.verifiers.size();
  if (n != request.n) throw std::invalid_argument("run_assigned: role count mismatch");
  if (n < 1) throw std::invalid_argument("run_assigned: need at least one verifier");

  Outcome outcome;
  outcome.request = request;
  outcome.solver = roles.solver.address;
  for (const ComputationService& v : roles.verifiers) {
    outcome.verifiers.push_back(v.address);
  }

  const SolutionRequest solution_request{request.a, request.b, request.seed};
  const std::uint64_t true_value = request.a * request.b;

  // Report: the oracle hop to each service plus storage of its root.
  const TraceTree solver_tree = produce_solution(roles.solver, solution_request);
  ledger.meter(GasKind::TransactionBase, Phase::Report);
  ledger.meter(GasKind::StorageWrite, Phase::Report);
  const std::uint64_t solver_root = solver_tree.root_value();

  std::vector<TraceTree> verifier_trees;
  std::vector<std::uint64_t> reported_roots;
  verifier_trees.reserve(n);
  reported_roots.reserve(n);
  for (const ComputationService& verifier : roles.verifiers) {
    TraceTree tree = produce_solution(verifier, solution_request);
    std::uint64_t reported = tree.root_value();
    if (reported != solver_root && verifier.behavior.dishonest() &&
        !flags.dishonest_verifier_challenges) {
      reported = solver_root;  // mimic instead of exposing its own value
    }
    ledger.meter(GasKind::TransactionBase, Phase::Report);
    ledger.meter(GasKind::StorageWrite, Phase::Report);
    reported_roots.push_back(reported);
    verifier_trees.push_back(std::move(tree));
  }

  // Compare: arbiter checks each verifier root against the solver's.
  for (std::size_t i = 0; i < n; ++i) {
    ledger.meter(GasKind::Comparison, Phase::Compare);
  }
  const CompareResult comparison = compare_roots(solver_root, reported_roots);
  outcome.stances = comparison.stances;

  std::vector<std::size_t> challengers;
  std::vector<std::size_t> accepters;
  for (std::size_t i = 0; i < n; ++i) {
    (comparison.stances[i] == Stance::Challenge ? challengers : accepters).push_back(i);
  }

  // Dispute: the solver publishes its trace once; each challenging pair runs
  // its own bisection; one judge ruling settles the isolated step.
  if (!challengers.empty()) {
    for (std::size_t s = 0; s < solver_tree.size(); ++s) {
      ledger.meter(GasKind::StorageWrite, Phase::Dispute);
    }
    for (std::size_t i : challengers) {
      const Disagreement d = bisect(solver_tree, verifier_trees[i]);
      for (std::uint32_t q = 0; q < d.judge_queries; ++q) {
        ledger.meter(GasKind::DisputeStep, Phase::Dispute);
      }
      const Verdict v = judge_step(d, request.a, request.b);
      if (!outcome.dispute) {
        outcome.dispute = d;
        outcome.verdict = v.decision;
      } else if (*outcome.verdict != v.decision) {
        throw std::logic_error("run_assigned: challenger verdicts disagree");
      }
    }
    ledger.meter(GasKind::JudgeInvocation, Phase::Dispute);
  }

  // Settle per the four cases.
  const bool solver_correct = solver_root == true_value;
  const std::vector<Currency> shares = split_fee(request.fee, n);

  auto pay = [&](Address to, Currency amount) {
    if (amount == 0) return;
    ledger.payout(escrow, to, amount, Phase::Settle);
    ledger.meter(GasKind::StorageWrite, Phase::Settle);
    outcome.payouts[to.id] += amount;
  };
  auto punish = [&](Address addr) {
    ledger.slash(addr);
    ledger.meter(GasKind::StorageWrite, Phase::Settle);
    outcome.slashed.push_back(addr);
  };

  if (challengers.empty()) {
    // Case 1 or 3: everyone receives their share.
    outcome.kind = solver_correct ? Case::CorrectAccepted : Case::FalseAccepted;
    outcome.accepted_value = solver_root;
    pay(roles.solver.address, shares[0]);
    for (std::size_t i = 0; i < n; ++i) pay(roles.verifiers[i].address, shares[i + 1]);
  } else if (solver_correct) {
    // Case 2: solver keeps its share and collects every challenger's.
    outcome.kind = Case::CorrectChallenged;
    outcome.accepted_value = solver_root;
    Currency solver_amount = shares[0];
    for (std::size_t i : challengers) solver_amount += shares[i + 1];
    pay(roles.solver.address, solver_amount);
    for (std::size_t i : accepters) pay(roles.verifiers[i].address, shares[i + 1]);
    if (flags.slash_wrong_challengers) {
      for (std::size_t i : challengers) punish(roles.verifiers[i].address);
    }
  } else {
    // Case 4: solver and accepters forfeit to the challengers; the user gets
    // no solution.
    outcome.kind = Case::FalseChallenged;
    Currency forfeited = shares[0];
    for (std::size_t i : accepters) forfeited += shares[i + 1];
    const Currency per_challenger = forfeited / challengers.size();
    const Currency remainder = forfeited % challengers.size();
    for (std::size_t j = 0; j < challengers.size(); ++j) {
      const std::size_t i = challengers[j];
      pay(roles.verifiers[i].address,
          shares[i + 1] + per_challenger + (j == 0 ? remainder : 0));
    }
    punish(roles.solver.address);
    for (std::size_t i : accepters) punish(roles.verifiers[i].address);
  }

  if (ledger.escrow_balance(escrow) != 0) {
    throw std::logic_error("run_assigned: escrow not exhausted");
  }
  outcome.correct = outcome.accepted_value && *outcome.accepted_value == true_value;
  outcome.gas = ledger.gas();
  return outcome;
}

Outcome run_request(const ComputationRequest& request, const ServicePool& pool,
                    Ledger& ledger, Address user, const ProtocolFlags& flags) {
  if (request.n < 1) throw std::invalid_argument("run_request: n must be >= 1");
  if (request.fee < request.n + 1) {
    throw std::invalid_argument("run_request: fee must be at least n+1");
  }

  // Escrow before anything else; an underfunded user aborts the run here.
  ledger.meter(GasKind::TransactionBase, Phase::Request);
  ledger.meter(GasKind::StorageWrite, Phase::Request);
  const EscrowHandle escrow = ledger.escrow_fee(user, request.fee);

  std::size_t eligible = 0;
  for (const ComputationService& s : pool.services) {
    if (!ledger.excluded(s.address)) ++eligible;
  }
  if (eligible < request.n + 1) {
    // Starvation: refund and record the aborted run.
    ledger.payout(escrow, user, request.fee, Phase::Settle);
    ledger.meter(GasKind::StorageWrite, Phase::Settle);
    Outcome outcome;
    outcome.request = request;
    outcome.kind = Case::Aborted;
    outcome.payouts[user.id] = request.fee;
    outcome.gas = ledger.gas();
    return outcome;
  }

  Rng rng(request.seed);
  const RoleAssignment roles = assign_roles(pool, request.n, ledger, rng);
  return run_assigned(request, roles, ledger, escrow, flags);
}

std::ostream& operator<<(std::ostream& out, const Outcome& outcome) {
  out << "case: " << to_string(outcome.kind) << '\n';
  out << "accepted_value: ";
  if (outcome.accepted_value) {
    out << *outcome.accepted_value;
  } else {
    out << "none";
  }
  out << '\n';
  out << "correct: " << (outcome.correct ? "true" : "false") << '\n';
  if (outcome.kind != Case::Aborted) {
    out << "solver: " << outcome.solver.id << '\n';
    out << "verifiers:";
    for (std::size_t i = 0; i < outcome.verifiers.size(); ++i) {
      out << ' ' << outcome.verifiers[i].id << '='
          << to_string(outcome.stances[i]);
    }
    out << '\n';
  }
  out << "payouts:\n";
  for (const auto& [id, amount] : outcome.payouts) {
    out << "  " << id << ": " << amount << '\n';
  }
  out << "slashed:";
  if (outcome.slashed.empty()) out << " none";
  for (Address a : outcome.slashed) out << ' ' << a.id;
  out << '\n';
  out << "gas:\n";
  for (std::size_t p = 0; p < kPhaseCount; ++p) {
    const auto phase = static_cast<Phase>(p);
    out << "  " << to_string(phase) << ": " << outcome.gas.phase(phase) << '\n';
  }
  out << "  total: " << outcome.gas.total() << '\n';
  out << "dispute: ";
  if (outcome.dispute) {
    const Disagreement& d = *outcome.dispute;
    out << "step(" << d.step_id.level << ',' << d.step_id.index << ") op="
        << to_string(d.op) << " solver=" << d.solver_claim
        << " challenger=" << d.challenger_claim
        << " queries=" << d.judge_queries
        << " verdict=" << to_string(*outcome.verdict) << '\n';
  } else {
    out << "none\n";
  }
  return out;
}

}  // namespace verisim
