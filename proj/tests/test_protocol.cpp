#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"
#include "verisim/protocol.hpp"
#include "verisim/rng.hpp"

using namespace verisim;
using verisim::testing::run_scenario;

namespace {

constexpr BehaviorKind H = BehaviorKind::Honest;
constexpr BehaviorKind D = BehaviorKind::CollusiveDishonest;

Currency sum_payouts(const Outcome& outcome) {
  Currency total = 0;
  for (const auto& [addr, amount] : outcome.payouts) total += amount;
  return total;
}

bool was_slashed(const Outcome& outcome, Address addr) {
  return std::find(outcome.slashed.begin(), outcome.slashed.end(), addr) !=
         outcome.slashed.end();
}

}  // namespace

TEST_CASE("fee policy charges base + per_step * steps + per_verifier * n") {
  const FeePolicy policy;  // defaults: 40 / 2 / 20
  CHECK(policy.fee_for(12345, 6789, 2) == 40 + 2 * 17 + 20 * 2);
  CHECK(policy.fee_for(5, 0, 1) == 40 + 2 * 1 + 20 * 1);

  // The closed-form step count must track the actual decomposition size.
  Rng rng(91);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t b = rng.next_below(1ULL << 32);
    const Currency fee = policy.fee_for(1, b, 1);
    CHECK(fee == 40 + 2 * decompose(1, b).size() + 20);
  }
}

TEST_CASE("split_fee divides evenly with the remainder to the solver") {
  CHECK(split_fee(60, 2) == std::vector<Currency>{20, 20, 20});
  CHECK(split_fee(61, 2) == std::vector<Currency>{21, 20, 20});
  CHECK_THROWS_AS(split_fee(2, 2), std::invalid_argument);
}

TEST_CASE("compare_roots flags exactly the differing verifiers") {
  const CompareResult all_equal = compare_roots(12, {12, 12, 12});
  CHECK_FALSE(all_equal.dispute_needed);

  const CompareResult one_differs = compare_roots(12, {12, 13, 12});
  CHECK(one_differs.dispute_needed);
  CHECK(one_differs.stances ==
        std::vector<Stance>{Stance::Accept, Stance::Challenge, Stance::Accept});

  // Stances depend only on each verifier's own root, not on order.
  const CompareResult permuted = compare_roots(12, {13, 12, 12});
  CHECK(permuted.stances ==
        std::vector<Stance>{Stance::Challenge, Stance::Accept, Stance::Accept});
}

TEST_CASE("case 1: correct solution accepted by everyone") {
  const auto scenario = run_scenario({H, H, H}, 3, 4, 60);
  const Outcome& outcome = scenario.outcome;
  CHECK(outcome.kind == Case::CorrectAccepted);
  CHECK(outcome.accepted_value == 12);
  CHECK(outcome.correct);
  CHECK(outcome.payouts.at(scenario.roles.solver.address.id) == 20);
  for (const ComputationService& v : scenario.roles.verifiers) {
    CHECK(outcome.payouts.at(v.address.id) == 20);
  }
  CHECK(outcome.slashed.empty());
  CHECK_FALSE(outcome.dispute.has_value());
  CHECK(outcome.gas.phase(Phase::Dispute) == 0);
}

TEST_CASE("case 2: wrong challenger forfeits its share to the solver") {
  const auto scenario = run_scenario({H, H, D}, 3, 4, 60);
  const Outcome& outcome = scenario.outcome;
  CHECK(outcome.kind == Case::CorrectChallenged);
  CHECK(outcome.accepted_value == 12);
  CHECK(outcome.payouts.at(scenario.roles.solver.address.id) == 40);
  CHECK(outcome.payouts.at(scenario.roles.verifiers[0].address.id) == 20);
  CHECK(outcome.payouts.count(scenario.roles.verifiers[1].address.id) == 0);
  CHECK(outcome.verdict == Decision::SolverCorrect);
  REQUIRE(outcome.slashed.size() == 1);
  CHECK(outcome.slashed[0] == scenario.roles.verifiers[1].address);
  CHECK(scenario.ledger.account(outcome.slashed[0]).excluded);
}

TEST_CASE("case 2 without challenger slashing keeps the deposit") {
  ProtocolFlags flags;
  flags.slash_wrong_challengers = false;
  const auto scenario = run_scenario({H, H, D}, 3, 4, 60, flags);
  CHECK(scenario.outcome.kind == Case::CorrectChallenged);
  CHECK(scenario.outcome.slashed.empty());
  CHECK(scenario.outcome.payouts.count(scenario.roles.verifiers[1].address.id) == 0);
}

TEST_CASE("case 3: unanimous collusion is accepted as false") {
  const auto scenario = run_scenario({D, D, D}, 3, 4, 60);
  const Outcome& outcome = scenario.outcome;
  CHECK(outcome.kind == Case::FalseAccepted);
  REQUIRE(outcome.accepted_value.has_value());
  CHECK(*outcome.accepted_value != 12);
  CHECK_FALSE(outcome.correct);
  CHECK(sum_payouts(outcome) == 60);
  CHECK(outcome.payouts.at(scenario.roles.solver.address.id) == 20);
  CHECK(outcome.slashed.empty());
  CHECK(outcome.gas.phase(Phase::Dispute) == 0);
}

TEST_CASE("case 4: honest challenger collects the forfeited shares") {
  const auto scenario = run_scenario({D, H, D}, 3, 4, 60);
  const Outcome& outcome = scenario.outcome;
  CHECK(outcome.kind == Case::FalseChallenged);
  CHECK_FALSE(outcome.accepted_value.has_value());  // the user gets no solution
  CHECK(outcome.verdict == Decision::SolverFalse);
  CHECK(outcome.payouts.at(scenario.roles.verifiers[0].address.id) == 60);
  CHECK(was_slashed(outcome, scenario.roles.solver.address));
  CHECK(was_slashed(outcome, scenario.roles.verifiers[1].address));
  CHECK_FALSE(was_slashed(outcome, scenario.roles.verifiers[0].address));
}

TEST_CASE("case 4 splits forfeited shares with remainder to the first challenger") {
  // Solver and one accepter forfeit 2*15 = 30 over 2 challengers at fee 60/n=3.
  const auto scenario = run_scenario({D, H, H, D}, 7, 9, 60);
  const Outcome& outcome = scenario.outcome;
  CHECK(outcome.kind == Case::FalseChallenged);
  CHECK(outcome.payouts.at(scenario.roles.verifiers[0].address.id) == 30);
  CHECK(outcome.payouts.at(scenario.roles.verifiers[1].address.id) == 30);
  CHECK(sum_payouts(outcome) == 60);

  // Odd forfeit: fee 61 gives solver share 16, verifier shares 15; the first
  // challenger takes the extra unit.
  const auto odd = run_scenario({D, H, H, D}, 7, 9, 61);
  CHECK(odd.outcome.payouts.at(odd.roles.verifiers[0].address.id) == 31);
  CHECK(odd.outcome.payouts.at(odd.roles.verifiers[1].address.id) == 30);
  CHECK(sum_payouts(odd.outcome) == 61);
}

TEST_CASE("escrow exhausts over all behavior combinations up to n=3") {
  Rng rng(59);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::uint32_t mask = 0; mask < (1U << (n + 1)); ++mask) {
      std::vector<BehaviorKind> kinds;
      for (std::size_t i = 0; i <= n; ++i) {
        kinds.push_back((mask >> i) & 1U ? D : H);
      }
      const std::uint64_t a = rng.next_below(1ULL << 20);
      const std::uint64_t b = rng.next_below((1ULL << 20) - 1) + 1;
      const Currency fee = 60 + rng.next_below(40);
      const auto scenario = run_scenario(kinds, a, b, fee);

      REQUIRE(sum_payouts(scenario.outcome) == fee);
      scenario.ledger.audit_conservation();

      // Dispute iff the assignment mixes behaviors.
      const bool mixed = mask != 0 && mask != (1U << (n + 1)) - 1;
      REQUIRE(scenario.outcome.dispute.has_value() == mixed);

      // No honest service is ever slashed.
      for (Address addr : scenario.outcome.slashed) {
        const bool solver_slot = addr == scenario.roles.solver.address;
        if (solver_slot) {
          REQUIRE(scenario.roles.solver.behavior.dishonest());
        } else {
          for (std::size_t i = 0; i < scenario.roles.verifiers.size(); ++i) {
            if (scenario.roles.verifiers[i].address == addr) {
              REQUIRE(scenario.roles.verifiers[i].behavior.dishonest());
            }
          }
        }
      }
    }
  }
}

TEST_CASE("detection is complete with at least one honest verifier") {
  const auto scenario = run_scenario({D, H}, 12345, 6789, 60);
  CHECK(scenario.outcome.kind == Case::FalseChallenged);
  CHECK(scenario.outcome.verdict == Decision::SolverFalse);
  CHECK_FALSE(scenario.outcome.accepted_value.has_value());
}

TEST_CASE("gas decomposes by phase") {
  const auto scenario = run_scenario({D, H, D}, 12345, 6789, 60);
  const GasMeter& gas = scenario.outcome.gas;
  Gas sum = 0;
  for (std::size_t p = 0; p < kPhaseCount; ++p) {
    sum += gas.phase(static_cast<Phase>(p));
  }
  CHECK(sum == gas.total());
  CHECK(gas.phase(Phase::Dispute) > 0);

  const GasSchedule schedule;  // defaults
  CHECK(gas.phase(Phase::Report) ==
        3 * (schedule.transaction_base + schedule.storage_write));
  CHECK(gas.phase(Phase::Compare) == 2 * schedule.comparison);
}

TEST_CASE("run_request is deterministic given request, pool and seed") {
  auto execute = [] {
    Ledger ledger;
    ServicePool pool;
    Rng rng(77);
    pool = populate_pool(16, 0.5, 100, CorruptionSite::UniformInternal, ledger, rng);
    const Address user = ledger.open_account(1);
    ledger.fund(user, 90);
    const ComputationRequest request{12345, 6789, 2, 90, 4242};
    const Outcome outcome = run_request(request, pool, ledger, user);
    std::ostringstream text;
    text << outcome;
    return text.str();
  };
  CHECK(execute() == execute());
}

TEST_CASE("starvation aborts the run and refunds the fee") {
  Ledger ledger;
  ServicePool pool;
  Rng rng(7);
  pool = populate_pool(3, 0.0, 100, CorruptionSite::UniformInternal, ledger, rng);
  for (const ComputationService& s : pool.services) ledger.slash(s.address);

  const Address user = ledger.open_account(1);
  ledger.fund(user, 80);
  const ComputationRequest request{3, 4, 2, 80, 1};
  const Outcome outcome = run_request(request, pool, ledger, user);
  CHECK(outcome.kind == Case::Aborted);
  CHECK(ledger.account(user).balance == 80);
  ledger.audit_conservation();
}

TEST_CASE("run_request validates the request") {
  Ledger ledger;
  ServicePool pool;
  Rng rng(7);
  pool = populate_pool(4, 0.0, 100, CorruptionSite::UniformInternal, ledger, rng);
  const Address user = ledger.open_account(1);
  ledger.fund(user, 10);

  CHECK_THROWS_AS(run_request({3, 4, 2, 2, 1}, pool, ledger, user),
                  std::invalid_argument);  // fee < n+1
  CHECK_THROWS_AS(run_request({3, 4, 2, 80, 1}, pool, ledger, user),
                  std::invalid_argument);  // underfunded user
}

TEST_CASE("excluded services never reappear within an experiment ledger") {
  Ledger ledger;
  ServicePool pool;
  Rng rng(15);
  pool = populate_pool(8, 0.0, 100, CorruptionSite::UniformInternal, ledger, rng);
  const Address slashed = pool.services[0].address;
  ledger.slash(slashed);
  for (int i = 0; i < 200; ++i) {
    const RoleAssignment roles = assign_roles(pool, 3, ledger, rng);
    CHECK(roles.solver.address != slashed);
    for (const ComputationService& v : roles.verifiers) {
      CHECK(v.address != slashed);
    }
  }
}
