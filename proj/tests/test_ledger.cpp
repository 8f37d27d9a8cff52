#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "verisim/ledger.hpp"
#include "verisim/rng.hpp"

using namespace verisim;

TEST_CASE("open_account creates a funded deposit with zero balance") {
  Ledger ledger;
  const Address addr = ledger.open_account(100);
  CHECK(ledger.account(addr).deposit == 100);
  CHECK(ledger.account(addr).balance == 0);
  CHECK(ledger.account(addr).excluded == false);
}

TEST_CASE("open_account rejects a deposit below the minimum") {
  Ledger ledger(LedgerConfig{1, GasSchedule{}});
  CHECK_THROWS_AS(ledger.open_account(0), std::invalid_argument);
}

TEST_CASE("open_account returns distinct addresses") {
  Ledger ledger;
  const Address first = ledger.open_account(5);
  const Address second = ledger.open_account(5);
  CHECK(first != second);
}

TEST_CASE("escrow moves the fee out of the user balance") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 60);
  const EscrowHandle escrow = ledger.escrow_fee(user, 60);
  CHECK(ledger.account(user).balance == 0);
  CHECK(ledger.escrow_balance(escrow) == 60);
}

TEST_CASE("escrow rejects an underfunded user") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 10);
  CHECK_THROWS_AS(ledger.escrow_fee(user, 60), std::invalid_argument);
}

TEST_CASE("full payout exhausts the escrow") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 60);
  const EscrowHandle escrow = ledger.escrow_fee(user, 60);

  Address recipients[3];
  for (Address& r : recipients) r = ledger.open_account(1);
  for (Address r : recipients) ledger.payout(escrow, r, 20, Phase::Settle);

  CHECK(ledger.escrow_balance(escrow) == 0);
  for (Address r : recipients) CHECK(ledger.account(r).balance == 20);
}

TEST_CASE("escrow overdraw is a hard failure") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 60);
  const EscrowHandle escrow = ledger.escrow_fee(user, 60);
  CHECK_THROWS_AS(ledger.payout(escrow, user, 61, Phase::Settle), std::logic_error);
}

TEST_CASE("payout to an excluded account is still permitted") {
  // Exclusion bars future participation, not settlement.
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 30);
  const EscrowHandle escrow = ledger.escrow_fee(user, 30);
  const Address service = ledger.open_account(100);
  ledger.slash(service);
  ledger.payout(escrow, service, 30, Phase::Settle);
  CHECK(ledger.account(service).balance == 30);
}

TEST_CASE("slash destroys the deposit and excludes the account") {
  Ledger ledger;
  const Address service = ledger.open_account(100);
  ledger.slash(service);
  CHECK(ledger.account(service).deposit == 0);
  CHECK(ledger.account(service).excluded);
  CHECK(ledger.destroyed_total() == 100);
}

TEST_CASE("double slash is a warned no-op") {
  Ledger ledger;
  const Address service = ledger.open_account(100);
  ledger.slash(service);
  const auto events_before = ledger.events().size();
  ledger.slash(service);
  CHECK(ledger.events().size() == events_before);
  CHECK(ledger.destroyed_total() == 100);
  CHECK(ledger.warnings().size() == 1);
}

TEST_CASE("meter accumulates the scheduled cost") {
  Ledger ledger;
  CHECK(ledger.meter(GasKind::JudgeInvocation, Phase::Dispute) == 50);
  CHECK(ledger.gas().total() == 50);
  ledger.meter(GasKind::StorageWrite, Phase::Settle);
  ledger.meter(GasKind::StorageWrite, Phase::Settle);
  CHECK(ledger.gas().total() == 50 + 40);
  CHECK(ledger.gas().phase(Phase::Settle) == 40);
}

TEST_CASE("per-phase gas sums to the total over arbitrary sequences") {
  Ledger ledger;
  Rng rng(7);
  Gas previous_total = 0;
  for (int i = 0; i < 500; ++i) {
    const auto kind = static_cast<GasKind>(rng.next_below(6));
    const auto phase = static_cast<Phase>(rng.next_below(kPhaseCount));
    ledger.meter(kind, phase);
    CHECK(ledger.gas().total() >= previous_total);  // monotone
    previous_total = ledger.gas().total();
  }
  Gas sum = 0;
  for (std::size_t p = 0; p < kPhaseCount; ++p) {
    sum += ledger.gas().phase(static_cast<Phase>(p));
  }
  CHECK(sum == ledger.gas().total());
}

TEST_CASE("gas schedule rejects zero costs") {
  GasSchedule schedule;
  schedule.comparison = 0;
  CHECK_THROWS_AS(schedule.validate(), std::invalid_argument);
}

TEST_CASE("conservation holds through a mixed event sequence") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 100);
  const Address service = ledger.open_account(50);
  const EscrowHandle escrow = ledger.escrow_fee(user, 80);
  ledger.payout(escrow, service, 30, Phase::Settle);
  ledger.slash(service);
  ledger.payout(escrow, user, 50, Phase::Settle);

  // 1 + 100 + 50 minted; recompute by hand.
  CHECK(ledger.minted_total() == 151);
  CHECK(ledger.account(user).balance == 70);
  CHECK(ledger.account(service).balance == 30);
  CHECK(ledger.destroyed_total() == 50);
  ledger.audit_conservation();
}

TEST_CASE("event log serializes one phase,kind,from,to,amount line per event") {
  Ledger ledger;
  const Address user = ledger.open_account(1);
  ledger.fund(user, 60);
  const EscrowHandle escrow = ledger.escrow_fee(user, 60);
  const Address service = ledger.open_account(100);
  ledger.payout(escrow, service, 60, Phase::Settle);
  ledger.slash(service);

  std::ostringstream out;
  ledger.dump_events(out);
  CHECK(out.str() ==
        "setup,deposit,-,0,1\n"
        "setup,transfer,-,0,60\n"
        "request,escrow,0,escrow,60\n"
        "setup,deposit,-,1,100\n"
        "settle,payout,escrow,1,60\n"
        "settle,slash,1,-,100\n");
}
