#include "verisim/ledger.hpp"

#include <ostream>
#include <stdexcept>

namespace verisim {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Setup: return "setup";
    case Phase::Request: return "request";
    case Phase::Roles: return "roles";
    case Phase::Report: return "report";
    case Phase::Compare: return "compare";
    case Phase::Dispute: return "dispute";
    case Phase::Settle: return "settle";
  }
  throw std::logic_error("unknown phase");
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Transfer: return "transfer";
    case EventKind::Deposit: return "deposit";
    case EventKind::Slash: return "slash";
    case EventKind::Escrow: return "escrow";
    case EventKind::Payout: return "payout";
  }
  throw std::logic_error("unknown event kind");
}

Gas GasSchedule::cost(GasKind kind) const {
  switch (kind) {
    case GasKind::TransactionBase: return transaction_base;
    case GasKind::StorageWrite: return storage_write;
    case GasKind::Comparison: return comparison;
    case GasKind::JudgeInvocation: return judge_invocation;
    case GasKind::DisputeStep: return dispute_step;
    case GasKind::RoleAssignment: return role_assignment;
  }
  throw std::logic_error("gas schedule: unknown op kind");
}

void GasSchedule::validate() const {
  const Gas costs[] = {transaction_base, storage_write,  comparison,
                       judge_invocation, dispute_step,   role_assignment};
  for (Gas c : costs) {
    if (c == 0) throw std::invalid_argument("gas schedule: all costs must be > 0");
  }
}

Gas GasMeter::charge(const GasSchedule& schedule, GasKind kind, Phase phase) {
  const Gas cost = schedule.cost(kind);
  total_ += cost;
  per_phase_[static_cast<std::size_t>(phase)] += cost;
  return cost;
}

Ledger::Ledger(LedgerConfig config) : config_(config) {
  config_.gas.validate();
}

Address Ledger::open_account(Currency deposit) {
  if (deposit < config_.min_deposit) {
    throw std::invalid_argument("open_account: deposit below configured minimum");
  }
  const Address addr{static_cast<std::uint32_t>(accounts_.size())};
  accounts_.push_back(Account{addr, 0, deposit, false});
  minted_ += deposit;
  log(Phase::Setup, EventKind::Deposit, kNoParty, addr.id, deposit);
  return addr;
}

void Ledger::fund(Address addr, Currency amount) {
  if (amount == 0) throw std::invalid_argument("fund: amount must be > 0");
  account_mut(addr).balance += amount;
  minted_ += amount;
  log(Phase::Setup, EventKind::Transfer, kNoParty, addr.id, amount);
}

const Account& Ledger::account(Address addr) const {
  if (addr.id >= accounts_.size()) throw std::invalid_argument("unknown address");
  return accounts_[addr.id];
}

Account& Ledger::account_mut(Address addr) {
  if (addr.id >= accounts_.size()) throw std::invalid_argument("unknown address");
  return accounts_[addr.id];
}

EscrowHandle Ledger::escrow_fee(Address user, Currency fee) {
  Account& acct = account_mut(user);
  if (acct.balance < fee) {
    throw std::invalid_argument("escrow_fee: insufficient balance");
  }
  acct.balance -= fee;
  const EscrowHandle handle{static_cast<std::uint32_t>(escrows_.size())};
  escrows_.push_back(fee);
  log(Phase::Request, EventKind::Escrow, user.id, kEscrowParty, fee);
  return handle;
}

void Ledger::payout(EscrowHandle escrow, Address to, Currency amount, Phase phase) {
  if (escrow.id >= escrows_.size()) throw std::invalid_argument("unknown escrow");
  if (escrows_[escrow.id] < amount) {
    // Overdraw is an invariant breach, not a recoverable rejection.
    throw std::logic_error("payout: escrow overdraw");
  }
  escrows_[escrow.id] -= amount;
  account_mut(to).balance += amount;
  log(phase, EventKind::Payout, kEscrowParty, to.id, amount);
}

Currency Ledger::escrow_balance(EscrowHandle escrow) const {
  if (escrow.id >= escrows_.size()) throw std::invalid_argument("unknown escrow");
  return escrows_[escrow.id];
}

void Ledger::slash(Address addr) {
  Account& acct = account_mut(addr);
  if (acct.excluded) {
    warnings_.push_back("slash: account " + std::to_string(addr.id) +
                        " already excluded");
    return;
  }
  const Currency destroyed = acct.deposit;
  acct.deposit = 0;
  acct.excluded = true;
  destroyed_ += destroyed;
  if (destroyed > 0) {
    log(Phase::Settle, EventKind::Slash, addr.id, kNoParty, destroyed);
  }
}

void Ledger::log(Phase phase, EventKind kind, std::int64_t from,
                 std::int64_t to, Currency amount) {
  events_.push_back(LedgerEvent{phase, kind, from, to, amount});
  audit_conservation();
}

void Ledger::audit_conservation() const {
  Currency held = destroyed_;
  for (const Account& acct : accounts_) {
    if (acct.excluded && acct.deposit != 0) {
      throw std::logic_error("conservation: excluded account holds a deposit");
    }
    held += acct.balance + acct.deposit;
  }
  for (Currency e : escrows_) held += e;
  if (held != minted_) {
    throw std::logic_error("conservation: balances+deposits+escrow+destroyed != minted");
  }
}

namespace {
void write_party(std::ostream& out, std::int64_t party) {
  if (party == kNoParty) {
    out << '-';
  } else if (party == kEscrowParty) {
    out << "escrow";
  } else {
    out << party;
  }
}
}  // namespace

void Ledger::dump_events(std::ostream& out) const {
  for (const LedgerEvent& ev : events_) {
    out << to_string(ev.phase) << ',' << to_string(ev.kind) << ',';
    write_party(out, ev.from);
    out << ',';
    write_party(out, ev.to);
    out << ',' << ev.amount << '\n';
  }
}

}  // namespace verisim
