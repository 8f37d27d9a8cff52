#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace verisim {

using Currency = std::uint64_t;
using Gas = std::uint64_t;

/// Opaque account identifier, unique within one ledger.
struct Address {
  std::uint32_t id{};

  friend bool operator==(Address, Address) = default;
  friend auto operator<=>(Address, Address) = default;
};

struct Account {
  Address address;
  Currency balance{0};
  Currency deposit{0};
  bool excluded{false};
};

/// Protocol phases; every metered charge and ledger event is tagged with one.
enum class Phase : std::uint8_t {
  Setup,        // account creation and funding
  Request,      // user request + fee escrow
  Roles,        // role assignment
  Report,       // services report results
  Compare,      // arbiter compares reported roots
  Dispute,      // bisection games + judge ruling
  Settle,       // payouts, refunds, slashing
};
inline constexpr std::size_t kPhaseCount = 7;

const char* to_string(Phase phase);

/// Metered operation kinds. Costs are abstract units; only relative and
/// scaling behaviour matters.
enum class GasKind : std::uint8_t {
  TransactionBase,
  StorageWrite,
  Comparison,
  JudgeInvocation,
  DisputeStep,
  RoleAssignment,
};

struct GasSchedule {
  Gas transaction_base{21};
  Gas storage_write{20};
  Gas comparison{3};
  Gas judge_invocation{50};
  Gas dispute_step{30};
  Gas role_assignment{10};

  Gas cost(GasKind kind) const;
  void validate() const;  // all costs must be > 0
};

/// Accumulates gas per phase; total is always the sum over phases.
class GasMeter {
 public:
  Gas charge(const GasSchedule& schedule, GasKind kind, Phase phase);

  Gas total() const { return total_; }
  Gas phase(Phase phase) const {
    return per_phase_[static_cast<std::size_t>(phase)];
  }

 private:
  Gas total_{0};
  std::array<Gas, kPhaseCount> per_phase_{};
};

enum class EventKind : std::uint8_t { Transfer, Deposit, Slash, Escrow, Payout };

const char* to_string(EventKind kind);

/// Append-only, totally ordered event record. `from`/`to` use kNoParty for
/// the external world and kEscrowParty for protocol escrow.
struct LedgerEvent {
  Phase phase;
  EventKind kind;
  std::int64_t from;
  std::int64_t to;
  Currency amount;
};

inline constexpr std::int64_t kNoParty = -1;
inline constexpr std::int64_t kEscrowParty = -2;

struct EscrowHandle {
  std::uint32_t id{};
};

struct LedgerConfig {
  Currency min_deposit{1};
  GasSchedule gas{};
};

/// Simulated chain state for one protocol run: accounts, deposits, fee
/// escrow, gas meter and the event log. Single-writer; one run owns one
/// ledger. Currency conservation is re-audited from scratch after every
/// event and any breach aborts via std::logic_error.
class Ledger {
 public:
  explicit Ledger(LedgerConfig config = {});

  // -- accounts ------------------------------------------------------------
  Address open_account(Currency deposit);
  void fund(Address addr, Currency amount);

  const Account& account(Address addr) const;
  std::size_t account_count() const { return accounts_.size(); }
  bool excluded(Address addr) const { return account(addr).excluded; }

  // -- fee escrow ----------------------------------------------------------
  EscrowHandle escrow_fee(Address user, Currency fee);
  void payout(EscrowHandle escrow, Address to, Currency amount, Phase phase);
  Currency escrow_balance(EscrowHandle escrow) const;

  // -- slashing ------------------------------------------------------------
  void slash(Address addr);
  Currency destroyed_total() const { return destroyed_; }

  // -- gas -----------------------------------------------------------------
  Gas meter(GasKind kind, Phase phase) { return gas_.charge(config_.gas, kind, phase); }
  const GasMeter& gas() const { return gas_; }
  const GasSchedule& gas_schedule() const { return config_.gas; }

  // -- audit ---------------------------------------------------------------
  const std::vector<LedgerEvent>& events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  Currency minted_total() const { return minted_; }

  /// Recomputes balances + escrow + live deposits + destroyed from scratch
  /// and checks it against everything ever minted.
  void audit_conservation() const;

  /// One `phase,kind,from,to,amount` line per event.
  void dump_events(std::ostream& out) const;

 private:
  Account& account_mut(Address addr);
  void log(Phase phase, EventKind kind, std::int64_t from, std::int64_t to,
           Currency amount);

  LedgerConfig config_;
  std::vector<Account> accounts_;
  std::vector<Currency> escrows_;
  std::vector<LedgerEvent> events_;
  std::vector<std::string> warnings_;
  Currency minted_{0};
  Currency destroyed_{0};
  GasMeter gas_;
};

}  // namespace verisim
