#pragma once

#include <cstdint>
#include <vector>

#include "verisim/ledger.hpp"
#include "verisim/rng.hpp"
#include "verisim/trace.hpp"

namespace verisim {

enum class BehaviorKind : std::uint8_t { Honest, CollusiveDishonest };

/// Where colluders plant their corruption. The concrete site is derived
/// deterministically from the request so every colluder emits the identical
/// false trace.
enum class CorruptionSite : std::uint8_t { RootOnly, UniformInternal };

struct Behavior {
  BehaviorKind kind{BehaviorKind::Honest};
  CorruptionSite corruption_site_policy{CorruptionSite::UniformInternal};

  bool dishonest() const { return kind == BehaviorKind::CollusiveDishonest; }
};

struct ComputationService {
  Address address;
  Behavior behavior;
};

/// solver first, then the n verifiers, all distinct and none excluded.
struct RoleAssignment {
  ComputationService solver;
  std::vector<ComputationService> verifiers;
};

struct ServicePool {
  std::vector<ComputationService> services;
  double prior_p{0.0};
};

/// Opens `size` service accounts on the ledger, each independently dishonest
/// with probability prior_p. size must be >= 2.
ServicePool populate_pool(std::size_t size, double prior_p, Currency deposit,
                          CorruptionSite site_policy, Ledger& ledger, Rng& rng);

/// Draws n+1 distinct non-excluded services uniformly without replacement;
/// the first becomes the solver. Meters role_assignment gas per role.
/// Throws std::invalid_argument when fewer than n+1 services are eligible
/// (the caller records a starvation event).
RoleAssignment assign_roles(const ServicePool& pool, std::size_t n,
                            Ledger& ledger, Rng& rng);

/// What the request looks like to a service: the operands plus a seed that
/// colluders use to agree on the corruption site.
struct SolutionRequest {
  std::uint64_t a{0};
  std::uint64_t b{0};
  std::uint64_t seed{0};
};

/// Honest services report the exact decomposition; colluders report the
/// shared deterministic false trace. A degenerate trace with no internal
/// step cannot be forged (inputs are public), so colluders fall back to the
/// honest trace there.
TraceTree produce_solution(const ComputationService& service,
                           const SolutionRequest& request);

enum class Stance : std::uint8_t { Accept, Challenge };

/// Faithful comparison of the verifier's own root against the solver's.
Stance verifier_stance(std::uint64_t own_root, std::uint64_t solver_root);

}  // namespace verisim
