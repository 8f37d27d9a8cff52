#include "verisim/actors.hpp"

#include <stdexcept>

namespace verisim {

ServicePool populate_pool(std::size_t size, double prior_p, Currency deposit,
                          CorruptionSite site_policy, Ledger& ledger, Rng& rng) {
  if (size < 2) {
    throw std::invalid_argument("populate_pool: a minimum of 2 services is required");
  }
  if (prior_p < 0.0 || prior_p > 1.0) {
    throw std::invalid_argument("populate_pool: prior must be in [0,1]");
  }
  ServicePool pool;
  pool.prior_p = prior_p;
  pool.services.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    Behavior behavior;
    behavior.kind = rng.bernoulli(prior_p) ? BehaviorKind::CollusiveDishonest
                                           : BehaviorKind::Honest;
    behavior.corruption_site_policy = site_policy;
    pool.services.push_back(ComputationService{ledger.open_account(deposit), behavior});
  }
  return pool;
}

RoleAssignment assign_roles(const ServicePool& pool, std::size_t n,
                            Ledger& ledger, Rng& rng) {
  if (n < 1) throw std::invalid_argument("assign_roles: need at least one verifier");

  std::vector<std::size_t> eligible;
  eligible.reserve(pool.services.size());
  for (std::size_t i = 0; i < pool.services.size(); ++i) {
    if (!ledger.excluded(pool.services[i].address)) eligible.push_back(i);
  }
  if (eligible.size() < n + 1) {
    throw std::invalid_argument("assign_roles: not enough non-excluded services");
  }

  // Partial Fisher-Yates: the first n+1 slots become the roles.
  for (std::size_t i = 0; i < n + 1; ++i) {
    const std::size_t j = i + rng.next_below(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
    ledger.meter(GasKind::RoleAssignment, Phase::Roles);
  }

  RoleAssignment roles;
  roles.solver = pool.services[eligible[0]];
  roles.verifiers.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    roles.verifiers.push_back(pool.services[eligible[i]]);
  }
  return roles;
}

TraceTree produce_solution(const ComputationService& service,
                           const SolutionRequest& request) {
  TraceTree honest = decompose(request.a, request.b);
  if (!service.behavior.dishonest()) return honest;

  const std::vector<std::size_t> sites = honest.internal_steps();
  if (sites.empty()) return honest;  // nothing forgeable

  std::size_t target = 0;  // BFS order puts the root first
  if (service.behavior.corruption_site_policy == CorruptionSite::UniformInternal) {
    Rng site_rng(mix_seed({request.a, request.b, request.seed}));
    target = sites[site_rng.next_below(sites.size())];
  }
  return corrupt(honest, target);
}

Stance verifier_stance(std::uint64_t own_root, std::uint64_t solver_root) {
  return own_root == solver_root ? Stance::Accept : Stance::Challenge;
}

}  // namespace verisim
