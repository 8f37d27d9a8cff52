#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>

#include "test_support.hpp"
#include "verisim/game.hpp"

using namespace verisim;
using verisim::testing::run_scenario;

namespace {

constexpr BehaviorKind H = BehaviorKind::Honest;
constexpr BehaviorKind D = BehaviorKind::CollusiveDishonest;

bool contains(const std::vector<StrategyProfile>& set, StrategyProfile profile) {
  return std::find(set.begin(), set.end(), profile) != set.end();
}

constexpr StrategyProfile kCorrectAccept{SolverStrategy::Correct,
                                         VerifierStrategy::Accept};

PayoffMatrix custom_matrix(std::int64_t s_cc, std::int64_t v_cc, std::int64_t s_ca,
                           std::int64_t v_ca, std::int64_t s_fc, std::int64_t v_fc,
                           std::int64_t s_fa, std::int64_t v_fa) {
  Payoff cells[2][2];
  cells[0][0] = {s_cc, v_cc};  // (correct, challenge)
  cells[0][1] = {s_ca, v_ca};  // (correct, accept)
  cells[1][0] = {s_fc, v_fc};  // (false, challenge)
  cells[1][1] = {s_fa, v_fa};  // (false, accept)
  return PayoffMatrix(60, 2, 100, cells);
}

}  // namespace

TEST_CASE("build_matrix reproduces the fee-split cells") {
  const PayoffMatrix matrix = build_matrix(60, 2, 100);
  CHECK(matrix.at(SolverStrategy::Correct, VerifierStrategy::Accept) ==
        Payoff{20, 20});
  CHECK(matrix.at(SolverStrategy::False, VerifierStrategy::Challenge) ==
        Payoff{-100, 30});
  CHECK(matrix.at(SolverStrategy::Correct, VerifierStrategy::Challenge) ==
        Payoff{60, -100});
  CHECK(matrix.at(SolverStrategy::False, VerifierStrategy::Accept) ==
        Payoff{20, 20});
}

TEST_CASE("build_matrix without challenger slashing zeroes the case-2 loss") {
  ProtocolFlags flags;
  flags.slash_wrong_challengers = false;
  const PayoffMatrix matrix = build_matrix(60, 2, 100, flags);
  CHECK(matrix.at(SolverStrategy::Correct, VerifierStrategy::Challenge) ==
        Payoff{60, 0});
}

TEST_CASE("the verifier has no dominant strategy at default parameters") {
  const DominanceResult result = dominant_strategies(build_matrix(60, 2, 100));
  CHECK_FALSE(result.verifier.has_value());
}

TEST_CASE("an all-equal matrix has no dominant strategy") {
  const PayoffMatrix flat = custom_matrix(5, 5, 5, 5, 5, 5, 5, 5);
  const DominanceResult result = dominant_strategies(flat);
  CHECK_FALSE(result.solver.has_value());
  CHECK_FALSE(result.verifier.has_value());
}

TEST_CASE("a constructed always-better challenge is dominant") {
  const PayoffMatrix rigged = custom_matrix(0, 10, 0, 5, 0, 10, 0, 5);
  const DominanceResult result = dominant_strategies(rigged);
  REQUIRE(result.verifier.has_value());
  CHECK(*result.verifier == VerifierStrategy::Challenge);
}

TEST_CASE("honest play is a Nash equilibrium at default parameters") {
  const auto equilibria = nash_equilibria(build_matrix(60, 2, 100));
  CHECK(contains(equilibria, kCorrectAccept));
}

TEST_CASE("(false, accept) is not an equilibrium") {
  // The verifier deviates to challenge for the case-4 gain (30 > 20).
  const auto equilibria = nash_equilibria(build_matrix(60, 2, 100));
  CHECK_FALSE(contains(equilibria,
                       StrategyProfile{SolverStrategy::False, VerifierStrategy::Accept}));
}

TEST_CASE("a zero matrix makes every profile an equilibrium") {
  const PayoffMatrix zero = custom_matrix(0, 0, 0, 0, 0, 0, 0, 0);
  CHECK(nash_equilibria(zero).size() == 4);
}

TEST_CASE("honest play is Pareto efficient at default parameters") {
  const auto efficient = pareto_efficient(build_matrix(60, 2, 100));
  CHECK(contains(efficient, kCorrectAccept));
}

TEST_CASE("a profile strictly dominated in both payoffs is excluded") {
  const PayoffMatrix matrix = custom_matrix(10, 10, 1, 1, 10, 10, 10, 10);
  const auto efficient = pareto_efficient(matrix);
  CHECK_FALSE(contains(efficient, kCorrectAccept));
}

TEST_CASE("an all-equal matrix is entirely Pareto efficient") {
  const PayoffMatrix flat = custom_matrix(5, 5, 5, 5, 5, 5, 5, 5);
  CHECK(pareto_efficient(flat).size() == 4);
}

TEST_CASE("matrix cells equal the protocol payouts for every profile") {
  // Oracle equivalence: net payoff (payout minus lost deposit) from an
  // actual run with matching behaviors, for the solver and first verifier.
  for (std::size_t n = 1; n <= 3; ++n) {
    const PayoffMatrix matrix = build_matrix(60, n, 100);
    for (SolverStrategy s : {SolverStrategy::Correct, SolverStrategy::False}) {
      for (VerifierStrategy v :
           {VerifierStrategy::Challenge, VerifierStrategy::Accept}) {
        std::vector<BehaviorKind> kinds;
        kinds.push_back(s == SolverStrategy::Correct ? H : D);
        // A uniform accepting row must agree with the solver: honest against
        // a correct solver, colluding against a false one. The challenging
        // row is the opposite.
        const bool solver_false = s == SolverStrategy::False;
        const bool challenges = v == VerifierStrategy::Challenge;
        const BehaviorKind verifier_kind =
            (solver_false == challenges) ? H : D;
        for (std::size_t i = 0; i < n; ++i) kinds.push_back(verifier_kind);

        const auto scenario = run_scenario(kinds, 12345, 6789, 60);
        const Outcome& outcome = scenario.outcome;

        auto net = [&](Address addr) {
          std::int64_t value = 0;
          if (auto it = outcome.payouts.find(addr.id); it != outcome.payouts.end()) {
            value += static_cast<std::int64_t>(it->second);
          }
          if (std::find(outcome.slashed.begin(), outcome.slashed.end(), addr) !=
              outcome.slashed.end()) {
            value -= 100;
          }
          return value;
        };

        CAPTURE(n);
        CAPTURE(static_cast<int>(s));
        CAPTURE(static_cast<int>(v));
        CHECK(matrix.at(s, v).solver == net(scenario.roles.solver.address));
        CHECK(matrix.at(s, v).verifier == net(scenario.roles.verifiers[0].address));
      }
    }
  }
}

TEST_CASE("equilibrium and dominance survive positive rescaling") {
  const PayoffMatrix base = build_matrix(60, 2, 100);
  const PayoffMatrix scaled = build_matrix(600, 2, 1000);
  CHECK(nash_equilibria(base) == nash_equilibria(scaled));
  CHECK(pareto_efficient(base) == pareto_efficient(scaled));
  const DominanceResult d1 = dominant_strategies(base);
  const DominanceResult d2 = dominant_strategies(scaled);
  CHECK(d1.solver == d2.solver);
  CHECK(d1.verifier == d2.verifier);
}

TEST_CASE("expected utility is the probability-weighted sum") {
  const std::array<double, 2> degenerate_v{10, 0};
  const std::array<double, 2> degenerate_p{1, 0};
  CHECK(expected_utility(degenerate_v, degenerate_p) == doctest::Approx(10));

  const std::array<double, 2> values{10, -100};
  const std::array<double, 2> probs{0.5, 0.5};
  CHECK(expected_utility(values, probs) == doctest::Approx(-45));
}

TEST_CASE("expected utility validates its distribution") {
  const std::array<double, 2> values{1, 2};
  CHECK_THROWS_AS(expected_utility(values, std::array<double, 2>{0.5, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(expected_utility(values, std::array<double, 2>{1.5, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(expected_utility(values, std::array<double, 3>{0.5, 0.25, 0.25}),
                  std::invalid_argument);
}

TEST_CASE("expected utility is linear in values and probabilities") {
  const std::array<double, 3> values{4, -2, 10};
  const std::array<double, 3> probs{0.2, 0.5, 0.3};
  const double base = expected_utility(values, probs);

  std::array<double, 3> scaled_values{};
  for (std::size_t i = 0; i < values.size(); ++i) scaled_values[i] = 3.0 * values[i];
  CHECK(expected_utility(scaled_values, probs) == doctest::Approx(3.0 * base));

  const std::array<double, 3> other{1, 1, -5};
  std::array<double, 3> summed{};
  for (std::size_t i = 0; i < values.size(); ++i) summed[i] = values[i] + other[i];
  CHECK(expected_utility(summed, probs) ==
        doctest::Approx(base + expected_utility(other, probs)));
}

TEST_CASE("the verifier's challenge utility crosses accept at the matrix threshold") {
  // With challenger slashing on, challenging pays only once the solver is
  // likely enough to be false: p* = (V_CA - V_CC) / ((V_FC - V_FA) + (V_CA - V_CC)).
  const PayoffMatrix matrix = build_matrix(60, 2, 100);
  const auto v_cc = static_cast<double>(
      matrix.at(SolverStrategy::Correct, VerifierStrategy::Challenge).verifier);
  const auto v_ca = static_cast<double>(
      matrix.at(SolverStrategy::Correct, VerifierStrategy::Accept).verifier);
  const auto v_fc = static_cast<double>(
      matrix.at(SolverStrategy::False, VerifierStrategy::Challenge).verifier);
  const auto v_fa = static_cast<double>(
      matrix.at(SolverStrategy::False, VerifierStrategy::Accept).verifier);

  // Challenging a known-false solver strictly beats accepting it.
  CHECK(v_fc > v_fa);

  const double crossover = (v_ca - v_cc) / ((v_fc - v_fa) + (v_ca - v_cc));
  CHECK(crossover == doctest::Approx(120.0 / 130.0));

  for (double p = 0.1; p < 0.95; p += 0.1) {
    const std::array<double, 2> probs{p, 1.0 - p};  // P(solver false) = p
    const double eu_challenge =
        expected_utility(std::array<double, 2>{v_fc, v_cc}, probs);
    const double eu_accept =
        expected_utility(std::array<double, 2>{v_fa, v_ca}, probs);
    CHECK((eu_challenge > eu_accept) == (p > crossover));
  }
}
