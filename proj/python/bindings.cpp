// Python bindings for the protocol simulator's main operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "verisim/game.hpp"
#include "verisim/harness.hpp"

namespace py = pybind11;
using namespace verisim;

namespace {

std::string outcome_text(const Outcome& outcome) {
  std::ostringstream out;
  out << outcome;
  return out.str();
}

std::string trace_text(const TraceTree& tree) {
  std::ostringstream out;
  dump_trace(tree, out);
  return out.str();
}

std::string csv_text(const Report& report) {
  std::ostringstream out;
  emit_csv(report, out);
  return out.str();
}

py::dict gas_dict(const GasMeter& gas) {
  py::dict d;
  for (std::size_t p = 0; p < kPhaseCount; ++p) {
    const auto phase = static_cast<Phase>(p);
    d[to_string(phase)] = gas.phase(phase);
  }
  d["total"] = gas.total();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic simulator of an incentive-aligned verifiable "
            "computation protocol";

  // -- trace ----------------------------------------------------------------
  py::enum_<StepOp>(m, "StepOp")
      .value("LeafInput", StepOp::LeafInput)
      .value("Shift", StepOp::Shift)
      .value("Add", StepOp::Add);

  py::enum_<Decision>(m, "Decision")
      .value("SolverCorrect", Decision::SolverCorrect)
      .value("SolverFalse", Decision::SolverFalse);

  py::class_<StepId>(m, "StepId")
      .def_readonly("level", &StepId::level)
      .def_readonly("index", &StepId::index)
      .def("__repr__", [](const StepId& id) {
        return "StepId(level=" + std::to_string(id.level) +
               ", index=" + std::to_string(id.index) + ")";
      });

  py::class_<TraceTree>(m, "TraceTree")
      .def_property_readonly("root_value", &TraceTree::root_value)
      .def_property_readonly("root_hash",
                             [](const TraceTree& t) { return t.root_hash; })
      .def_property_readonly("depth", &TraceTree::depth)
      .def("__len__", &TraceTree::size)
      .def("internal_steps", &TraceTree::internal_steps)
      .def("dump", &trace_text,
           "One level,index,op,claimed_output,hash-prefix line per node");

  py::class_<Disagreement>(m, "Disagreement")
      .def_readonly("step_id", &Disagreement::step_id)
      .def_readonly("solver_claim", &Disagreement::solver_claim)
      .def_readonly("challenger_claim", &Disagreement::challenger_claim)
      .def_readonly("judge_queries", &Disagreement::judge_queries);

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("decision", &Verdict::decision)
      .def_readonly("checked_step", &Verdict::checked_step);

  m.def("decompose", &decompose, py::arg("a"), py::arg("b"),
        "Shift-add decomposition of a*b into a Merkleized trace");
  m.def("corrupt", &corrupt, py::arg("tree"), py::arg("target"),
        "Internally consistent false trace with claimed_output+1 at target");
  m.def("bisect", &bisect, py::arg("solver"), py::arg("challenger"));
  m.def("judge_step", &judge_step, py::arg("disagreement"), py::arg("a"),
        py::arg("b"));
  m.def("merkle_root", &merkle_root, py::arg("tree"));

  // -- protocol and game ------------------------------------------------------
  m.def("split_fee", &split_fee, py::arg("fee"), py::arg("n"));

  py::class_<Payoff>(m, "Payoff")
      .def_readonly("solver", &Payoff::solver)
      .def_readonly("verifier", &Payoff::verifier);

  py::class_<PayoffMatrix>(m, "PayoffMatrix")
      .def("at",
           [](const PayoffMatrix& matrix, const std::string& s,
              const std::string& v) {
             if (s != "correct" && s != "false") {
               throw py::value_error("solver strategy must be 'correct' or 'false'");
             }
             if (v != "challenge" && v != "accept") {
               throw py::value_error("verifier strategy must be 'challenge' or 'accept'");
             }
             return matrix.at(s == "correct" ? SolverStrategy::Correct
                                             : SolverStrategy::False,
                              v == "challenge" ? VerifierStrategy::Challenge
                                               : VerifierStrategy::Accept);
           },
           py::arg("solver"), py::arg("verifier"))
      .def("__repr__", [](const PayoffMatrix& matrix) {
        std::ostringstream out;
        out << matrix;
        return out.str();
      });

  m.def(
      "build_matrix",
      [](Currency fee, std::size_t n, Currency deposit,
         bool slash_wrong_challengers) {
        ProtocolFlags flags;
        flags.slash_wrong_challengers = slash_wrong_challengers;
        return build_matrix(fee, n, deposit, flags);
      },
      py::arg("fee"), py::arg("n"), py::arg("deposit"),
      py::arg("slash_wrong_challengers") = true);

  auto profile_names = [](const std::vector<StrategyProfile>& profiles) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const StrategyProfile& p : profiles) {
      out.emplace_back(to_string(p.solver), to_string(p.verifier));
    }
    return out;
  };
  m.def("nash_equilibria",
        [profile_names](const PayoffMatrix& matrix) {
          return profile_names(nash_equilibria(matrix));
        });
  m.def("pareto_efficient",
        [profile_names](const PayoffMatrix& matrix) {
          return profile_names(pareto_efficient(matrix));
        });
  m.def("dominant_strategies", [](const PayoffMatrix& matrix) {
    const DominanceResult result = dominant_strategies(matrix);
    py::dict d;
    d["solver"] = result.solver ? py::cast(to_string(*result.solver))
                                : py::none();
    d["verifier"] = result.verifier ? py::cast(to_string(*result.verifier))
                                    : py::none();
    return d;
  });
  m.def("expected_utility",
        [](const std::vector<double>& values, const std::vector<double>& probs) {
          return expected_utility(values, probs);
        },
        py::arg("values"), py::arg("probs"));

  // -- harness ----------------------------------------------------------------
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("priors", &ExperimentConfig::priors)
      .def_readwrite("verifier_counts", &ExperimentConfig::verifier_counts)
      .def_readwrite("runs_per_cell", &ExperimentConfig::runs_per_cell)
      .def_readwrite("pool_size", &ExperimentConfig::pool_size)
      .def_readwrite("deposit", &ExperimentConfig::deposit)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("cross_run_exclusion", &ExperimentConfig::cross_run_exclusion);

  py::class_<Interval>(m, "Interval")
      .def_readonly("low", &Interval::low)
      .def_readonly("high", &Interval::high)
      .def("contains", &Interval::contains);

  py::class_<CellResult>(m, "CellResult")
      .def_readonly("prior", &CellResult::prior)
      .def_readonly("n", &CellResult::n)
      .def_readonly("runs", &CellResult::runs)
      .def_readonly("aborted", &CellResult::aborted)
      .def_readonly("false_accept_rate", &CellResult::false_accept_rate)
      .def_readonly("expected_false", &CellResult::expected_false)
      .def_readonly("dispute_rate", &CellResult::dispute_rate)
      .def_readonly("gas_mean", &CellResult::gas_mean)
      .def_readonly("gas_std", &CellResult::gas_std)
      .def_readonly("slashes", &CellResult::slashes)
      .def_readonly("false_accept_ci", &CellResult::false_accept_ci);

  py::class_<Report>(m, "Report")
      .def_readonly("cells", &Report::cells)
      .def("csv", &csv_text);

  py::class_<Outcome>(m, "Outcome")
      .def_property_readonly("case",
                             [](const Outcome& o) { return to_string(o.kind); })
      .def_property_readonly("accepted_value",
                             [](const Outcome& o) -> py::object {
                               if (!o.accepted_value) return py::none();
                               return py::cast(*o.accepted_value);
                             })
      .def_readonly("correct", &Outcome::correct)
      .def_property_readonly("payouts",
                             [](const Outcome& o) {
                               py::dict d;
                               for (const auto& [addr, amount] : o.payouts) {
                                 d[py::cast(addr)] = amount;
                               }
                               return d;
                             })
      .def_property_readonly("slashed",
                             [](const Outcome& o) {
                               std::vector<std::uint32_t> ids;
                               for (Address a : o.slashed) ids.push_back(a.id);
                               return ids;
                             })
      .def_property_readonly("gas", [](const Outcome& o) { return gas_dict(o.gas); })
      .def("__str__", &outcome_text);

  m.def("expected_false_rate", &expected_false_rate, py::arg("p"), py::arg("n"),
        "Probability that the solver and all n verifiers collude: p^(n+1)");
  m.def("clopper_pearson", &clopper_pearson, py::arg("successes"),
        py::arg("trials"), py::arg("confidence") = 0.95);
  m.def("run_cell", &run_cell, py::arg("config"), py::arg("prior"), py::arg("n"));
  m.def("run_grid", &run_grid, py::arg("config"));
  m.def(
      "run_single",
      [](std::uint64_t a, std::uint64_t b, std::size_t n, double prior,
         std::uint64_t seed) {
        return run_single(ExperimentConfig{}, a, b, n, prior, seed).outcome;
      },
      py::arg("a"), py::arg("b"), py::arg("n"), py::arg("prior"), py::arg("seed"),
      "One protocol run with default configuration; returns the Outcome");
}
