"""Deterministic simulator of an incentive-aligned verifiable-computation
protocol: Merkleized multiplication traces, a bisection dispute game,
deposit slashing, and Monte Carlo experiment sweeps."""

from verisim._core import (
    CellResult,
    Decision,
    Disagreement,
    ExperimentConfig,
    Interval,
    Outcome,
    Payoff,
    PayoffMatrix,
    Report,
    StepId,
    StepOp,
    TraceTree,
    Verdict,
    bisect,
    build_matrix,
    clopper_pearson,
    corrupt,
    decompose,
    dominant_strategies,
    expected_false_rate,
    expected_utility,
    judge_step,
    merkle_root,
    nash_equilibria,
    pareto_efficient,
    run_cell,
    run_grid,
    run_single,
    split_fee,
)

__all__ = [
    "CellResult",
    "Decision",
    "Disagreement",
    "ExperimentConfig",
    "Interval",
    "Outcome",
    "Payoff",
    "PayoffMatrix",
    "Report",
    "StepId",
    "StepOp",
    "TraceTree",
    "Verdict",
    "bisect",
    "build_matrix",
    "clopper_pearson",
    "corrupt",
    "decompose",
    "dominant_strategies",
    "expected_false_rate",
    "expected_utility",
    "judge_step",
    "merkle_root",
    "nash_equilibria",
    "pareto_efficient",
    "run_cell",
    "run_grid",
    "run_single",
    "split_fee",
]
