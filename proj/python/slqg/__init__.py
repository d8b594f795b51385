"""Stackelberg stochastic linear-quadratic differential games.

Equilibrium Riccati solver, well-posedness classification, closed-loop
simulation with counter-based noise, equilibrium diagnostics, and the scalar
open-loop optimality system. The heavy lifting lives in the compiled
extension; this package just re-exports it.
"""

from ._core import (
    AssetSpec,
    CostEstimate,
    DeviationReport,
    GameSpec,
    OpenLoopSolution,
    OpenLoopSpec,
    PathEnsemble,
    RestartReport,
    SlqgError,
    Solution,
    SpikeReport,
    StackelbergCheckReport,
    WellPosednessReport,
    __version__,
    asset_to_game,
    classify,
    estimate_cost,
    load_spec,
    parse_spec,
    restart_experiment,
    simulate,
    solve,
    solve_open_loop,
    spike_test,
    stackelberg_check,
)

__all__ = [
    "AssetSpec",
    "CostEstimate",
    "DeviationReport",
    "GameSpec",
    "OpenLoopSolution",
    "OpenLoopSpec",
    "PathEnsemble",
    "RestartReport",
    "SlqgError",
    "Solution",
    "SpikeReport",
    "StackelbergCheckReport",
    "WellPosednessReport",
    "__version__",
    "asset_to_game",
    "classify",
    "estimate_cost",
    "load_spec",
    "parse_spec",
    "restart_experiment",
    "simulate",
    "solve",
    "solve_open_loop",
    "spike_test",
    "stackelberg_check",
]
