"""Brute-force maximizers for validating the closed-form solvers.

These oracles only know the model primitives — the stage payoff, the cost
function, and the majority rule. They never reuse the solvers' region
logic or candidate sets, so agreement between an oracle and a solver is
evidence, not tautology. Ties always break to the lowest grid index,
which is deliberately different from the solvers' tie-breaking: tests
compare values, not argmax identity, when ties are possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Grid
from .model import CostSpec, ModelParams, evaluate_cost, implemented_policy, stage_payoff


@dataclass(frozen=True)
class OracleResult:
    argmax: float
    value: float
    evaluations: int


def brute_force_one_step(objective, oracle_grid: Grid) -> OracleResult:
    """Maximize a (vectorized) objective over every oracle grid point."""
    values = np.asarray(objective(oracle_grid.points), dtype=float)
    idx = int(np.argmax(values))
    return OracleResult(
        argmax=float(oracle_grid.points[idx]),
        value=float(values[idx]),
        evaluations=oracle_grid.n,
    )


@dataclass(frozen=True)
class TwoPeriodTables:
    """Second-period best-response values, brute-forced on the oracle grid."""

    grid: Grid
    best0: np.ndarray  # value of the period-2 problem per landing point, s2 = 0
    best1: np.ndarray  # same for s2 = 1
    evaluations: int


def period2_response_tables(params: ModelParams, cost: CostSpec, oracle_grid: Grid) -> TwoPeriodTables:
    """Enumerate the period-2 problem max_{p2} [R(s2, p2) - c(p2 - p1)] per p1."""
    pts = oracle_grid.points
    disp = pts[:, None] - pts[None, :]  # rows: p2 candidates, cols: p1
    costs = evaluate_cost(cost, disp)
    best = []
    for s2 in (0, 1):
        stage = stage_payoff(s2, pts, params.H)
        best.append((stage[:, None] - costs).max(axis=0))
    return TwoPeriodTables(
        grid=oracle_grid,
        best0=best[0],
        best1=best[1],
        evaluations=2 * oracle_grid.n * oracle_grid.n,
    )


def brute_force_two_period_single(
    params: ModelParams,
    cost: CostSpec,
    p0: float,
    s1: int,
    oracle_grid: Grid,
    tables: TwoPeriodTables | None = None,
) -> OracleResult:
    """Exhaustive two-period solve for the single elite.

    Every period-1 landing point on the oracle grid is scored as stage
    payoff minus cost plus discounted expectation of the (brute-forced)
    period-2 best-response value.
    """
    if tables is None or tables.grid is not oracle_grid:
        tables = period2_response_tables(params, cost, oracle_grid)
    pts = oracle_grid.points
    continuation = params.pi * tables.best1 + (1.0 - params.pi) * tables.best0
    values = (
        stage_payoff(s1, pts, params.H)
        - evaluate_cost(cost, pts - p0)
        + params.beta * continuation
    )
    idx = int(np.argmax(values))
    return OracleResult(
        argmax=float(pts[idx]),
        value=float(values[idx]),
        evaluations=oracle_grid.n + tables.evaluations,
    )


@dataclass(frozen=True)
class RivalResponseTables:
    """Rival elite's brute-forced reply and the leader's resulting payoff."""

    grid: Grid
    leader_continuation: np.ndarray  # E_{s2}[leader stage payoff] per landing p1
    evaluations: int


def rival_response_tables(params: ModelParams, cost: CostSpec, oracle_grid: Grid) -> RivalResponseTables:
    """Brute-force the follower's period-2 reply for every period-1 position.

    The follower prefers policy 1 - s2 and, at an exact half split, gets
    to implement it. The leader's continuation averages its own payoff
    over s2 under those replies. Shares no code with the closed-form
    follower strategy.
    """
    pts = oracle_grid.points
    disp = pts[:, None] - pts[None, :]
    costs = evaluate_cost(cost, disp)
    expected = np.zeros(oracle_grid.n)
    for s2 in (0, 1):
        pref = 1 - s2
        follower_stage = params.H * (implemented_policy(pts, pref) == pref)
        reply_idx = (follower_stage[:, None] - costs).argmax(axis=0)
        landed = pts[reply_idx]
        leader_payoff = params.H * (implemented_policy(landed, pref) == s2)
        prob = params.pi if s2 == 1 else 1.0 - params.pi
        expected = expected + prob * leader_payoff
    return RivalResponseTables(
        grid=oracle_grid,
        leader_continuation=expected,
        evaluations=2 * oracle_grid.n * oracle_grid.n,
    )


def brute_force_stackelberg(
    params: ModelParams,
    cost: CostSpec,
    p0: float,
    s1: int,
    oracle_grid: Grid,
    tables: RivalResponseTables | None = None,
) -> OracleResult:
    """Exhaustive two-period leader problem against the brute-forced follower."""
    if tables is None or tables.grid is not oracle_grid:
        tables = rival_response_tables(params, cost, oracle_grid)
    pts = oracle_grid.points
    values = (
        stage_payoff(s1, pts, params.H)
        - evaluate_cost(cost, pts - p0)
        + params.beta * tables.leader_continuation
    )
    idx = int(np.argmax(values))
    return OracleResult(
        argmax=float(pts[idx]),
        value=float(values[idx]),
        evaluations=oracle_grid.n + tables.evaluations,
    )
