"""Single-elite solvers.

Covers the exact two-period problem (closed-form second-period policy,
four-candidate first-period choice), the infinite-horizon Bellman system
solved by value iteration on a grid, property verification for the
converged tables, and the cost-technology comparison.

Choices in the iterative solvers are restricted to grid points: the
majority-rule payoff jumps at 1/2 and interpolating across the threshold
would smooth away exactly the discontinuity the model is about.

Tie-breaking everywhere: highest value, then smallest movement |p' - p|,
then closest to 1/2, then the mover's preferred side. The last two rungs
only matter in degenerate cases (e.g. zero cost); the rule is chosen so
that mirror symmetry of the solution is exact, not approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import Grid
from .model import (
    QUADRATIC,
    CostSpec,
    ModelParams,
    cost_dominates,
    delta_threshold,
    evaluate_cost,
    stage_payoff,
)

INACTION = "inaction"
INTERIOR_B = "interior_b"
INTERIOR_C = "interior_c"
MEDIAN = "median"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RegionPartition:
    """Cutoffs 1/2 -+ delta splitting [0, 1] into stay/move bands.

    p0_star is -inf and p1_star +inf when the flip threshold exceeds the
    unit interval (the outer bands are then empty).
    """

    p0_star: float
    p1_star: float
    delta: float


@dataclass(frozen=True)
class CandidateEvaluation:
    candidate: float
    objective: float
    provenance: str


@dataclass(frozen=True)
class Period1Solution:
    p_next: float
    value: float
    candidates: tuple[CandidateEvaluation, ...]


@dataclass(frozen=True)
class ValueTable:
    grid: Grid
    v0: np.ndarray
    v1: np.ndarray

    def values(self, s: int) -> np.ndarray:
        return self.v1 if s == 1 else self.v0


@dataclass(frozen=True)
class PolicyTable:
    grid: Grid
    sigma0: np.ndarray
    sigma1: np.ndarray

    def moves(self, s: int) -> np.ndarray:
        return self.sigma1 if s == 1 else self.sigma0


@dataclass(frozen=True)
class InfiniteHorizonSolution:
    value: ValueTable
    policy: PolicyTable
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class Violation:
    check: str
    s: int
    p: float
    detail: str


def region_partition(params: ModelParams, cost: CostSpec) -> RegionPartition:
    delta = delta_threshold(cost, params.H)
    if math.isinf(delta):
        return RegionPartition(p0_star=-math.inf, p1_star=math.inf, delta=delta)
    return RegionPartition(p0_star=0.5 - delta, p1_star=0.5 + delta, delta=delta)


def expected_continuation_2(params: ModelParams, cost: CostSpec, p_next):
    """Expected second-period value of landing at p_next, before s2 realizes.

    Piecewise: flat on the outer bands where the elite will never move,
    and bent by the anticipated flip cost on the inner bands. Boundaries
    belong to the inner branches; the formulas agree there.
    """
    regions = region_partition(params, cost)
    H, pi = params.H, params.pi
    p = np.asarray(p_next, dtype=float)
    inner_left = H - pi * evaluate_cost(cost, 0.5 - p)
    inner_right = H - (1.0 - pi) * evaluate_cost(cost, p - 0.5)
    out = np.where(
        p < regions.p0_star,
        H * (1.0 - pi),
        np.where(
            p <= 0.5,
            inner_left,
            np.where(p <= regions.p1_star, inner_right, H * pi),
        ),
    )
    if np.ndim(p_next) == 0:
        return float(out)
    return out


def period2_solve(params: ModelParams, cost: CostSpec, p: float, s: int) -> tuple[float, float]:
    """Last-period optimum: stay if already winning or too far, else jump to 1/2.

    Exact indifference at the cutoff resolves to inaction.
    """
    regions = region_partition(params, cost)
    H = params.H
    if s == 1:
        if p >= 0.5:
            return p, H
        if p <= regions.p0_star:
            return p, 0.0
        return 0.5, H - evaluate_cost(cost, 0.5 - p)
    if p <= 0.5:
        return p, H
    if p >= regions.p1_star:
        return p, 0.0
    return 0.5, H - evaluate_cost(cost, p - 0.5)


def golden_section_min(fn, lo: float, hi: float, width: float = 1e-12) -> float:
    """Minimize a unimodal function on [lo, hi] to the given interval width."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _interior_minimizer(cost, p, weight, lo, hi):
    # Minimize c(q - p) + weight * c(q - 1/2) over [lo, hi]; both interior
    # regions anchor their second term at 1/2. Strictly convex in q.
    if hi <= lo:
        return lo
    if cost.kind == QUADRATIC:
        q = (p + 0.5 * weight) / (1.0 + weight)
        return min(max(q, lo), hi)
    objective = lambda q: evaluate_cost(cost, q - p) + weight * evaluate_cost(cost, q - 0.5)
    return golden_section_min(objective, lo, hi)


def interior_minimizer_B(params: ModelParams, cost: CostSpec, p: float) -> float:
    """Cheapest compromise point in [p0*, 1/2]: today's move vs tomorrow's flip."""
    regions = region_partition(params, cost)
    lo = max(regions.p0_star, 0.0)
    return _interior_minimizer(cost, p, params.beta * params.pi, lo, 0.5)


def interior_minimizer_C(params: ModelParams, cost: CostSpec, p: float) -> float:
    """Mirror of interior_minimizer_B on [1/2, p1*] with weight beta*(1-pi)."""
    regions = region_partition(params, cost)
    hi = min(regions.p1_star, 1.0)
    return _interior_minimizer(cost, p, params.beta * (1.0 - params.pi), 0.5, hi)


def period1_solve(params: ModelParams, cost: CostSpec, p: float, s: int) -> Period1Solution:
    """First-period optimum over the four candidate moves.

    Candidates: stay put, the two interior compromise points, and the
    jump to 1/2. Ties go to the candidate closest to p, then closest to
    1/2. The chosen move never increases the distance to 1/2.
    """
    candidates = [
        (p, INACTION),
        (interior_minimizer_B(params, cost, p), INTERIOR_B),
        (interior_minimizer_C(params, cost, p), INTERIOR_C),
        (0.5, MEDIAN),
    ]
    evaluations = []
    for candidate, provenance in candidates:
        objective = (
            stage_payoff(s, candidate, params.H)
            - evaluate_cost(cost, candidate - p)
            + params.beta * expected_continuation_2(params, cost, candidate)
        )
        evaluations.append(CandidateEvaluation(candidate, float(objective), provenance))
    best = max(
        evaluations,
        key=lambda e: (e.objective, -abs(e.candidate - p), -abs(e.candidate - 0.5)),
    )
    return Period1Solution(p_next=best.candidate, value=best.objective, candidates=tuple(evaluations))


def _cost_matrix(cost: CostSpec, grid: Grid) -> np.ndarray:
    """costs[j, i] = c(points[j] - points[i]) for destination j, source i."""
    disp = grid.points[:, None] - grid.points[None, :]
    return evaluate_cost(cost, disp)


def _stage_vector(params: ModelParams, grid: Grid, s: int) -> np.ndarray:
    return stage_payoff(s, grid.points, params.H)


def _break_tie(tied: np.ndarray, src: int, grid: Grid, prefer_right: bool) -> int:
    pts = grid.points
    move = np.abs(pts[tied] - pts[src])
    tied = tied[move == move.min()]
    dist_mid = np.abs(pts[tied] - 0.5)
    tied = tied[dist_mid == dist_mid.min()]
    if tied.size > 1:
        # Equidistant pair straddling 1/2: take the mover's preferred side.
        side = tied[pts[tied] > 0.5] if prefer_right else tied[pts[tied] < 0.5]
        if side.size:
            tied = side
    return int(tied[0])


def _greedy(base: np.ndarray, costmat: np.ndarray, grid: Grid, prefer_right: bool):
    """Per source point, maximize base[j] - costmat[j, i] over destinations j."""
    scores = base[:, None] - costmat
    best = scores.max(axis=0)
    idx = scores.argmax(axis=0)
    tie_counts = (scores == best[None, :]).sum(axis=0)
    for i in np.flatnonzero(tie_counts > 1):
        idx[i] = _break_tie(np.flatnonzero(scores[:, i] == best[i]), i, grid, prefer_right)
    return idx, best


def bellman_apply(params: ModelParams, cost: CostSpec, grid: Grid, v: ValueTable) -> ValueTable:
    """One synchronous sweep of the Bellman operator over the grid."""
    costmat = _cost_matrix(cost, grid)
    continuation = params.pi * v.v1 + (1.0 - params.pi) * v.v0
    new = []
    for s in (0, 1):
        base = _stage_vector(params, grid, s) + params.beta * continuation
        new.append((base[:, None] - costmat).max(axis=0))
    return ValueTable(grid=grid, v0=new[0], v1=new[1])


def solve_infinite(
    params: ModelParams,
    cost: CostSpec,
    grid: Grid,
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> InfiniteHorizonSolution:
    """Value iteration from zero until the sup-norm residual drops below tol.

    The greedy policy is extracted from the converged table with the
    module's tie-breaking. Non-convergence within max_iter is flagged,
    not raised; the best tables found are still returned.
    """
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    costmat = _cost_matrix(cost, grid)
    stage = {s: _stage_vector(params, grid, s) for s in (0, 1)}
    v0 = np.zeros(grid.n)
    v1 = np.zeros(grid.n)
    scratch = np.empty((grid.n, grid.n))
    residual = math.inf
    iterations = 0
    while iterations < max_iter:
        continuation = params.pi * v1 + (1.0 - params.pi) * v0
        residual = 0.0
        new = []
        for s, old in ((0, v0), (1, v1)):
            base = stage[s] + params.beta * continuation
            np.subtract(base[:, None], costmat, out=scratch)
            fresh = scratch.max(axis=0)
            residual = max(residual, float(np.abs(fresh - old).max()))
            new.append(fresh)
        v0, v1 = new
        iterations += 1
        if residual <= tol:
            break
    continuation = params.pi * v1 + (1.0 - params.pi) * v0
    policies = []
    for s in (0, 1):
        base = stage[s] + params.beta * continuation
        idx, _ = _greedy(base, costmat, grid, prefer_right=(s == 1))
        policies.append(grid.points[idx])
    return InfiniteHorizonSolution(
        value=ValueTable(grid=grid, v0=v0, v1=v1),
        policy=PolicyTable(grid=grid, sigma0=policies[0], sigma1=policies[1]),
        residual=residual,
        iterations=iterations,
        converged=residual <= tol,
    )


def verify_polarization_pull(
    value: ValueTable,
    policy: PolicyTable,
    value_tol: float = 1e-9,
) -> list[Violation]:
    """Check the converged tables for the pull/peak/monotonicity properties.

    Returns the violations found (expected empty for converged solves):
    the policy must never move past 1/2 nor away from it, the value must
    peak at 1/2 (monotone up then down, within value_tol), and the policy
    must be monotone on each side of 1/2 up to one grid step of slack.
    """
    grid = value.grid
    pts = grid.points
    mid = grid.mid
    slack = grid.step + 1e-12
    violations: list[Violation] = []
    for s in (0, 1):
        sigma = policy.moves(s)
        vs = value.values(s)
        lower = np.minimum(pts, 0.5)
        upper = np.maximum(pts, 0.5)
        for i in np.flatnonzero((sigma < lower) | (sigma > upper)):
            violations.append(
                Violation("pull", s, float(pts[i]), f"sigma={sigma[i]!r} outside [{lower[i]}, {upper[i]}]")
            )
        up = np.diff(vs[: mid + 1])
        for i in np.flatnonzero(up < -value_tol):
            violations.append(Violation("value_peak", s, float(pts[i]), f"drop {up[i]:.3e} left of 1/2"))
        down = np.diff(vs[mid:])
        for i in np.flatnonzero(down > value_tol):
            violations.append(
                Violation("value_peak", s, float(pts[mid + i]), f"rise {down[i]:.3e} right of 1/2")
            )
        dsig = np.diff(sigma[: mid + 1])
        for i in np.flatnonzero(dsig < -slack):
            violations.append(Violation("policy_monotone", s, float(pts[i]), f"drop {dsig[i]:.3e}"))
        dsig = np.diff(sigma[mid:])
        for i in np.flatnonzero(dsig < -slack):
            violations.append(Violation("policy_monotone", s, float(pts[mid + i]), f"drop {dsig[i]:.3e}"))
    return violations


@dataclass(frozen=True)
class CostComparisonReport:
    mode: str
    policy_base: PolicyTable
    policy_costlier: PolicyTable
    violations: list[Violation]


def _one_step_policy(params, cost, grid, continuation) -> PolicyTable:
    costmat = _cost_matrix(cost, grid)
    policies = []
    for s in (0, 1):
        base = _stage_vector(params, grid, s) + params.beta * continuation
        idx, _ = _greedy(base, costmat, grid, prefer_right=(s == 1))
        policies.append(grid.points[idx])
    return PolicyTable(grid=grid, sigma0=policies[0], sigma1=policies[1])


def compare_cost_technologies(
    params: ModelParams,
    cost_base: CostSpec,
    cost_costlier: CostSpec,
    grid: Grid,
    mode: str = "resolved",
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> CostComparisonReport:
    """Compare one-step moves under a cost technology and a costlier one.

    The costlier technology must cost-dominate the base (checked; raises
    otherwise). Moves under the costlier technology should be weakly
    smaller toward 1/2 at every grid point, up to one grid step of slack.

    mode="fixed" holds the continuation fixed at the base technology's
    converged value function for both maximizations (the one-step reading
    of the shrinkage result); mode="resolved" lets each technology use
    its own converged value function.
    """
    if mode not in ("resolved", "fixed"):
        raise ValueError(f"unknown comparison mode {mode!r}")
    samples = np.linspace(0.0, 1.0, 201)
    if not cost_dominates(cost_costlier, cost_base, samples):
        raise ValueError("costlier technology does not cost-dominate the base")
    sol_base = solve_infinite(params, cost_base, grid, tol=tol, max_iter=max_iter)
    if mode == "fixed":
        continuation = params.pi * sol_base.value.v1 + (1.0 - params.pi) * sol_base.value.v0
        policy_base = _one_step_policy(params, cost_base, grid, continuation)
        policy_costlier = _one_step_policy(params, cost_costlier, grid, continuation)
    else:
        policy_base = sol_base.policy
        policy_costlier = solve_infinite(params, cost_costlier, grid, tol=tol, max_iter=max_iter).policy
    pts = grid.points
    mid = grid.mid
    slack = grid.step + 1e-12
    violations: list[Violation] = []
    for s in (0, 1):
        sb = policy_base.moves(s)
        sc = policy_costlier.moves(s)
        for i in range(grid.n):
            if i <= mid and sc[i] > sb[i] + slack:
                violations.append(
                    Violation("shrink", s, float(pts[i]), f"costlier move {sc[i]!r} > base {sb[i]!r}")
                )
            elif i >= mid and sc[i] < sb[i] - slack:
                violations.append(
                    Violation("shrink", s, float(pts[i]), f"costlier move {sc[i]!r} < base {sb[i]!r}")
                )
    return CostComparisonReport(
        mode=mode,
        policy_base=policy_base,
        policy_costlier=policy_costlier,
        violations=violations,
    )


def intervention_measure(policy: PolicyTable) -> dict[int, float]:
    """Fraction of grid points where the elite moves, per state."""
    out = {}
    for s in (0, 1):
        moved = policy.moves(s) != policy.grid.points
        out[s] = float(moved.mean())
    return out
