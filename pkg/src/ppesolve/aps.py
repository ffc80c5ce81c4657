"""Set-operator iteration over payoff polygons.

For each action profile the incentive constraints are expressed purely
in the continuation mapping (the promised value is substituted out), the
continuation polytope W^Y is cut by those rows, its vertices are pushed
through the discounted-average map, and the per-profile payoff sets are
hulled together.  Iterating that operator from the individually rational
feasible set and stopping on an area-difference threshold yields an
outer bound on the equilibrium payoff set.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .game import StageGame, individually_rational_set
from .geometry import (
    DEFAULT_TOL,
    PolygonV,
    Tolerances,
    area,
    convex_hull,
    halfspace_rows,
    hausdorff,
    intersect_polygons,
    rdp_simplify,
)
from .vertex_enum import (
    DEFAULT_VERTEX_CAP,
    affine_image_2d,
    enumerate_product,
    product_polytope,
)


@dataclass(frozen=True)
class ICSystem:
    """Deviation inequalities for one profile, over continuation space.

    Rows are in n.gamma <= b form with unit normals; a deviation whose
    signal distribution matches the profile's collapses to a constant
    row, which either drops out or marks the profile unenforceable.
    """

    profile: tuple
    normals: np.ndarray  # (r, 2S)
    offsets: np.ndarray  # (r,)
    labels: tuple  # (player index, deviation action index) per row
    infeasible: bool = False


@dataclass(frozen=True)
class SolverConfig:
    delta: float
    epsilon: float = 0.005
    theta: float = 0.0
    max_iter: int = 200
    hausdorff_epsilon: float = 1e-6
    eps_point: float = 1e-9
    eps_side: float = 1e-9
    vertex_cap: int = DEFAULT_VERTEX_CAP

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class BResult:
    set: PolygonV  # B(W), after optional boundary simplification
    per_action: dict  # profile label tuple -> PolygonV (possibly empty)
    truncated: bool


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    vertices: np.ndarray
    area: float
    area_diff: float
    hausdorff_diff: float
    enforceable: dict  # profile label tuple -> bool ({} for iteration 0)
    wall_ms: float


@dataclass(frozen=True)
class Report:
    trace: tuple  # of IterationTrace
    converged: bool
    stop_reason: str  # area_epsilon | hausdorff_epsilon | max_iter | empty_set | truncated
    final_set: PolygonV
    config: SolverConfig
    tolerances: Tolerances
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1


@dataclass(frozen=True)
class Certificate:
    gamma: np.ndarray  # (S, 2): continuation pair per signal
    max_violation: float


@dataclass(frozen=True)
class Refusal:
    row: str  # human-readable description of the most-violated row
    violation: float


def ic_constraints(game: StageGame, a: tuple, delta: float) -> ICSystem:
    """Deviation rows in continuation space for profile `a`.

    Substituting the promised-value identity leaves, per player i and
    deviation d: delta * sum_y (rho(y|a) - rho(y|d-profile)) * gamma_i(y)
    >= (1-delta) * (u_i(d-profile) - u_i(a)).
    """
    S = game.num_signals
    rho_a = game.signal_probs[a[0], a[1]]
    u_a = game.payoffs[a[0], a[1]]
    normals, offsets, labels = [], [], []
    infeasible = False
    zero_tol = 1e-12 * max(1.0, game.payoff_magnitude)
    for i in (0, 1):
        for d in range(game.num_actions[i]):
            if d == a[i]:
                continue
            dev = (d, a[1]) if i == 0 else (a[0], d)
            rho_d = game.signal_probs[dev[0], dev[1]]
            gain = game.payoffs[dev[0], dev[1]][i] - u_a[i]
            n = np.zeros(2 * S)
            n[2 * np.arange(S) + i] = -delta * (rho_a - rho_d)
            b = -(1.0 - delta) * gain
            norm = float(np.linalg.norm(n))
            if norm <= zero_tol:
                if b < -zero_tol:
                    infeasible = True
                continue  # 0 <= b rows are vacuous
            normals.append(n / norm)
            offsets.append(b / norm)
            labels.append((i, d))
    if normals:
        normals = np.array(normals)
        offsets = np.array(offsets)
    else:
        normals = np.zeros((0, 2 * S))
        offsets = np.zeros(0)
    return ICSystem(tuple(a), normals, offsets, tuple(labels), infeasible)


def _payoff_map(game: StageGame, a: tuple, delta: float):
    """v = (1-delta) u(a) + delta sum_y rho(y|a) gamma(y) as (M, c)."""
    S = game.num_signals
    rho = game.signal_probs[a[0], a[1]]
    M = np.zeros((2, 2 * S))
    M[0, 2 * np.arange(S)] = delta * rho
    M[1, 2 * np.arange(S) + 1] = delta * rho
    c = (1.0 - delta) * game.payoffs[a[0], a[1]]
    return M, c


def enforceable_payoffs(
    game: StageGame,
    a: tuple,
    delta: float,
    w: PolygonV,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = DEFAULT_VERTEX_CAP,
):
    """P(a): image of the IC-cut continuation polytope, as a polygon.

    Returns (PolygonV, truncated).  An empty polygon means `a` is not
    enforceable against W.
    """
    if w.is_empty:
        return PolygonV.empty(), False
    ic = ic_constraints(game, a, delta)
    if ic.infeasible:
        return PolygonV.empty(), False
    vs, _ = enumerate_product(w, game.num_signals, ic.normals, ic.offsets, tol, cap)
    if vs.is_empty:
        return PolygonV.empty(), vs.truncated
    M, c = _payoff_map(game, a, delta)
    pts = affine_image_2d(vs, M, c)
    return convex_hull(pts, tol), vs.truncated


def _resolve_threads() -> int:
    env = os.environ.get("PPE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def apply_B(
    game: StageGame,
    delta: float,
    w: PolygonV,
    theta: float = 0.0,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = DEFAULT_VERTEX_CAP,
    executor: ThreadPoolExecutor | None = None,
) -> BResult:
    """One application of the set operator, with optional simplification.

    Per-profile sets are computed independently (concurrently when an
    executor is given) and merged in fixed profile order, so the result
    does not depend on scheduling.
    """
    profiles = game.profiles()

    def one(a):
        return enforceable_payoffs(game, a, delta, w, tol, cap)

    if executor is not None:
        results = list(executor.map(one, profiles))
    else:
        results = [one(a) for a in profiles]

    per_action = {}
    pts = []
    truncated = False
    for a, (poly, trunc) in zip(profiles, results):
        label = (game.action_labels[0][a[0]], game.action_labels[1][a[1]])
        per_action[label] = poly
        truncated = truncated or trunc
        if not poly.is_empty:
            pts.append(poly.vertices)
    if not pts:
        return BResult(PolygonV.empty(), per_action, truncated)
    hull = convex_hull(np.vstack(pts), tol)
    if theta > 0:
        hull = rdp_simplify(hull, theta, tol)
    return BResult(hull, per_action, truncated)


def solve(game: StageGame, config: SolverConfig) -> Report:
    """Iterate the operator from W0 until the stop rule fires.

    The area-difference rule applies while the iterate is
    full-dimensional at scale epsilon; once its area drops below epsilon
    the rule switches to a Hausdorff-distance threshold so collapse to a
    segment or point is detected rather than mistaken for convergence.
    """
    scale = max(1.0, game.payoff_magnitude)
    tol = Tolerances(config.eps_point, config.eps_side).scaled(scale)
    w = individually_rational_set(game, tol).individually_rational

    trace = [
        IterationTrace(0, w.vertices, area(w), 0.0, 0.0, {}, 0.0)
    ]
    if w.is_empty:
        return Report(
            tuple(trace),
            False,
            "empty_set",
            w,
            config,
            tol,
            "the individually rational feasible set is already empty",
        )

    threads = _resolve_threads()
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    converged = False
    stop_reason = "max_iter"
    message = ""
    try:
        for k in range(1, config.max_iter + 1):
            t0 = time.perf_counter()
            res = apply_B(
                game, config.delta, w, config.theta, tol, config.vertex_cap, executor
            )
            wall_ms = (time.perf_counter() - t0) * 1e3
            # boundary simplification trims vertices inward, so a later
            # application of the operator may partially regrow past the
            # previous iterate; clipping restores the monotone descent
            new = intersect_polygons(res.set, w, tol)
            a_prev, a_new = area(w), area(new)
            hd = hausdorff(w, new) if not new.is_empty else float("nan")
            enforceable = {lab: not p.is_empty for lab, p in res.per_action.items()}
            trace.append(
                IterationTrace(
                    k, new.vertices, a_new, a_prev - a_new, hd, enforceable, wall_ms
                )
            )
            if res.truncated:
                stop_reason = "truncated"
                message = (
                    "vertex cap exceeded: the result is not a valid upper bound"
                )
                w = new
                break
            if new.is_empty:
                stop_reason = "empty_set"
                message = (
                    "the operator returned the empty set: this outer method "
                    "found no pure-strategy equilibrium payoffs"
                )
                w = new
                break
            if a_new >= config.epsilon:
                # the relative guard keeps a steady geometric collapse from
                # passing as convergence while its area is still just above
                # epsilon; real fixed points have vanishing relative change
                if (
                    abs(a_prev - a_new) < config.epsilon
                    and abs(a_prev - a_new) <= 0.1 * a_new
                ):
                    converged = True
                    stop_reason = "area_epsilon"
                    w = new
                    break
            else:
                if hd < config.hausdorff_epsilon:
                    converged = True
                    stop_reason = "hausdorff_epsilon"
                    w = new
                    break
            w = new
    finally:
        if executor is not None:
            executor.shutdown()
    return Report(tuple(trace), converged, stop_reason, w, config, tol, message)


def verify_enforceability(
    game: StageGame,
    a: tuple,
    delta: float,
    v,
    w: PolygonV,
    tol: Tolerances = DEFAULT_TOL,
):
    """Independent check: recover an explicit continuation mapping for v.

    Solves the stacked feasibility system (continuations in W, deviation
    rows, promised value pinned to v) with an LP that never touches the
    enumeration path.  Returns a Certificate or a Refusal naming the
    most-violated row.
    """
    v = np.asarray(v, dtype=float).reshape(2)
    S = game.num_signals
    prod = product_polytope(w, S)
    ic = ic_constraints(game, a, delta)
    A_ub = np.vstack([prod.normals, ic.normals])
    b_ub = np.concatenate([prod.offsets, ic.offsets])
    row_names = [
        f"continuation row {j % (prod.num_rows // S)} of signal "
        f"{game.signal_labels[j // (prod.num_rows // S)]}"
        for j in range(prod.num_rows)
    ] + [
        f"deviation of player {i + 1} to {game.action_labels[i][d]!r}"
        for i, d in ic.labels
    ]
    M, c = _payoff_map(game, a, delta)
    A_eq, b_eq = M, v - c
    if ic.infeasible:
        # a same-signal deviation is strictly profitable: no gamma helps
        return Refusal("profile has a profitable undetectable deviation", float("inf"))

    dim = 2 * S
    res = linprog(
        np.zeros(dim),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(None, None)] * dim,
        method="highs",
    )
    if res.status == 0:
        x = res.x
        viol = max(
            float(np.max(A_ub @ x - b_ub, initial=0.0)),
            float(np.max(np.abs(A_eq @ x - b_eq), initial=0.0)),
        )
        return Certificate(x.reshape(S, 2), max(0.0, viol))

    # infeasible: relax all rows by a common t and report the binding one
    n_ub, n_eq = len(b_ub), len(b_eq)
    A = np.zeros((n_ub + 2 * n_eq, dim + 1))
    A[:n_ub, :dim] = A_ub
    A[n_ub : n_ub + n_eq, :dim] = A_eq
    A[n_ub + n_eq :, :dim] = -A_eq
    A[:, dim] = -1.0
    rhs = np.concatenate([b_ub, b_eq, -b_eq])
    obj = np.zeros(dim + 1)
    obj[dim] = 1.0
    relaxed = linprog(
        obj,
        A_ub=A,
        b_ub=rhs,
        bounds=[(None, None)] * dim + [(0, None)],
        method="highs",
    )
    if relaxed.status != 0:
        return Refusal("relaxation LP failed", float("inf"))
    x = relaxed.x[:dim]
    slacks = np.concatenate([A_ub @ x - b_ub, np.abs(A_eq @ x - b_eq)])
    names = row_names + ["promised value, player 1", "promised value, player 2"]
    worst = int(np.argmax(slacks))
    return Refusal(names[worst], float(slacks[worst]))
