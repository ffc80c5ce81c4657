"""Vertex enumeration for bounded H-polytopes in continuation space.

The enumerator keeps a double description of the working polytope:
vertex coordinates plus, per vertex, the bitmask of active rows and an
explicit edge list.  Halfspaces are inserted one at a time; each cut
clips crossing edges and reconstructs the adjacency on the new facet
with the combinatorial active-set test.  Everything is deterministic:
rows are inserted in a fixed heuristic order and results are returned in
lexicographic vertex order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .geometry import PolygonV, Tolerances, DEFAULT_TOL, halfspace_rows

DEFAULT_VERTEX_CAP = 200_000


class UnboundedPolytopeError(ValueError):
    """A recession direction survived: vertex enumeration is undefined."""


@dataclass(frozen=True)
class HPolytope:
    """n.x <= b rows in R^dim."""

    dim: int
    normals: np.ndarray  # (m, dim)
    offsets: np.ndarray  # (m,)

    def __post_init__(self):
        n = np.asarray(self.normals, dtype=float).reshape(-1, self.dim)
        b = np.asarray(self.offsets, dtype=float).reshape(-1)
        if len(n) != len(b):
            raise ValueError("normals/offsets length mismatch")
        if not np.all(np.isfinite(n)) or not np.all(np.isfinite(b)):
            raise ValueError("non-finite constraint data")
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "offsets", b)

    @property
    def num_rows(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class VertexSet:
    """Enumerated vertices with their active row index sets."""

    points: np.ndarray  # (n, dim)
    tags: tuple  # tuple of frozenset[int], aligned with points
    truncated: bool = False

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.num_points == 0


def _empty_vertex_set(dim: int, truncated: bool = False) -> VertexSet:
    return VertexSet(np.zeros((0, dim)), (), truncated)


# ---------------------------------------------------------------------------
# bitmask helpers


def _words_for(nrows: int) -> int:
    return max(1, (nrows + 63) // 64)


def _bit(row: int, words: int) -> np.ndarray:
    m = np.zeros(words, dtype=np.uint64)
    m[row // 64] = np.uint64(1) << np.uint64(row % 64)
    return m


class _DDState:
    """Mutable working polytope: points, active-row masks, edge list."""

    __slots__ = ("points", "masks", "edges")

    def __init__(self, points, masks, edges):
        self.points = points  # (n, dim) float64
        self.masks = masks  # (n, words) uint64
        self.edges = edges  # (e, 2) int64, sorted pairs, unique

    @property
    def num_points(self):
        return self.points.shape[0]


def _sorted_unique_edges(edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    e = np.sort(edges, axis=1)
    return np.unique(e, axis=0)


def _cluster_points(points: np.ndarray, eps: float):
    """Greedy lexicographic clustering; returns (labels, n_clusters)."""
    n = len(points)
    order = np.lexsort(points.T[::-1])
    labels = np.full(n, -1, dtype=np.int64)
    reps: list[np.ndarray] = []
    for idx in order:
        p = points[idx]
        found = -1
        for c in range(len(reps) - 1, -1, -1):
            if p[0] - reps[c][0] > eps:
                break
            if np.linalg.norm(p - reps[c]) <= eps:
                found = c
                break
        if found < 0:
            reps.append(p)
            found = len(reps) - 1
        labels[idx] = found
    return labels, len(reps)


def _insert_halfspace(
    state: _DDState,
    normal: np.ndarray,
    offset: float,
    row: int,
    dim: int,
    words: int,
    tol: Tolerances,
):
    """Cut the working polytope by normal.x <= offset.  Returns the new
    state, or None when the cut empties the polytope."""
    s = state.points @ normal - offset
    eps = tol.eps_side * max(1.0, abs(offset))
    status = np.where(s < -eps, 0, np.where(s <= eps, 1, 2)).astype(np.int8)

    if not np.any(status <= 1):
        return None
    bit = _bit(row, words)
    if not np.any(status == 2):
        on = status == 1
        state.masks[on] |= bit
        return state

    keep = status <= 1
    new_index = np.full(state.num_points, -1, dtype=np.int64)
    new_index[keep] = np.arange(int(keep.sum()))
    pts_kept = state.points[keep]
    masks_kept = state.masks[keep].copy()
    on_kept = status[keep] == 1
    masks_kept[on_kept] |= bit

    e0, e1 = state.edges[:, 0], state.edges[:, 1]
    st0, st1 = status[e0], status[e1]
    keep_edge = (st0 <= 1) & (st1 <= 1)
    kept_edges = state.edges[keep_edge]
    kept_edges = np.column_stack([new_index[kept_edges[:, 0]], new_index[kept_edges[:, 1]]])

    cross = ((st0 == 0) & (st1 == 2)) | ((st0 == 2) & (st1 == 0))
    ce = state.edges[cross]
    if len(ce):
        swap = status[ce[:, 0]] == 2
        ce[swap] = ce[swap][:, ::-1]  # first endpoint strictly inside
        u, v = ce[:, 0], ce[:, 1]
        t = (s[u] / (s[u] - s[v]))[:, None]
        cut_pts = state.points[u] + t * (state.points[v] - state.points[u])
        cut_masks = (state.masks[u] & state.masks[v]) | bit

        # merge coincident cut points into clusters (centroid + mask union)
        labels, n_clusters = _cluster_points(cut_pts, tol.eps_point)
        new_pts = np.zeros((n_clusters, dim))
        new_masks = np.zeros((n_clusters, words), dtype=np.uint64)
        counts = np.zeros(n_clusters)
        for k in range(len(cut_pts)):
            c = labels[k]
            new_pts[c] += cut_pts[k]
            new_masks[c] |= cut_masks[k]
            counts[c] += 1
        new_pts /= counts[:, None]

        # merge clusters that coincide with a kept on-plane vertex
        on_ids = np.where(on_kept)[0]
        cluster_target = np.arange(n_clusters) + len(pts_kept)
        drop = np.zeros(n_clusters, dtype=bool)
        if len(on_ids):
            d = np.linalg.norm(
                new_pts[:, None, :] - pts_kept[on_ids][None, :, :], axis=2
            )
            hit = np.argmin(d, axis=1)
            close = d[np.arange(n_clusters), hit] <= tol.eps_point
            for c in np.where(close)[0]:
                tgt = on_ids[hit[c]]
                masks_kept[tgt] |= new_masks[c]
                cluster_target[c] = tgt
                drop[c] = True
        if np.any(drop):
            remap = np.full(n_clusters, -1, dtype=np.int64)
            remap[~drop] = np.arange(int((~drop).sum())) + len(pts_kept)
            cluster_target = np.where(drop, cluster_target, remap)
            new_pts = new_pts[~drop]
            new_masks = new_masks[~drop]

        cut_target = cluster_target[labels]
        clipped_edges = np.column_stack([new_index[u], cut_target])
    else:
        new_pts = np.zeros((0, dim))
        new_masks = np.zeros((0, words), dtype=np.uint64)
        clipped_edges = np.zeros((0, 2), dtype=np.int64)

    all_pts = np.vstack([pts_kept, new_pts])
    all_masks = np.vstack([masks_kept, new_masks])

    # adjacency on the fresh facet: kept on-plane vertices + new vertices
    facet_ids = np.concatenate(
        [np.where(on_kept)[0], np.arange(len(new_pts)) + len(pts_kept)]
    ).astype(np.int64)
    if len(facet_ids) >= 2:
        pairs = _kernels.adjacent_pairs(all_masks[facet_ids], dim - 1)
        facet_edges = facet_ids[pairs]
    else:
        facet_edges = np.zeros((0, 2), dtype=np.int64)

    edges = _sorted_unique_edges(
        np.vstack([kept_edges, clipped_edges, facet_edges]).astype(np.int64)
    )
    return _DDState(all_pts, all_masks, edges)


def _insertion_order(normals, offsets, center):
    """Most-cutting rows first, judged against a deterministic center."""
    norms = np.linalg.norm(normals, axis=1)
    norms[norms == 0] = 1.0
    tightness = (normals @ center - offsets) / norms
    return np.argsort(-tightness, kind="stable")


def _finalize(
    points: np.ndarray,
    polytope: HPolytope,
    tol: Tolerances,
    truncated: bool,
    rank_check_limit: int = 2000,
) -> VertexSet:
    """Recompute active sets against the polytope's own rows, filter
    non-vertices, and emit in lexicographic order."""
    dim = polytope.dim
    if len(points) == 0:
        return _empty_vertex_set(dim, truncated)
    n_rows, b_rows = polytope.normals, polytope.offsets
    slack = points @ n_rows.T - b_rows
    eps = tol.eps_side * np.maximum(1.0, np.abs(b_rows))
    active = np.abs(slack) <= eps
    enough = active.sum(axis=1) >= dim
    points, active = points[enough], active[enough]
    if len(points) <= rank_check_limit:
        ok = np.array(
            [
                np.linalg.matrix_rank(n_rows[active[k]], tol=1e-8) >= dim
                for k in range(len(points))
            ]
        )
        if len(ok):
            points, active = points[ok], active[ok]
    if len(points) == 0:
        return _empty_vertex_set(dim, truncated)
    order = np.lexsort(points.T[::-1])
    points = points[order]
    active = active[order]
    tags = tuple(frozenset(np.where(a)[0].tolist()) for a in active)
    return VertexSet(points, tags, truncated)


# ---------------------------------------------------------------------------
# public operations


def product_polytope(w, num_signals: int) -> HPolytope:
    """Replicate a 2-D halfspace system on each signal's coordinate block.

    `w` is a PolygonH, a PolygonV (degenerate sets use equality pairs),
    or a (normals, offsets) pair.  Row j of signal block y lands at index
    y * m + j, acting on coordinates (2y, 2y+1).
    """
    normals2, offsets2 = _rows_of(w)
    m = len(offsets2)
    dim = 2 * num_signals
    normals = np.zeros((m * num_signals, dim))
    offsets = np.zeros(m * num_signals)
    for y in range(num_signals):
        normals[y * m : (y + 1) * m, 2 * y : 2 * y + 2] = normals2
        offsets[y * m : (y + 1) * m] = offsets2
    return HPolytope(dim, normals, offsets)


def _rows_of(w):
    if isinstance(w, PolygonV):
        return halfspace_rows(w)
    if hasattr(w, "normals"):
        return np.asarray(w.normals, dtype=float), np.asarray(w.offsets, dtype=float)
    normals, offsets = w
    return np.asarray(normals, dtype=float), np.asarray(offsets, dtype=float)


def _polygon_seed(w: PolygonV, tol: Tolerances):
    """2-D seed data: rows, per-vertex active row sets, edge list."""
    normals, offsets = halfspace_rows(w, tol)
    m = w.num_vertices
    if w.is_point:
        return normals, offsets, w.vertices, [{0, 1, 2, 3}], []
    if w.is_segment:
        return normals, offsets, w.vertices, [{0, 1, 3}, {0, 1, 2}], [(0, 1)]
    vact = [{(k - 1) % m, k} for k in range(m)]
    edges = [(k, (k + 1) % m) for k in range(m)]
    return normals, offsets, w.vertices, vact, edges


def enumerate_product(
    w: PolygonV,
    num_signals: int,
    extra_normals: np.ndarray,
    extra_offsets: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = DEFAULT_VERTEX_CAP,
):
    """Vertices of (W^num_signals intersected with extra rows).

    Returns (VertexSet, HPolytope) where the polytope stacks the product
    rows first and the extra rows after them; tags index that stacking.
    The product seed is built directly from W's vertex tuples, so only
    the extra rows go through incremental insertion.
    """
    n2, b2, v2, vact, edges2 = _polygon_seed(w, tol)
    S = num_signals
    dim = 2 * S
    m2 = len(b2)
    mv = len(v2)
    extra_normals = np.asarray(extra_normals, dtype=float).reshape(-1, dim)
    extra_offsets = np.asarray(extra_offsets, dtype=float).reshape(-1)
    stacked = HPolytope(
        dim,
        np.vstack([product_polytope((n2, b2), S).normals, extra_normals]),
        np.concatenate([np.tile(b2, S), extra_offsets]),
    )
    total_rows = m2 * S + len(extra_offsets)
    words = _words_for(total_rows)

    total = mv**S
    if total > cap:
        # seed alone exceeds the cap: emit a truncated prefix, uncut
        digits = _mixed_radix_prefix(mv, S, cap)
        pts = _tuple_points(digits, v2, S)
        return _finalize(pts, stacked, tol, truncated=True), stacked

    digits = np.stack(
        np.meshgrid(*([np.arange(mv)] * S), indexing="ij"), axis=-1
    ).reshape(-1, S)
    pts = _tuple_points(digits, v2, S)
    masks = np.zeros((total, words), dtype=np.uint64)
    for y in range(S):
        for k in range(mv):
            tmpl = np.zeros(words, dtype=np.uint64)
            for r in vact[k]:
                tmpl |= _bit(y * m2 + r, words)
            masks[digits[:, y] == k] |= tmpl

    strides = mv ** np.arange(S - 1, -1, -1)
    edge_parts = []
    for y in range(S):
        for a_, b_ in edges2:
            ids = np.where(digits[:, y] == a_)[0]
            edge_parts.append(np.column_stack([ids, ids + (b_ - a_) * strides[y]]))
    edges = (
        _sorted_unique_edges(np.vstack(edge_parts).astype(np.int64))
        if edge_parts
        else np.zeros((0, 2), dtype=np.int64)
    )
    state = _DDState(pts.copy(), masks, edges)

    center = pts.mean(axis=0)
    order = _insertion_order(extra_normals, extra_offsets, center)
    truncated = False
    for k in order:
        state = _insert_halfspace(
            state,
            extra_normals[k],
            extra_offsets[k],
            m2 * S + int(k),
            dim,
            words,
            tol,
        )
        if state is None:
            return _empty_vertex_set(dim), stacked
        if state.num_points > cap:
            truncated = True
            break
    return _finalize(state.points, stacked, tol, truncated), stacked


def _tuple_points(digits, v2, S):
    pts = np.zeros((len(digits), 2 * S))
    for y in range(S):
        pts[:, 2 * y : 2 * y + 2] = v2[digits[:, y]]
    return pts


def _mixed_radix_prefix(mv, S, count):
    out = np.zeros((count, S), dtype=np.int64)
    vals = np.arange(count)
    for y in range(S - 1, -1, -1):
        out[:, y] = vals % mv
        vals //= mv
    return out


def _coordinate_bounds(p: HPolytope):
    """Per-coordinate LP bounds; raises on unbounded, None when empty."""
    lo = np.zeros(p.dim)
    hi = np.zeros(p.dim)
    for k in range(p.dim):
        for sign, tgt in ((1.0, lo), (-1.0, hi)):
            c = np.zeros(p.dim)
            c[k] = sign
            res = linprog(
                c,
                A_ub=p.normals,
                b_ub=p.offsets,
                bounds=[(None, None)] * p.dim,
                method="highs",
            )
            if res.status == 3:
                raise UnboundedPolytopeError(
                    f"coordinate {k} is unbounded ({'below' if sign > 0 else 'above'})"
                )
            if res.status == 2:
                return None
            if res.status != 0:
                raise RuntimeError(f"bounding LP failed: {res.message}")
            tgt[k] = sign * res.fun if sign > 0 else -res.fun
    return lo, hi


def enumerate_vertices(
    p: HPolytope,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = DEFAULT_VERTEX_CAP,
    bounds=None,
) -> VertexSet:
    """All vertices of a bounded H-polytope, in lexicographic order.

    An enclosing padded box seeds the double description; the polytope's
    rows are then inserted most-cutting-first.  Boundedness is certified
    by per-coordinate LPs unless explicit bounds are supplied.
    """
    dim = p.dim
    if bounds is None:
        bb = _coordinate_bounds(p)
        if bb is None:
            return _empty_vertex_set(dim)
        lo, hi = bb
    else:
        lo = np.asarray(bounds[0], dtype=float)
        hi = np.asarray(bounds[1], dtype=float)
    pad = 1.0 + 0.1 * max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    lo = lo - pad
    hi = hi + pad

    m = p.num_rows
    words = _words_for(m + 2 * dim)
    corners = np.stack(
        np.meshgrid(*([np.array([0, 1])] * dim), indexing="ij"), axis=-1
    ).reshape(-1, dim)
    pts = np.where(corners == 1, hi, lo).astype(float)
    masks = np.zeros((len(pts), words), dtype=np.uint64)
    for k in range(dim):
        hi_bit = _bit(m + 2 * k, words)
        lo_bit = _bit(m + 2 * k + 1, words)
        masks[corners[:, k] == 1] |= hi_bit
        masks[corners[:, k] == 0] |= lo_bit
    edge_parts = []
    weights = 2 ** np.arange(dim - 1, -1, -1)
    ids = corners @ weights
    for k in range(dim):
        sel = corners[:, k] == 0
        edge_parts.append(np.column_stack([ids[sel], ids[sel] + weights[k]]))
    edges = _sorted_unique_edges(np.vstack(edge_parts).astype(np.int64))
    order_ids = np.argsort(ids, kind="stable")
    state = _DDState(pts[order_ids], masks[order_ids], edges)

    center = (lo + hi) / 2.0
    truncated = False
    for k in _insertion_order(p.normals, p.offsets, center):
        state = _insert_halfspace(
            state, p.normals[k], p.offsets[k], int(k), dim, words, tol
        )
        if state is None:
            return _empty_vertex_set(dim)
        if state.num_points > cap:
            truncated = True
            break
    return _finalize(state.points, p, tol, truncated)


def affine_image_2d(vs: VertexSet, M: np.ndarray, c) -> np.ndarray:
    """Push every vertex through x -> Mx + c (M is 2 x dim)."""
    M = np.asarray(M, dtype=float)
    c = np.asarray(c, dtype=float).reshape(2)
    if vs.is_empty:
        return np.zeros((0, 2))
    return vs.points @ M.T + c
