"""Tolerance-aware 2-D convex polygon algebra.

All polygons are kept in a canonical V-form: counter-clockwise vertex
order starting at the lexicographically smallest vertex, with duplicate
and collinear vertices removed.  An empty vertex list encodes the empty
set, one vertex a point, two vertices a segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateInputError(ValueError):
    """Raised when a full-dimensional polygon was required."""


class UnboundedSetError(ValueError):
    """Raised when a halfspace system describes an unbounded set."""


@dataclass(frozen=True)
class Tolerances:
    """Absolute comparison thresholds, scaled once per problem instance.

    eps_point: distance below which two points coincide.
    eps_side: signed-distance threshold for on-boundary tests.
    """

    eps_point: float = 1e-9
    eps_side: float = 1e-9

    def __post_init__(self):
        if self.eps_point <= 0 or self.eps_side <= 0:
            raise ValueError("tolerances must be strictly positive")

    def scaled(self, magnitude: float) -> "Tolerances":
        """Scale both thresholds by a payoff-magnitude bound (>= 1)."""
        s = max(1.0, float(magnitude))
        return Tolerances(self.eps_point * s, self.eps_side * s)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class PolygonV:
    """Convex polygon in canonical extreme-point form."""

    vertices: np.ndarray  # (m, 2) float64

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.num_vertices == 0

    @property
    def is_point(self) -> bool:
        return self.num_vertices == 1

    @property
    def is_segment(self) -> bool:
        return self.num_vertices == 2

    @property
    def is_full_dim(self) -> bool:
        return self.num_vertices >= 3

    @staticmethod
    def empty() -> "PolygonV":
        return PolygonV(np.zeros((0, 2)))


@dataclass(frozen=True)
class PolygonH:
    """Convex polygon as n.x <= b rows with unit normals."""

    normals: np.ndarray  # (m, 2), each row unit length
    offsets: np.ndarray  # (m,)

    def __post_init__(self):
        n = np.asarray(self.normals, dtype=float).reshape(-1, 2)
        b = np.asarray(self.offsets, dtype=float).reshape(-1)
        n.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "offsets", b)

    @property
    def num_rows(self) -> int:
        return self.normals.shape[0]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dedup_points(pts: np.ndarray, eps: float) -> np.ndarray:
    """Greedy merge of points within eps, deterministic order."""
    if len(pts) == 0:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    kept = []
    for p in pts:
        dup = False
        for q in reversed(kept):
            if p[0] - q[0] > eps:
                break  # sorted by x: nothing earlier can be within eps
            if np.hypot(*(p - q)) <= eps:
                dup = True
                break
        if not dup:
            kept.append(p)
    return np.array(kept)


def convex_hull(points, tol: Tolerances = DEFAULT_TOL) -> PolygonV:
    """Canonical CCW hull via monotone chain; collinear points removed."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return PolygonV.empty()
    pts = _dedup_points(pts, tol.eps_point)
    if len(pts) == 1:
        return PolygonV(pts)
    if len(pts) == 2:
        return PolygonV(pts)  # already lexicographically sorted

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                c = _cross(o, a, p)
                # drop a if it is (near-)collinear or a right turn
                if c <= tol.eps_side * max(np.hypot(*(a - o)), 1e-300):
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    verts = np.array(lower[:-1] + upper[:-1])
    if len(verts) <= 2:
        # all points collinear: keep the two extreme ones
        return PolygonV(np.array([pts[0], pts[-1]]))
    return canonicalize(verts, tol)


def canonicalize(vertices: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> PolygonV:
    """Rotate a CCW vertex cycle so it starts at the lexicographic minimum."""
    v = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if len(v) <= 1:
        return PolygonV(v)
    start = np.lexsort((v[:, 1], v[:, 0]))[0]
    return PolygonV(np.roll(v, -start, axis=0))


def to_halfspaces(p: PolygonV, tol: Tolerances = DEFAULT_TOL) -> PolygonH:
    """One outward-normal row per edge of a full-dimensional polygon."""
    if not p.is_full_dim:
        raise DegenerateInputError(
            "halfspace form needs >= 3 vertices; use halfspace_rows for "
            "degenerate sets"
        )
    v = p.vertices
    e = np.roll(v, -1, axis=0) - v
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    lens = np.hypot(normals[:, 0], normals[:, 1])
    normals = normals / lens[:, None]
    offsets = np.einsum("ij,ij->i", normals, v)
    return PolygonH(normals, offsets)


def halfspace_rows(p: PolygonV, tol: Tolerances = DEFAULT_TOL):
    """Halfspace rows for any nonempty polygon, degenerate sets included.

    Points and segments are emitted as equality pairs (n.x <= b and
    -n.x <= -b) so that downstream polytope machinery never sees a
    lower-dimensional set as a special case.  Returns (normals, offsets).
    """
    if p.is_empty:
        raise ValueError("empty polygon has no halfspace form")
    if p.is_point:
        x, y = p.vertices[0]
        normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        offsets = np.array([x, -x, y, -y])
        return normals, offsets
    if p.is_segment:
        a, b = p.vertices
        t = b - a
        t = t / np.hypot(*t)
        n = np.array([t[1], -t[0]])
        normals = np.array([n, -n, t, -t])
        offsets = np.array([n @ a, -(n @ a), t @ b, -(t @ a)])
        return normals, offsets
    h = to_halfspaces(p, tol)
    return h.normals.copy(), h.offsets.copy()


def to_vertices(p: PolygonH, tol: Tolerances = DEFAULT_TOL) -> PolygonV:
    """Canonical V-form of a bounded 2-D halfspace system.

    Vertices are pairwise row intersections filtered by feasibility; this
    is exact for the small systems that occur here and has no incremental
    tolerance drift.
    """
    n, b = p.normals, p.offsets
    m = len(n)
    if m == 0:
        raise UnboundedSetError("no constraints: the whole plane")
    _check_bounded_2d(n, b)
    scale = max(1.0, float(np.max(np.abs(b))) if m else 1.0)
    eps = tol.eps_side * scale

    # all pairwise line intersections
    i, j = np.triu_indices(m, k=1)
    det = n[i, 0] * n[j, 1] - n[i, 1] * n[j, 0]
    ok = np.abs(det) > 1e-12
    i, j, det = i[ok], j[ok], det[ok]
    if len(i) == 0:
        return PolygonV.empty()
    x = (b[i] * n[j, 1] - b[j] * n[i, 1]) / det
    y = (n[i, 0] * b[j] - n[j, 0] * b[i]) / det
    cand = np.column_stack([x, y])
    feas = np.all(cand @ n.T - b <= eps, axis=1)
    pts = cand[feas]
    if len(pts) == 0:
        return PolygonV.empty()
    return convex_hull(pts, tol)


def _check_bounded_2d(normals: np.ndarray, offsets: np.ndarray) -> None:
    """Bounded iff the outward normals positively span the plane."""
    angles = np.sort(np.arctan2(normals[:, 1], normals[:, 0]))
    gaps = np.diff(angles, append=angles[0] + 2 * np.pi)
    if np.max(gaps) >= np.pi - 1e-12:
        raise UnboundedSetError("halfspace normals leave a recession direction")


def intersect_halfplane(
    p: PolygonV, normal, offset: float, tol: Tolerances = DEFAULT_TOL
) -> PolygonV:
    """Clip a canonical polygon by n.x <= b (Sutherland-Hodgman walk)."""
    n = np.asarray(normal, dtype=float)
    b = float(offset)
    if p.is_empty:
        return p
    s = p.vertices @ n - b
    eps = tol.eps_side * max(1.0, abs(b))
    if np.all(s <= eps):
        return p
    if np.all(s > eps):
        return PolygonV.empty()
    if p.is_segment:
        (a, c), (sa, sc) = p.vertices, s
        if sa > eps:
            a, c, sa, sc = c, a, sc, sa
        t = sa / (sa - sc)
        cut = a + t * (c - a)
        return convex_hull([a, cut], tol)

    v = p.vertices
    m = len(v)
    out = []
    for k in range(m):
        a, c = v[k], v[(k + 1) % m]
        sa, sc = s[k], s[(k + 1) % m]
        if sa <= eps:
            out.append(a)
        if (sa <= eps) != (sc <= eps):
            t = sa / (sa - sc)
            out.append(a + t * (c - a))
    return convex_hull(out, tol)


def area(p: PolygonV) -> float:
    """Shoelace area; zero for empty, point, and segment sets."""
    if not p.is_full_dim:
        return 0.0
    v = p.vertices
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _point_segment_dist(q, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(q - a)))
    t = np.clip(float((q - a) @ ab) / denom, 0.0, 1.0)
    return float(np.hypot(*(q - (a + t * ab))))


def dist_point_polygon(q, p: PolygonV) -> float:
    """Distance from a point to a nonempty convex polygon."""
    if p.is_empty:
        raise ValueError("empty polygon")
    q = np.asarray(q, dtype=float)
    v = p.vertices
    if p.is_point:
        return float(np.hypot(*(q - v[0])))
    if p.is_segment:
        return _point_segment_dist(q, v[0], v[1])
    h = to_halfspaces(p)
    if np.all(h.normals @ q - h.offsets <= 0.0):
        return 0.0
    m = len(v)
    return min(_point_segment_dist(q, v[k], v[(k + 1) % m]) for k in range(m))


def hausdorff(p: PolygonV, q: PolygonV) -> float:
    """Symmetric Hausdorff distance between nonempty convex polygons.

    For convex sets the supremum is attained at a vertex of one of the
    polygons, so scanning vertices against the other set suffices.
    """
    if p.is_empty or q.is_empty:
        raise ValueError("hausdorff needs nonempty inputs")
    d_pq = max(dist_point_polygon(v, q) for v in p.vertices)
    d_qp = max(dist_point_polygon(v, p) for v in q.vertices)
    return max(d_pq, d_qp)


def _rdp_chain(pts: np.ndarray, theta: float) -> list:
    """Standard recursive simplification of an open polyline."""
    if len(pts) <= 2:
        return list(pts)
    a, b = pts[0], pts[-1]
    d = np.array([_point_segment_dist(p, a, b) for p in pts[1:-1]])
    k = int(np.argmax(d))
    if d[k] <= theta:
        return [a, b]
    left = _rdp_chain(pts[: k + 2], theta)
    right = _rdp_chain(pts[k + 1 :], theta)
    return left[:-1] + right


def rdp_simplify(p: PolygonV, theta: float, tol: Tolerances = DEFAULT_TOL) -> PolygonV:
    """Boundary simplification keeping a subset of the original vertices.

    The closed boundary is split at the two lexicographic extreme
    vertices into two open chains; both anchors always survive.  With
    theta = 0 the polygon is returned unchanged.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if theta == 0 or p.num_vertices <= 3:
        return p
    v = p.vertices
    # canonical form starts at the lexicographic minimum
    hi = int(np.lexsort((v[:, 1], v[:, 0]))[-1])
    chain1 = v[: hi + 1]
    chain2 = np.vstack([v[hi:], v[:1]])
    out = _rdp_chain(chain1, theta)[:-1] + _rdp_chain(chain2, theta)[:-1]
    return convex_hull(out, tol)


def intersect_polygons(p: PolygonV, q: PolygonV, tol: Tolerances = DEFAULT_TOL) -> PolygonV:
    """Intersection of two convex polygons (q may be degenerate)."""
    if p.is_empty or q.is_empty:
        return PolygonV.empty()
    normals, offsets = halfspace_rows(q, tol)
    out = p
    for n, b in zip(normals, offsets):
        out = intersect_halfplane(out, n, b, tol)
        if out.is_empty:
            break
    return out


def contains_point(p: PolygonV, q, slack: float = 1e-9) -> bool:
    """Membership test with absolute slack, valid for degenerate sets."""
    if p.is_empty:
        return False
    return dist_point_polygon(np.asarray(q, dtype=float), p) <= slack


def contains_polygon(outer: PolygonV, inner: PolygonV, slack: float = 1e-9) -> bool:
    """True when every vertex of `inner` lies in `outer` within slack."""
    if inner.is_empty:
        return True
    return all(contains_point(outer, v, slack) for v in inner.vertices)
