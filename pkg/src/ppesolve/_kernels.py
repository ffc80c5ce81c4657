"""Hot inner loops of the vertex enumerator.

The combinatorial adjacency test between vertices on a freshly cut facet
is quadratic in the facet size and dominates enumeration time, so it is
compiled with numba when available.  Set PPE_NO_NUMBA=1 to force the
pure-numpy fallback (used by the benchmark and as a safety hatch).

Active constraint sets are stored as multi-word uint64 bitmasks, one row
bit per inserted halfspace.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("PPE_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def adjacent_pairs_numpy(masks: np.ndarray, min_common: int) -> np.ndarray:
    """Combinatorial adjacency among facet vertices, vectorized.

    Two vertices are adjacent when their common active set has at least
    `min_common` rows and no third vertex's active set dominates it.
    Returns an (e, 2) int64 array of index pairs with i < j.
    """
    f, w = masks.shape
    if f < 2:
        return np.zeros((0, 2), dtype=np.int64)
    ii_parts, jj_parts = [], []
    chunk = max(1, 8_000_000 // (f * w))  # bound the broadcast buffer
    for lo in range(0, f, chunk):
        hi = min(lo + chunk, f)
        common = masks[lo:hi, None, :] & masks[None, :, :]
        counts = np.bitwise_count(common).sum(axis=2, dtype=np.int64)
        a, b = np.where(counts >= min_common)
        keep = a + lo < b
        ii_parts.append(a[keep] + lo)
        jj_parts.append(b[keep])
    ii = np.concatenate(ii_parts)
    jj = np.concatenate(jj_parts)
    out = []
    for i, j in zip(ii, jj):
        c = masks[i] & masks[j]
        dominated = np.all((masks & c) == c, axis=1)
        if int(dominated.sum()) <= 2:  # only i and j themselves
            out.append((i, j))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(out, dtype=np.int64)


if USE_NUMBA:

    @numba.njit(cache=True)
    def _popcount64(x):
        x = x - ((x >> 1) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + (
            (x >> 2) & np.uint64(0x3333333333333333)
        )
        x = (x + (x >> 4)) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> 56

    @numba.njit(cache=True)
    def _adjacent_pairs_nb(masks, min_common):
        f, w = masks.shape
        cap = max(4 * f, 64)
        out = np.empty((cap, 2), dtype=np.int64)
        n_out = 0
        for i in range(f):
            for j in range(i + 1, f):
                npc = 0
                for k in range(w):
                    npc += int(_popcount64(masks[i, k] & masks[j, k]))
                if npc < min_common:
                    continue
                ndom = 0
                for t in range(f):
                    dom = True
                    for k in range(w):
                        c = masks[i, k] & masks[j, k]
                        if masks[t, k] & c != c:
                            dom = False
                            break
                    if dom:
                        ndom += 1
                        if ndom > 2:
                            break
                if ndom <= 2:
                    if n_out == cap:
                        bigger = np.empty((cap * 2, 2), dtype=np.int64)
                        bigger[:cap] = out
                        out = bigger
                        cap *= 2
                    out[n_out, 0] = i
                    out[n_out, 1] = j
                    n_out += 1
        return out[:n_out]

    def adjacent_pairs(masks: np.ndarray, min_common: int) -> np.ndarray:
        return _adjacent_pairs_nb(np.ascontiguousarray(masks), min_common)

else:
    adjacent_pairs = adjacent_pairs_numpy


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
