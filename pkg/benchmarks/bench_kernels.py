"""Benchmark the facet-adjacency kernel: compiled vs pure-numpy backend.

The kernel decides which vertex pairs on a freshly cut facet share an
edge; it is the hot loop of vertex enumeration.  This script times both
implementations on synthetic bitmask populations and on an end-to-end
solve, and prints a small table.

Run:  python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from ppesolve._kernels import USE_NUMBA, adjacent_pairs_numpy

ROOT = Path(__file__).resolve().parents[1]


def make_masks(rng, n_vertices, n_rows, active_per_vertex):
    """Random active-row bitmasks with a fixed popcount per vertex."""
    words = (n_rows + 63) // 64
    masks = np.zeros((n_vertices, words), dtype=np.uint64)
    for i in range(n_vertices):
        for r in rng.choice(n_rows, size=active_per_vertex, replace=False):
            masks[i, r // 64] |= np.uint64(1) << np.uint64(r % 64)
    return masks


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_synthetic():
    if not USE_NUMBA:
        print("numba backend unavailable (PPE_NO_NUMBA set or numba missing);")
        print("timing the numpy fallback only.\n")
    else:
        from ppesolve._kernels import adjacent_pairs as adjacent_pairs_nb

        # trigger compilation outside the timed region
        adjacent_pairs_nb(np.zeros((2, 1), dtype=np.uint64), 1)

    rng = np.random.default_rng(7)
    print(f"{'vertices':>9} {'rows':>5} {'active':>7} "
          f"{'numpy (ms)':>11} {'numba (ms)':>11} {'speedup':>8}")
    for n_vertices, n_rows, active in [
        (50, 40, 4),
        (200, 80, 4),
        (500, 120, 5),
        (1000, 160, 5),
        (2000, 200, 6),
    ]:
        masks = make_masks(rng, n_vertices, n_rows, active)
        t_np, pairs_np = time_call(adjacent_pairs_numpy, masks, 3)
        if USE_NUMBA:
            t_nb, pairs_nb = time_call(adjacent_pairs_nb, masks, 3)
            assert np.array_equal(np.sort(pairs_np, axis=0),
                                  np.sort(pairs_nb, axis=0)), "backends disagree"
            print(f"{n_vertices:>9} {n_rows:>5} {active:>7} "
                  f"{t_np * 1e3:>11.2f} {t_nb * 1e3:>11.2f} "
                  f"{t_np / t_nb:>7.1f}x")
        else:
            print(f"{n_vertices:>9} {n_rows:>5} {active:>7} "
                  f"{t_np * 1e3:>11.2f} {'-':>11} {'-':>8}")


def bench_end_to_end():
    """One solver iteration on the four-signal oligopoly game, per backend.

    The backend is frozen at import time, so this reports only the one
    this process runs with; re-run with PPE_NO_NUMBA=1 to get the other.
    """
    from ppesolve import parse_game, individually_rational_set
    from ppesolve._kernels import backend_name
    from ppesolve.aps import apply_B

    game = parse_game((ROOT / "games" / "cournot.json").read_text())
    w0 = individually_rational_set(game).individually_rational
    t0 = time.perf_counter()
    apply_B(game, 0.9, w0)
    dt = time.perf_counter() - t0
    print(f"\none operator application, oligopoly game, "
          f"backend={backend_name()}: {dt * 1e3:.0f} ms")


if __name__ == "__main__":
    bench_synthetic()
    bench_end_to_end()
