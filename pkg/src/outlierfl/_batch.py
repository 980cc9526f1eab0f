"""Vectorized exact kernels for large sweeps and strategyproofness scans.

Random instances live on the lattice k/10^6, so whole batches are carried
as int64 matrices: every cost, threshold and comparison below is integer
arithmetic at a fixed denominator (no floats anywhere).  Deviation grids
fold midpoints and eighth-points into one x18 scale.  The exact
per-instance Fraction path in `objectives`/`mechanisms` is the reference;
unit tests pin these kernels against it.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .generators import RANDOM_DENOMINATOR, random_locations_int

SCALE = RANDOM_DENOMINATOR
GRID_MULT = 18  # lcm of the grid denominators: midpoints (2) and gap ninths (9)

# Phantom sentinels for +/-inf; far outside any reachable grid value.
INF_INT = np.int64(1) << 60


def sorted_batch(n: int, model: str, seeds) -> np.ndarray:
    """Stack per-seed instances into a sorted (len(seeds), n) int64 matrix."""
    rows = np.empty((len(seeds), n), dtype=np.int64)
    for j, seed in enumerate(seeds):
        rows[j] = random_locations_int(n, model, int(seed))
    rows.sort(axis=1)
    return rows


def prefix_sums(X: np.ndarray) -> np.ndarray:
    P = np.zeros((X.shape[0], X.shape[1] + 1), dtype=np.int64)
    np.cumsum(X, axis=1, out=P[:, 1:])
    return P


def _window_cost_at(X, P, a: int, b: int, Y) -> np.ndarray:
    """Sum of |Y - x| over sorted columns a..b inclusive; Y is (B,) or (B, G)."""
    squeeze = Y.ndim == 1
    if squeeze:
        Y = Y[:, None]
    t = (X[:, None, a : b + 1] <= Y[:, :, None]).sum(axis=2, dtype=np.int64)
    idx = t + a
    P_at = np.take_along_axis(P, idx, axis=1)
    left = Y * t - (P_at - P[:, a : a + 1])
    right = (P[:, b + 1 : b + 2] - P_at) - Y * (b + 1 - idx)
    cost = left + right
    return cost[:, 0] if squeeze else cost


def batch_eval_util(X, P, z: int, Y) -> np.ndarray:
    """min over the z+1 contiguous retained windows of the distance sum at Y."""
    n = X.shape[1]
    best = None
    for k in range(z + 1):
        cost = _window_cost_at(X, P, k, n - z + k - 1, Y)
        best = cost if best is None else np.minimum(best, cost)
    return best


def batch_eval_egal2(X, z: int, Y) -> np.ndarray:
    """Twice the egalitarian cost at Y (kept doubled to stay integral)."""
    n = X.shape[1]
    squeeze = Y.ndim == 1
    if squeeze:
        Y = Y[:, None]
    best = None
    for k in range(z + 1):
        lo = X[:, k : k + 1]
        hi = X[:, n - z + k - 1 : n - z + k]
        cost = 2 * np.maximum(Y - lo, hi - Y)
        best = cost if best is None else np.minimum(best, cost)
    return best[:, 0] if squeeze else best


def batch_opt_util(X, P, z: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exact utilitarian optimum per row: (cost, canonical location).

    Location is the left median of the first (smallest z_left) optimal
    window, matching the exact solver's tie-break.
    """
    B, n = X.shape
    m = n - z
    costs = np.empty((B, z + 1), dtype=np.int64)
    locs = np.empty((B, z + 1), dtype=np.int64)
    for k in range(z + 1):
        j = k + (m + 1) // 2 - 1
        y = X[:, j]
        left = y * (j - k + 1) - (P[:, j + 1] - P[:, k])
        right = (P[:, n - z + k] - P[:, j]) - y * (n - z + k - 1 - j + 1)
        costs[:, k] = left + right
        locs[:, k] = y
    pick = np.argmin(costs, axis=1)
    rows = np.arange(B)
    return costs[rows, pick], locs[rows, pick]


def batch_opt_egal2(X, z: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per row: (2 * egalitarian optimum, 2 * canonical midpoint location)."""
    B, n = X.shape
    costs = np.empty((B, z + 1), dtype=np.int64)
    locs = np.empty((B, z + 1), dtype=np.int64)
    for k in range(z + 1):
        lo = X[:, k]
        hi = X[:, n - z + k - 1]
        costs[:, k] = hi - lo
        locs[:, k] = hi + lo
    pick = np.argmin(costs, axis=1)
    rows = np.arange(B)
    return costs[rows, pick], locs[rows, pick]


def merged_kth(rest: np.ndarray, xp: np.ndarray, k: int) -> np.ndarray:
    """k-th smallest (1-indexed) of each row of `rest` joined with one value.

    rest is (B, r) sorted; xp is (B, G) candidate insertions; result (B, G).
    """
    r = rest.shape[1]
    if not 1 <= k <= r + 1:
        raise ValueError(f"k={k} out of range 1..{r + 1}")
    pos = (rest[:, None, :] <= xp[:, :, None]).sum(axis=2, dtype=np.int64)
    hi = rest[:, min(k - 1, r - 1)][:, None]
    lo = rest[:, max(k - 2, 0)][:, None]
    return np.where(pos >= k, hi, np.where(pos <= k - 2, lo, xp))


def delete_column(X: np.ndarray, i: int) -> np.ndarray:
    return np.concatenate([X[:, :i], X[:, i + 1 :]], axis=1)


def deviation_grid(X18: np.ndarray, extra_columns: Optional[list] = None) -> np.ndarray:
    """Default deviation grid at the x18 scale, one row per instance.

    Columns: every report, adjacent midpoints, two points beyond each
    extreme, and 8 evenly spaced points per gap.  Callers append the
    truthful outcome and outcome +/- diameter via `extra_columns`.
    """
    B, n = X18.shape
    parts = [X18]
    if n > 1:
        parts.append((X18[:, :-1] + X18[:, 1:]) // 2)
    lo = X18[:, :1]
    hi = X18[:, -1:]
    D = np.maximum(hi - lo, GRID_MULT * SCALE)
    parts.extend([lo - 2 * D, lo - D, hi + D, hi + 2 * D])
    if n > 1:
        gap = (X18[:, 1:] - X18[:, :-1]) // 9  # X18 spacing is divisible by 9
        for j in range(1, 9):
            parts.append(X18[:, :-1] + j * gap)
    if extra_columns:
        parts.extend(extra_columns)
    return np.concatenate(parts, axis=1)
