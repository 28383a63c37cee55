"""Dynamic time warping with absolute-difference local cost.

The distance is the minimum, over all monotone warping paths from (0, 0) to
(len(a)-1, len(b)-1) with steps right/down/diagonal, of the summed local
costs |a_i - b_j|.  An optional Sakoe-Chiba band restricts paths to
|i - j| <= window.  Series are compared by index, not wall-clock time, which
on a non-uniform grid treats all steps as equal; a known limitation.

`brute_force_dtw` enumerates every path outright and exists so the dynamic
program can be checked against an implementation too slow to get clever.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class DtwConfig:
    """window: Sakoe-Chiba band half-width in steps; None means exact DTW."""

    window: Optional[int] = None

    def __post_init__(self):
        if self.window is not None and self.window < 0:
            raise ValueError(f"window must be >= 0, got {self.window}")


def _check_series(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"series {name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"series {name} contains non-finite values")
    return arr


def _accumulated_cost(x: np.ndarray, y: np.ndarray, window: Optional[int]) -> np.ndarray:
    n, m = x.size, y.size
    if window is not None and window < abs(n - m):
        raise ValueError(
            f"window {window} infeasible for lengths {n} and {m}: "
            f"needs window >= {abs(n - m)}"
        )
    cost = np.abs(x[:, None] - y[None, :])
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        if window is None:
            j_lo, j_hi = 1, m
        else:
            j_lo = max(1, i - window)
            j_hi = min(m, i + window)
        for j in range(j_lo, j_hi + 1):
            acc[i, j] = cost[i - 1, j - 1] + min(
                acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            )
    return acc


def dtw_distance(a: Sequence[float], b: Sequence[float], cfg: DtwConfig = DtwConfig()) -> float:
    """DTW cost between two series; symmetric and zero on identical inputs."""
    x = _check_series(a, "a")
    y = _check_series(b, "b")
    acc = _accumulated_cost(x, y, cfg.window)
    return float(acc[x.size, y.size])


def dtw_alignment(
    a: Sequence[float], b: Sequence[float], cfg: DtwConfig = DtwConfig()
) -> tuple[float, list[tuple[int, int]]]:
    """DTW cost plus one optimal warping path as (i, j) index pairs.

    Ties between predecessors resolve deterministically: diagonal, then the
    step that advances ``a``, then the step that advances ``b``.
    """
    x = _check_series(a, "a")
    y = _check_series(b, "b")
    n, m = x.size, y.size
    acc = _accumulated_cost(x, y, cfg.window)

    path = [(n - 1, m - 1)]
    i, j = n, m
    while (i, j) != (1, 1):
        best = min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
        if acc[i - 1, j - 1] == best:
            i, j = i - 1, j - 1
        elif acc[i - 1, j] == best:
            i = i - 1
        else:
            j = j - 1
        path.append((i - 1, j - 1))
    path.reverse()
    return float(acc[n, m]), path


def dtw_distance_matrix(
    series: Sequence[Sequence[float]], cfg: DtwConfig = DtwConfig()
) -> np.ndarray:
    """Symmetric matrix of pairwise DTW costs with a zero diagonal."""
    k = len(series)
    matrix = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            try:
                matrix[i, j] = matrix[j, i] = dtw_distance(series[i], series[j], cfg)
            except ValueError as exc:
                raise ValueError(f"series pair ({i}, {j}): {exc}") from None
    return matrix


BRUTE_FORCE_MAX_CELLS = 64


def brute_force_dtw(a: Sequence[float], b: Sequence[float]) -> float:
    """Exhaustive minimum over all monotone warping paths (test oracle).

    Recursion over path prefixes, no memoization by design; guarded to
    len(a) * len(b) <= 64.
    """
    x = _check_series(a, "a")
    y = _check_series(b, "b")
    n, m = x.size, y.size
    if n * m > BRUTE_FORCE_MAX_CELLS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_CELLS} cells, got {n}x{m}"
        )

    def best_from(i: int, j: int) -> float:
        here = abs(x[i] - y[j])
        if i == n - 1 and j == m - 1:
            return here
        candidates = []
        if i + 1 < n:
            candidates.append(best_from(i + 1, j))
        if j + 1 < m:
            candidates.append(best_from(i, j + 1))
        if i + 1 < n and j + 1 < m:
            candidates.append(best_from(i + 1, j + 1))
        return here + min(candidates)

    return float(best_from(0, 0))
