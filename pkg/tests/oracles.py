"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately naive (subset enumeration, exact rational
arithmetic, O(n^2) scans) and shares no code with the implementations it
checks.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np


def pairwise_separated(points: np.ndarray, eps: float) -> bool:
    """All pairwise Euclidean distances >= 2*eps."""
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if float(np.sqrt(((points[i] - points[j]) ** 2).sum())) < 2.0 * eps:
                return False
    return True


def brute_max_packing(points: np.ndarray, eps: float) -> int:
    """Exact maximum size of a 2*eps-separated subset, by enumeration.

    Exponential; keep to <= 12 points.
    """
    pts = np.atleast_2d(points)
    n = len(pts)
    assert n <= 12, "oracle is exponential"
    for size in range(n, 0, -1):
        for idx in combinations(range(n), size):
            if pairwise_separated(pts[list(idx)], eps):
                return size
    return 0


def all_maximal_separated_subsets(points: np.ndarray, eps: float) -> list:
    """Every inclusion-maximal 2*eps-separated subset, as index tuples."""
    pts = np.atleast_2d(points)
    n = len(pts)
    assert n <= 12, "oracle is exponential"
    separated = []
    for size in range(n + 1):
        for idx in combinations(range(n), size):
            if pairwise_separated(pts[list(idx)], eps):
                separated.append(frozenset(idx))
    maximal = [s for s in separated if not any(s < t for t in separated)]
    return sorted(tuple(sorted(s)) for s in maximal)


def brute_neighbor_counts(points: np.ndarray, radius: float) -> np.ndarray:
    """N_i = #{j != i : |y_i - y_j| < radius} by direct O(n^2) scan."""
    pts = np.atleast_2d(points)
    n = len(pts)
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j and float(np.sqrt(((pts[i] - pts[j]) ** 2).sum())) < radius:
                out[i] += 1
    return out


def inverse_power_cell_count(j: int, n_max: int) -> int:
    """Occupied eps=2^-j cells of {0} U {1/n : n <= n_max}, in exact integers.

    floor((1/n) / 2^-j) == 2^j // n whenever 2^j/n is not within one float ulp
    of an integer, and exactly when n divides 2^j; both hold for every n here.
    """
    cells = {0}
    for n in range(1, n_max + 1):
        cells.add((1 << j) // n)
    return len(cells)


def staircase_exact_level(n: int, x) -> int:
    """Integer staircase level floor(sqrt(n)*tent(n x)) with the right-limit
    adjustment, via exact rationals (n must be a perfect square)."""
    xq = Fraction(x) if not isinstance(x, Fraction) else x
    s = int(np.sqrt(n))
    assert s * s == n
    y = n * xq
    fr = y - (y.numerator // y.denominator)
    phi = max(fr, 1 - fr)
    u = s * phi
    v = u.numerator // u.denominator
    if fr < Fraction(1, 2) and u == v:
        v -= 1
    return int(v)


def union_interval_length(centers, r: float) -> float:
    """Exact length of a union of 1-D intervals [c - r, c + r]."""
    ivs = sorted((float(c) - r, float(c) + r) for c in np.asarray(centers).ravel())
    total = 0.0
    cur_lo, cur_hi = ivs[0]
    for lo, hi in ivs[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)
