"""Shared closed-form references used across the test modules.

Everything here is computed from scratch (bisection on binary entropy, plain
table entropies) so test expectations never route through the package's own
entropy code.
"""

import math

import numpy as np


def h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def h2_inverse_low(r: float) -> float:
    """Inverse of the binary entropy on [0, 1/2]."""
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h2(mid) < r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def convolve_flip(a: float, b: float) -> float:
    return a * (1 - b) + (1 - a) * b


def pinching_truth(common: float) -> float:
    """Max personal rate of the pinching region at a given common rate."""
    if common >= 1.0:
        return 0.5
    return 1.0 - h2_inverse_low(min(max(common, 0.0), 1.0))


def pinching_cq_truth(common: float) -> float:
    """Max personal rate of the three-symbol cq pinching region."""
    if common <= h2(1.0 / 3.0) + 1e-12:
        return math.log2(3.0) - common
    return 1.0 - h2_inverse_low(min(common, 1.0))


def cascade_truth(common: float, flip1: float = 0.1, flip2: float = 0.2) -> float:
    """Max I(X;Y|T) at given I(T;Z) for the symmetric binary cascade."""
    total = convolve_flip(flip1, flip2)
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 - h2(convolve_flip(mid, total)) > common:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return h2(convolve_flip(a, flip1)) - h2(flip1)


def spectrum_entropy(mat: np.ndarray) -> float:
    """Reference von Neumann entropy: plain eigvalsh, no block tricks."""
    evals = np.clip(np.linalg.eigvalsh(mat), 0.0, None)
    evals = evals[evals > 1e-12]
    return float(-(evals * np.log2(evals)).sum())


def staircase_distance(rows, point) -> float:
    """Chebyshev distance from (common, personal) to the staircase boundary.

    ``rows`` are Pareto points sorted by ascending common rate; the staircase
    is the boundary of the union of rectangles [0, c_i] x [0, p_i].
    """
    rows = sorted(rows)
    segs = []
    c0, p0 = rows[0]
    segs.append(("h", 0.0, c0, p0))
    for (ca, pa), (cb, pb) in zip(rows, rows[1:]):
        segs.append(("v", pb, pa, ca))
        segs.append(("h", ca, cb, pb))
    c_last, p_last = rows[-1]
    segs.append(("v", 0.0, p_last, c_last))
    x, y = point
    best = math.inf
    for kind, lo, hi, at in segs:
        if kind == "h":
            d = max(max(lo - x, x - hi, 0.0), abs(y - at))
        else:
            d = max(max(lo - y, y - hi, 0.0), abs(x - at))
        best = min(best, d)
    return best
