"""Nonparametric comparison statistics for search-run samples.

Mann-Whitney U (two-tailed) with midrank tie handling: exact enumeration
of the U distribution for small samples, normal approximation with tie
correction and continuity correction otherwise.  Cliff's delta with the
conventional magnitude bands.
"""

from __future__ import annotations

import math
from itertools import combinations

# exact U distribution is enumerated when both samples are at most this size
_EXACT_LIMIT = 8

# conventional |delta| thresholds for negligible / small / medium / large
MAGNITUDE_THRESHOLDS = (0.147, 0.33, 0.474)


def _midranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_statistic(ranks, n1):
    r1 = sum(ranks[:n1])
    return r1 - n1 * (n1 + 1) / 2.0


def mann_whitney_u(xs, ys) -> float:
    """Two-tailed p-value of the Mann-Whitney U rank test."""
    xs = list(xs)
    ys = list(ys)
    if not xs or not ys:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(xs), len(ys)
    pooled = xs + ys
    ranks = _midranks(pooled)
    u1 = _u_statistic(ranks, n1)

    if max(n1, n2) <= _EXACT_LIMIT:
        # enumerate every assignment of pooled values to the first sample
        total = 0
        n_le = 0
        n_ge = 0
        for combo in combinations(range(n1 + n2), n1):
            u = sum(ranks[i] for i in combo) - n1 * (n1 + 1) / 2.0
            total += 1
            if u <= u1 + 1e-12:
                n_le += 1
            if u >= u1 - 1e-12:
                n_ge += 1
        return min(1.0, 2.0 * min(n_le, n_ge) / total)

    mean = n1 * n2 / 2.0
    n = n1 + n2
    tie_sum = 0.0
    seen = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_sum += count ** 3 - count
    var = (n1 * n2 / 12.0) * ((n + 1) - tie_sum / (n * (n - 1)))
    if var <= 0:
        return 1.0
    z = (abs(u1 - mean) - 0.5) / math.sqrt(var)
    if z < 0:
        z = 0.0
    return 2.0 * (1.0 - _norm_cdf(z))


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def magnitude_label(delta: float) -> str:
    d = abs(delta)
    if d < MAGNITUDE_THRESHOLDS[0]:
        return "negligible"
    if d < MAGNITUDE_THRESHOLDS[1]:
        return "small"
    if d < MAGNITUDE_THRESHOLDS[2]:
        return "medium"
    return "large"


def cliffs_delta(xs, ys) -> tuple[float, str]:
    """(delta, magnitude): (#{x > y} - #{x < y}) / (n * m)."""
    xs = list(xs)
    ys = list(ys)
    if not xs or not ys:
        raise ValueError("both samples must be non-empty")
    greater = 0
    less = 0
    for x in xs:
        for y in ys:
            if x > y:
                greater += 1
            elif x < y:
                less += 1
    delta = (greater - less) / (len(xs) * len(ys))
    return delta, magnitude_label(delta)
