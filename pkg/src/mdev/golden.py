"""Scalar golden-section minimization used by the tail and optimizer modules."""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float, int]:
    """Minimize f on [lo, hi]; returns (argmin, min, evaluations).

    Endpoints are included in the candidate set, so the result never exceeds
    min(f(lo), f(hi)) even when f is not unimodal on the bracket.
    """
    if hi < lo:
        lo, hi = hi, lo
    evals = 2
    best_x, best_f = min(((lo, f(lo)), (hi, f(hi))), key=lambda t: t[1])
    if hi - lo <= tol:
        return best_x, best_f, evals
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals += 2
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    for x, fx in ((c, fc), (d, fd)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f, evals
