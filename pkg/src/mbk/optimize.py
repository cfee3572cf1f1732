"""Small 1-D solvers: golden-section minimization and bisection on predicates."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   iterations: int = 200, xtol: float = 0.0) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point seen.  Stops after ``iterations``
    steps or once the bracket is narrower than ``xtol``.
    """
    a, b = min(lo, hi), max(lo, hi)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for _ in range(iterations):
        if h <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
            if fc < best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
            if fd < best_f:
                best_x, best_f = d, fd
    for x in (lo, hi):
        fx = f(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def bisect_predicate(pred: Callable[[float], bool], inside: float, outside: float,
                     tol: float = 1e-12, max_iter: int = 200) -> float:
    """Locate the boundary of ``pred`` between ``inside`` (true) and ``outside`` (false).

    The returned point always satisfies ``pred``; it lies within ``tol`` of the
    transition.
    """
    if not pred(inside):
        raise ValueError("predicate is false at the 'inside' end")
    for _ in range(max_iter):
        if abs(outside - inside) <= tol:
            break
        mid = 0.5 * (inside + outside)
        if mid == inside or mid == outside:
            break
        if pred(mid):
            inside = mid
        else:
            outside = mid
    return inside


def bisect_sign(f: Callable[[float], float], lo: float, hi: float,
                tol: float = 1e-13, max_iter: int = 200) -> float:
    """Bracketing bisection for a sign change of ``f`` on ``[lo, hi]``.

    Returns early when ``f`` vanishes exactly at a probe point.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("no sign change on the bracket")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi
