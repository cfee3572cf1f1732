"""Continuous probability measures supported on a perfect set ``H`` in [0, 1].

``H`` is stored through its bounded complementary gaps.  Each gap gets a
level by repeatedly averaging the levels of its nearest already-levelled
neighbours; the staircase ``f`` is constant on gaps and linear across the
positive-length pieces of ``H``.  The measure is the Stieltjes measure of
``f`` plus Lebesgue measure restricted to ``H``, renormalized to mass one.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class PerfectSet:
    """Closed ``H`` in [0, 1] containing 0 and 1, given by its open gaps (sorted)."""

    gaps: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev = 0.0
        for u, v in self.gaps:
            if not (0.0 < u < v < 1.0):
                raise ValueError(f"gap ({u}, {v}) must satisfy 0 < u < v < 1")
            if u <= prev:
                raise ValueError(f"gap ({u}, {v}) overlaps or touches its predecessor")
            prev = v
        if self.gaps and prev >= 1.0:
            raise ValueError("last gap touches 1")

    @classmethod
    def from_gaps(cls, gaps: Sequence[Sequence[float]]) -> "PerfectSet":
        g = sorted((float(u), float(v)) for u, v in gaps)
        return cls(tuple(g))

    @classmethod
    def cantor(cls, depth: int) -> "PerfectSet":
        """Middle-thirds Cantor set truncated after ``depth`` generations."""
        gaps = []
        pieces = [(Fraction(0), Fraction(1))]
        for _ in range(depth):
            nxt = []
            for a, b in pieces:
                t = (b - a) / 3
                gaps.append((float(a + t), float(b - t)))
                nxt += [(a, a + t), (b - t, b)]
            pieces = nxt
        return cls(tuple(sorted(gaps)))

    @property
    def pieces(self) -> list[tuple[float, float]]:
        """Closed positive-length intervals whose union is ``H``."""
        ends = [0.0] + [x for g in self.gaps for x in g] + [1.0]
        return [(ends[2 * i], ends[2 * i + 1]) for i in range(len(self.gaps) + 1)]

    @property
    def lebesgue(self) -> float:
        return sum(q - p for p, q in self.pieces)


def _canonical_order(gaps) -> list[int]:
    # decreasing length, ties left-to-right; lengths compared at 10 significant digits
    return sorted(range(len(gaps)), key=lambda i: (-float(f"{gaps[i][1] - gaps[i][0]:.9e}"), gaps[i][0]))


@dataclass(frozen=True)
class StaircaseFunction:
    H: PerfectSet
    levels: tuple[float, ...]  # aligned with H.gaps (positional order)
    order: tuple[int, ...]  # enumeration order used for the recursion

    def __call__(self, x):
        return eval_staircase(self, x)

    @cached_property
    def _padded(self):
        # index 0 is I0 = (-inf, 0), index n+1 is I1 = (1, inf)
        u = np.array([g[0] for g in self.H.gaps])
        v = np.array([g[1] for g in self.H.gaps])
        return (u,
                np.concatenate([[-np.inf], u, [1.0]]),
                np.concatenate([[0.0], v, [np.inf]]),
                np.concatenate([[0.0], np.asarray(self.levels, dtype=float), [1.0]]))


def assign_levels(H: PerfectSet, order: Sequence[int] | None = None) -> StaircaseFunction:
    gaps = H.gaps
    if order is None:
        order = _canonical_order(gaps)
    if sorted(order) != list(range(len(gaps))):
        raise ValueError("order must be a permutation of the gap indices")
    levels = [0.0] * len(gaps)
    # unbounded gaps I0 = (-inf, 0) and I1 = (1, inf) carry levels 0 and 1
    keys = [-np.inf, np.inf]
    vals = [0.0, 1.0]
    for i in order:
        u = gaps[i][0]
        j = bisect.bisect_left(keys, u)
        levels[i] = 0.5 * (vals[j - 1] + vals[j])
        keys.insert(j, u)
        vals.insert(j, levels[i])
    return StaircaseFunction(H, tuple(levels), tuple(order))


def eval_staircase(f: StaircaseFunction, x):
    x = np.asarray(x, dtype=float)
    n = len(f.H.gaps)
    u, u_pad, v_pad, lev_pad = f._padded
    k = np.searchsorted(u, x, side="right")  # gaps with u <= x, padded index of the last one
    in_gap = (k >= 1) & (x < v_pad[k]) & (x > u_pad[k])
    piece = np.where(x >= v_pad[k], k, k - 1)  # H-piece lies after padded gap `piece`
    piece = np.clip(piece, 0, n)
    p = v_pad[piece]
    q = u_pad[piece + 1]
    left = lev_pad[piece]
    right = lev_pad[piece + 1]
    span = q - p
    with np.errstate(invalid="ignore", divide="ignore"):
        interp = np.where(span > 0, left * ((q - x) / span) + right * ((x - p) / span), left)
    out = np.where(in_gap, lev_pad[np.clip(k, 0, n + 1)], interp)
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, out))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SupportedMeasure:
    """Probability measure on [0, 1] with support ``H``; ``cdf(x) = mu([0, x])``."""

    f: StaircaseFunction
    total: float
    _cum_before: tuple[float, ...]
    _cum_full: tuple[float, ...]

    @property
    def H(self) -> PerfectSet:
        return self.f.H

    @cached_property
    def _piece_arrays(self):
        pieces = self.H.pieces
        return (np.array([a for a, _ in pieces]), np.array([b for _, b in pieces]),
                np.asarray(self._cum_before), np.asarray(self._cum_full))

    def lebesgue_upto(self, x):
        """``lambda([0, x] ∩ H)``, exact for the truncated representation."""
        x = np.asarray(x, dtype=float)
        p, q, before, full = self._piece_arrays
        i = np.clip(np.searchsorted(p, x, side="right") - 1, 0, len(p) - 1)
        inside = x <= q[i]
        out = np.where(inside, before[i] + (np.clip(x, p[i], q[i]) - p[i]), full[i])
        out = np.where(x <= 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = (eval_staircase(self.f, x) + self.lebesgue_upto(x)) / self.total
        out = np.where(x >= 1.0, 1.0, np.where(x <= 0.0, 0.0, out))
        return out if out.ndim else float(out)


def build_measure(H: PerfectSet, order: Sequence[int] | None = None) -> SupportedMeasure:
    f = assign_levels(H, order)
    before, full = [], []
    acc = 0.0
    for p, q in H.pieces:
        before.append(acc)
        acc = acc + (q - p)
        full.append(acc)
    # f(0) = 0 and f(1) = 1, so the raw mass is 1 + lambda(H)
    return SupportedMeasure(f, 1.0 + acc, tuple(before), tuple(full))


def measure_of(m: SupportedMeasure, u: float, v: float) -> float:
    if u > v:
        raise ValueError("interval start exceeds end")
    return float(m.cdf(v)) - float(m.cdf(u))


def perfect_set_from_json(doc: dict | str | Path) -> PerfectSet:
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text())
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "cantor":
        return PerfectSet.cantor(int(doc.get("depth", 10)))
    if kind == "gaps":
        gaps = doc.get("gaps", [])
        if any(len(g) != 2 for g in gaps):
            raise ValueError("each gap must be a [u, v] pair")
        return PerfectSet.from_gaps(gaps)
    if kind == "full":
        return PerfectSet()
    raise ValueError(f"unknown perfect-set kind {kind!r}")
