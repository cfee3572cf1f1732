"""B-measures: existence gate, construction from a staircase measure, verification.

An angular measure is handled through its cumulative function ``G`` on
``[0, 2pi]``, extended to the real line by ``G(t + 2pi) = G(t) + 2pi``.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .geometry import (
    HALF_PI,
    TWO_PI,
    VERTEX_SNAP,
    Arc,
    AuerbachSet,
    BoundaryPoint,
    PlanarBody,
    auerbach_set,
    is_auerbach,
    phi,
    segment_set,
    subtract_segments,
)
from .staircase import PerfectSet, SupportedMeasure

# the gate flags a Cantor-like pattern when the component count grows by this factor
_CANTOR_GROWTH = 2.0


def arc(a, b, tol: float = 1e-12) -> Arc:
    """The closed arc between ``a`` and ``b`` containing no antipodal pair."""
    ta = a.theta if isinstance(a, BoundaryPoint) else float(a)
    tb = b.theta if isinstance(b, BoundaryPoint) else float(b)
    ta %= TWO_PI
    w = (tb - ta) % TWO_PI
    if abs(w - math.pi) <= tol:
        raise ValueError("endpoints are antipodal; the short arc is not unique")
    if w < math.pi:
        return Arc(ta, ta + w)
    tb %= TWO_PI
    return Arc(tb, tb + (TWO_PI - w))


# ---------------------------------------------------------------- measures

@dataclass(frozen=True)
class AngularMeasure:
    """Measure on the boundary circle, parametrized by polar angle."""

    base_cdf: Callable  # G on [0, 2pi], G(0) = 0
    meta: dict = field(default_factory=dict)

    def cdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.floor(theta / TWO_PI)
        return self.base_cdf(theta - k * TWO_PI) + k * TWO_PI

    def measure(self, start, end):
        """Mass of the counterclockwise arc ``[start, end]`` (``end >= start`` lifted)."""
        return self.cdf(end) - self.cdf(start)

    def tabulate(self, n: int = 4097) -> tuple[np.ndarray, np.ndarray]:
        th = np.linspace(0.0, TWO_PI, n)
        return th, self.cdf(th)

    @classmethod
    def from_table(cls, theta, G, meta: dict | None = None) -> "AngularMeasure":
        theta = np.asarray(theta, dtype=float)
        G = np.asarray(G, dtype=float)
        if theta[0] != 0.0 or abs(theta[-1] - TWO_PI) > 1e-12 or np.any(np.diff(theta) <= 0):
            raise ValueError("tabulated measure needs an increasing grid from 0 to 2pi")
        if np.any(np.diff(G) < -1e-12):
            raise ValueError("tabulated CDF is not nondecreasing")
        G = G - G[0]

        def base(t):
            return np.interp(t, theta, G)

        return cls(base, dict(meta or {}))

    @classmethod
    def uniform(cls) -> "AngularMeasure":
        return cls(lambda t: np.asarray(t, dtype=float) + 0.0, {"kind": "uniform"})


def arc_length_measure(body: PlanarBody, n: int = 1 << 16) -> AngularMeasure:
    """Euclidean arc length of the boundary, normalized to total mass 2pi."""
    th = np.linspace(0.0, TWO_PI, n + 1)
    th = np.unique(np.concatenate([th, np.mod(body.corner_angles(), TWO_PI)]))
    pts = body.point(th)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    return AngularMeasure.from_table(th, TWO_PI * s / s[-1], {"kind": "arc_length"})


def max_atom(cdf: Callable, lo: float, hi: float, cells: int = 100_000,
             probes: int = 24, depth: int = 48) -> float:
    """Largest point mass suggested by zooming into the heaviest grid cells.

    Each of the ``probes`` heaviest cells is halved ``depth`` times, always
    following the heavier half; a continuous measure leaves only a vanishing
    remainder, an atom keeps its full mass.
    """
    grid = np.linspace(lo, hi, cells + 1)
    inc = np.diff(cdf(grid))
    best = 0.0
    for i in np.argsort(inc)[::-1][:probes]:
        a, b = grid[i], grid[i + 1]
        for _ in range(depth):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            left = float(cdf(m) - cdf(a))
            right = float(cdf(b) - cdf(m))
            if left >= right:
                b = m
            else:
                a = m
        best = max(best, float(cdf(b) - cdf(a)))
    return best


# ---------------------------------------------------------------- gate

@dataclass
class GateReport:
    exists: bool
    classification: str  # FINITE, ARC or CANTOR_LIKE
    n_components: int
    n_isolated: int
    max_width: float
    refinement_counts: list[int]
    resolution: float
    components: list[tuple[float, float, bool]]
    note: str = ("classification is resolution-bounded numerical evidence, "
                 "not a proof of (un)countability")

    def to_dict(self) -> dict:
        return asdict(self)


def auerbach_minus_segments(body: PlanarBody, resolution: float = 1e-3, tol: float = 1e-10) -> AuerbachSet:
    return subtract_segments(auerbach_set(body, resolution, tol), segment_set(body))


def _count_at_scale(comps, gap: float) -> int:
    if not comps:
        return 0
    starts = sorted(comps, key=lambda c: c.start)
    groups = 1
    end = starts[0].end
    for c in starts[1:]:
        if c.start - end > gap:
            groups += 1
        end = max(end, c.end)
    if groups > 1 and starts[0].start + TWO_PI - end <= gap:
        groups -= 1
    return groups


def existence_gate(body: PlanarBody, resolution: float = 1e-3, tol: float = 1e-10,
                   ae: AuerbachSet | None = None) -> GateReport:
    ae = ae if ae is not None else auerbach_minus_segments(body, resolution, tol)
    comps = list(ae.components)
    widths = [c.width for c in comps]
    max_width = max(widths) if widths else 0.0
    counts = [_count_at_scale(comps, 2.0 * resolution * 2**k) for k in (3, 2, 1, 0)]
    growing = all(b >= a for a, b in zip(counts, counts[1:])) and counts[-1] >= _CANTOR_GROWTH * max(counts[0], 1)
    if growing and counts[-1] >= 8:
        cls = "CANTOR_LIKE"
    elif any(not c.isolated and c.width >= 2.0 * resolution for c in comps):
        cls = "ARC"
    else:
        cls = "FINITE"
    return GateReport(
        exists=cls != "FINITE",
        classification=cls,
        n_components=len(comps),
        n_isolated=sum(c.isolated for c in comps),
        max_width=float(max_width),
        refinement_counts=counts,
        resolution=resolution,
        components=[(float(c.start), float(c.end), bool(c.isolated)) for c in comps],
    )


# ---------------------------------------------------------------- construction

@dataclass(frozen=True)
class BaseArc:
    """``a``, ``b = phi(a)`` and the window ``[lo, hi]`` of ``arc(a, b)`` onto which ``H`` is scaled."""

    a: float
    b: float
    lo: float
    hi: float
    H: PerfectSet

    def to_angle(self, s):
        return self.lo + (self.hi - self.lo) * np.asarray(s, dtype=float)

    def pieces(self) -> list[tuple[float, float]]:
        return [(float(self.to_angle(p)), float(self.to_angle(q))) for p, q in self.H.pieces]


def _in_segment_interior(body: PlanarBody, theta: float) -> bool:
    for s in segment_set(body).segments:
        u = (theta - s.arc.start) % TWO_PI
        if 1e-12 < u < s.arc.width - 1e-12:
            return True
    return False


def _arc_pieces(ae: AuerbachSet, a: float, b: float) -> list[tuple[float, float]]:
    out = []
    for c in ae.components:
        if c.isolated:
            continue
        for shift in (-TWO_PI, 0.0, TWO_PI):
            s, e = max(c.start + shift, a), min(c.end + shift, b)
            if e > s:
                out.append((s, e))
    out.sort()
    merged: list[list[float]] = []
    for s, e in out:
        if merged and s <= merged[-1][1] + 1e-12:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [(s, e) for s, e in merged]


def _base_from(body: PlanarBody, ae: AuerbachSet, a: float) -> BaseArc | None:
    b = phi(body, a)
    pieces = _arc_pieces(ae, a, b)
    if not pieces:
        return None
    lo, hi = pieces[0][0], pieces[-1][1]
    span = hi - lo
    gaps = []
    for (_, e0), (s1, _) in zip(pieces, pieces[1:]):
        u, v = (e0 - lo) / span, (s1 - lo) / span
        if v > u:
            gaps.append((u, v))
    return BaseArc(a % TWO_PI, a % TWO_PI + (b - a), lo, hi, PerfectSet.from_gaps(gaps))


def choose_base_arc(body: PlanarBody, ae: AuerbachSet | None = None, a: float | None = None,
                    resolution: float = 1e-3, tol: float = 1e-10) -> BaseArc:
    """Pick ``a`` in the Auerbach set minus segments, set ``b = phi(a)`` and extract ``H`` from ``arc(a, b)``.

    Without an explicit ``a`` the body's preferred base angle is used when it
    qualifies, else the start of the first arc-like component.  If the arc
    carries no positive-width part of the Auerbach set minus segments, the search restarts from the
    next point of the Auerbach set minus segments after ``b``.
    """
    ae = ae if ae is not None else auerbach_minus_segments(body, resolution, tol)
    gate = existence_gate(body, ae.resolution, tol, ae=ae)
    if not gate.exists:
        raise ValueError("the Auerbach set minus segments is classified FINITE; no B-measure can be built")
    candidates = []
    if a is not None:
        candidates.append(float(a))
    elif body.base_angle is not None:
        candidates.append(float(body.base_angle))
    arcs = [c for c in ae.components if not c.isolated]
    if arcs:
        candidates.append(0.0 if ae.full_circle else arcs[0].start)
    for cand in candidates:
        if not is_auerbach(body, cand, tol) or _in_segment_interior(body, cand):
            if a is not None and cand == float(a):
                raise ValueError(f"a={a} is not a point of the Auerbach set minus segments")
            continue
        base = _base_from(body, ae, cand)
        if base is not None:
            return base
        # restart from the first point of the Auerbach set minus segments from b onwards
        b = phi(body, cand)
        if ae.contains(b % TWO_PI):
            b_plus = b
        else:
            b_plus = min(ae.components, key=lambda c: (c.start - b) % TWO_PI).start
        alt = _base_from(body, ae, b_plus)
        if alt is not None:
            return alt
    raise ValueError("both candidate arcs carry no positive-width part of the Auerbach set minus segments")


@dataclass(frozen=True)
class PartnerMap:
    """Monotone samples ``theta -> phi(theta)`` over the support of ``nu`` (lifted angles)."""

    thetas: np.ndarray
    phis: np.ndarray

    @classmethod
    def sample(cls, body: PlanarBody, base: BaseArc, step: float = 1e-3, per_piece: int = 8) -> "PartnerMap":
        ths: list[float] = []
        for p, q in base.pieces():
            k = max(per_piece, int(math.ceil((q - p) / step)) + 1)
            ths.extend(np.linspace(p, q, k).tolist())
        ths_arr = np.unique(np.asarray(ths))
        phis = np.array([phi(body, t) for t in ths_arr])
        # phi returns angles in (t, t + pi), consistent with the lifted samples
        if np.any(np.diff(phis) < -1e-9):
            raise ValueError("sampled partner map is not monotone")
        return cls(ths_arr, np.maximum.accumulate(phis))

    def __call__(self, theta):
        return np.interp(theta, self.thetas, self.phis)

    def inverse(self, t):
        """``sup{theta : phi(theta) <= t}``; plateaus contribute their whole preimage."""
        t = np.asarray(t, dtype=float)
        th, ph = self.thetas, self.phis
        i = np.searchsorted(ph, t, side="right") - 1
        below = i < 0
        top = i >= len(ph) - 1
        ic = np.clip(i, 0, len(ph) - 2)
        d = ph[ic + 1] - ph[ic]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(d > 0, (t - ph[ic]) / d, 0.0)
        out = th[ic] + np.clip(frac, 0.0, 1.0) * (th[ic + 1] - th[ic])
        out = np.where(top, th[-1], out)
        return np.where(below, -np.inf, out)


def _validate_nu(nu, tol: float):
    if abs(float(nu.cdf(0.0))) > tol or abs(float(nu.cdf(1.0)) - 1.0) > tol:
        raise ValueError("nu must be a probability measure on [0, 1]")
    atom = max_atom(nu.cdf, 0.0, 1.0, cells=20_000, probes=8)
    if atom > tol:
        raise ValueError(f"nu has an atom of mass about {atom:.3g}")


def build_b_measure(body: PlanarBody, nu, partner: PartnerMap, base: BaseArc,
                    tol: float = 1e-6) -> AngularMeasure:
    """``mu(A) = pi/2 [nu(A) + nu(-A) + nu(phi^-1 A) + nu(phi^-1 (-A))]`` on arcs.

    ``nu`` is any object with a ``cdf`` on [0, 1]; it is carried to the
    window ``[base.lo, base.hi]`` of ``arc(a, b)``.
    """
    _validate_nu(nu, tol)
    if isinstance(nu, SupportedMeasure) and nu.H is not base.H:
        # external supports must avoid the gaps of the detected set
        for u, v in base.H.gaps:
            if float(nu.cdf(v) - nu.cdf(u)) > tol:
                raise ValueError("nu puts mass outside the Auerbach set minus segments within the base arc")
    a, lo, hi = base.a, base.lo, base.hi
    span = hi - lo

    def N(t):
        return nu.cdf(np.clip((np.asarray(t, dtype=float) - lo) / span, 0.0, 1.0))

    def M(t):
        th = partner.inverse(t)
        return np.where(np.isfinite(th), N(np.where(np.isfinite(th), th, lo)), 0.0)

    def L(t):
        return HALF_PI * (N(t) + M(t) + N(t - math.pi) + M(t - math.pi))

    def lifted(theta):
        theta = np.asarray(theta, dtype=float)
        k = np.floor((theta - a) / TWO_PI)
        return L(theta - k * TWO_PI) + k * TWO_PI

    L0 = float(lifted(0.0))

    def base_cdf(theta):
        return lifted(theta) - L0

    meta = {"kind": "b_measure", "a": a, "b": base.b, "window": [lo, hi], "gaps": len(base.H.gaps)}
    return AngularMeasure(base_cdf, meta)


# ---------------------------------------------------------------- verification

@dataclass
class VerificationReport:
    b_deviation: float
    mass_residual: float
    symmetry_residual: float
    max_atom: float
    support_outside: float
    tol: float
    n_checked: int
    worst_theta: float
    passed: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _stress_points(body: PlanarBody, aset: AuerbachSet, segs) -> np.ndarray:
    pts = [c.start for c in aset.components] + [c.end for c in aset.components]
    pts += [s.arc.start for s in segs.segments] + [s.arc.end for s in segs.segments]
    pts += list(body.corner_angles())
    pts = np.asarray(pts, dtype=float)
    return np.concatenate([pts, pts - 1e-9, pts + 1e-9]) % TWO_PI


def _support_mass(mu: AngularMeasure, ae: AuerbachSet, margin: float) -> float:
    comps = sorted(ae.components, key=lambda c: c.start)
    if not comps:
        return TWO_PI
    if ae.full_circle:
        return 0.0
    mass = 0.0
    for c, nxt in zip(comps, comps[1:] + [comps[0]]):
        s = c.end + margin
        e = nxt.start + (TWO_PI if nxt is comps[0] else 0.0) - margin
        if e > s:
            mass += float(mu.measure(s, e))
    return mass


def verify_b_measure(body: PlanarBody, mu: AngularMeasure, n_samples: int = 10_000, tol: float = 1e-6,
                     resolution: float = 1e-3, aset: AuerbachSet | None = None,
                     support_margin: float | None = None, seed: int | None = None) -> VerificationReport:
    """Check the B-measure axioms and the support constraint.

    ``support_outside`` is the fraction of mass farther than ``support_margin``
    (default ``tol``) from the Auerbach set minus segments.
    """
    aset = aset if aset is not None else auerbach_set(body, resolution)
    segs = segment_set(body)
    if seed is None:
        seed = int(os.environ.get("MBK_SEED", "0"))
    rng = np.random.default_rng(seed)
    th = np.concatenate([
        np.linspace(0.0, TWO_PI, n_samples, endpoint=False),
        _stress_points(body, aset, segs),
        rng.uniform(0.0, TWO_PI, max(1, n_samples // 10)),
    ])
    lo, hi = body.tangent_offsets(th)
    psis = [th + HALF_PI + lo]
    corner = (hi - lo) > 2 * VERTEX_SNAP
    if np.any(corner):
        psis.append(np.where(corner, th + HALF_PI + hi - VERTEX_SNAP, th + HALF_PI + lo))
        psis.append(np.where(corner, th + HALF_PI + 0.5 * (lo + hi), th + HALF_PI + lo))
    g_th = mu.cdf(th)
    dev = np.zeros_like(th)
    for psi in psis:
        dev = np.maximum(dev, np.abs(mu.cdf(psi) - g_th - HALF_PI))
    worst = int(np.argmax(dev))

    mass = abs(float(mu.cdf(TWO_PI) - mu.cdf(0.0)) - TWO_PI)
    sym_grid = np.linspace(0.0, math.pi, 4097)
    sym = float(np.max(np.abs((mu.cdf(sym_grid + math.pi) - float(mu.cdf(math.pi)))
                              - (mu.cdf(sym_grid) - float(mu.cdf(0.0))))))
    atom = max_atom(mu.cdf, 0.0, TWO_PI)
    margin = tol if support_margin is None else support_margin
    ae = subtract_segments(aset, segs)
    outside = _support_mass(mu, ae, margin) / TWO_PI

    report = VerificationReport(float(dev[worst]), mass, sym, atom, outside, tol, int(th.size),
                                float(th[worst]))
    report.passed = all(x <= tol for x in (report.b_deviation, mass, sym, atom, outside))
    return report
