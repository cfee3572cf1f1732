"""Normed-plane geometry for origin-symmetric convex bodies.

Boundary points are indexed by polar angle.  The supporting (tangent)
directions at a boundary point are stored as offsets from ``theta + pi/2``
so that small deviations from Euclidean orthogonality keep full relative
precision; this matters for bodies that coincide with the circle on whole
arcs, where the offsets are exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .optimize import bisect_predicate, bisect_sign, golden_section

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# two tangent directions closer than this are one direction (not a corner)
CORNER_TOL = 1e-5
# polar angles within this distance of a polygon vertex are the vertex
VERTEX_SNAP = 1e-12
# |residual| beyond this is a wrap-around jump, not a sign change near a root
_WRAP_GUARD = 1.2


def wrap_pi(x):
    """Reduce angles to the interval [-pi/2, pi/2)."""
    return np.mod(np.asarray(x, dtype=float) + HALF_PI, math.pi) - HALF_PI


@dataclass(frozen=True)
class BoundaryPoint:
    theta: float
    point: tuple[float, float]


@dataclass(frozen=True)
class Arc:
    """Counterclockwise angular arc ``[start, end]`` with ``end >= start``."""

    start: float
    end: float

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError("arc end precedes start")

    @property
    def width(self) -> float:
        return self.end - self.start

    def contains(self, theta: float, slack: float = 0.0) -> bool:
        u = (theta - self.start) % TWO_PI
        return u <= self.width + slack or u >= TWO_PI - slack


class Component(NamedTuple):
    start: float
    end: float
    isolated: bool

    @property
    def width(self) -> float:
        return self.end - self.start


class PlanarBody:
    """Origin-symmetric convex body in the plane (abstract base)."""

    descriptor: dict
    closed_form: bool = False
    base_angle: float | None = None

    def radius(self, theta):
        raise NotImplementedError

    def gauge(self, x) -> float:
        raise NotImplementedError

    def gauge_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tangent_offsets(self, theta):
        """Return ``(lo, hi)``: supporting directions at ``theta`` are ``theta + pi/2 + [lo, hi]``."""
        raise NotImplementedError

    def corner_angles(self) -> np.ndarray:
        return np.empty(0)

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def boundary_point(self, theta: float) -> BoundaryPoint:
        theta = float(theta) % TWO_PI
        p = self.point(theta)
        return BoundaryPoint(theta, (float(p[0]), float(p[1])))


class RadialBody(PlanarBody):
    """Body given by a pi-periodic radial function ``r(theta)``.

    ``dr`` and ``d2r`` are optional closed-form derivatives; without ``dr``
    one-sided difference quotients are used and corners are detected.
    """

    def __init__(self, r: Callable, dr: Callable | None = None, d2r: Callable | None = None,
                 descriptor: dict | None = None, base_angle: float | None = None,
                 meta: dict | None = None, check: bool = True):
        self._r = r
        self._dr = dr
        self._d2r = d2r
        self.descriptor = dict(descriptor or {"kind": "radial"})
        self.closed_form = dr is not None
        self.base_angle = base_angle
        self.meta = dict(meta or {})
        self.symmetry_checked = False
        if check:
            self._validate()

    def radius(self, theta):
        return self._r(np.asarray(theta, dtype=float))

    def dradius(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self._dr is not None:
            return self._dr(theta)
        h = 1e-7
        return (self.radius(theta + h) - self.radius(theta - h)) / (2 * h)

    def d2radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self._d2r is not None:
            return self._d2r(theta)
        h = 1e-5
        return (self.dradius(theta + h) - self.dradius(theta - h)) / (2 * h)

    def _validate(self, n: int = 4096):
        th = np.linspace(0.0, TWO_PI, n, endpoint=False)
        r = self.radius(th)
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise ValueError("radial function must be finite and positive")
        if np.max(np.abs(self.radius(th + math.pi) - r)) > 1e-9:
            raise ValueError("radial function is not origin-symmetric")
        pts = self.point(th)
        e = np.roll(pts, -1, axis=0) - pts
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.min(cross) < -1e-12 * np.max(np.abs(cross)):
            raise ValueError("radial curve does not bound a convex set")
        self.symmetry_checked = True

    def gauge(self, x) -> float:
        x0, x1 = float(x[0]), float(x[1])
        n = math.hypot(x0, x1)
        if n == 0.0:
            return 0.0
        return n / float(self.radius(math.atan2(x1, x0)))

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        n = np.hypot(pts[..., 0], pts[..., 1])
        th = np.arctan2(pts[..., 1], pts[..., 0])
        return np.where(n == 0.0, 0.0, n / self.radius(th))

    def tangent_offsets(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        if self._dr is not None:
            off = -np.arctan2(self.dradius(theta), r)
            return off, off
        h = 1e-7
        left = (r - self.radius(theta - h)) / h
        right = (self.radius(theta + h) - r) / h
        lo = -np.arctan2(left, r)
        hi = -np.arctan2(right, r)
        smooth = np.abs(hi - lo) <= CORNER_TOL
        mid = 0.5 * (lo + hi)
        return np.where(smooth, mid, lo), np.where(smooth, mid, hi)


class PolygonBody(PlanarBody):
    """Centrally symmetric convex polygon, vertices counterclockwise."""

    closed_form = False

    def __init__(self, vertices: Sequence[Sequence[float]], descriptor: dict | None = None,
                 base_angle: float | None = None):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be a list of [x, y] pairs")
        m = len(v)
        if m < 4 or m % 2:
            raise ValueError("a symmetric polygon needs an even number (>= 4) of vertices")
        ang = np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI)
        order = np.argsort(ang, kind="stable")
        v, ang = v[order], ang[order]
        half = m // 2
        scale = np.max(np.abs(v))
        if np.max(np.abs(v[half:] + v[:half])) > 1e-9 * scale:
            raise ValueError("polygon is not origin-symmetric")
        v = np.concatenate([v[:half], -v[:half]])
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= 1e-12 * scale * scale):
            raise ValueError("polygon is not strictly convex at every vertex")
        self.vertices = v
        self.angles = np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI)
        self.angles[half:] = np.mod(self.angles[:half] + math.pi, TWO_PI)
        self.edge_dirs = np.mod(np.arctan2(e[:, 1], e[:, 0]), TWO_PI)
        normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
        h = np.einsum("ij,ij->i", normals, v)
        if np.any(h <= 0):
            raise ValueError("origin must be interior to the polygon")
        self._scaled_normals = normals / h[:, None]
        self.descriptor = dict(descriptor or {"kind": "polygon", "vertices": v.tolist()})
        self.base_angle = base_angle
        self.symmetry_checked = True

    def gauge(self, x) -> float:
        x0, x1 = float(x[0]), float(x[1])
        return max(0.0, max(n0 * x0 + n1 * x1 for n0, n1 in self._scaled_normals))

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.maximum(0.0, (pts @ self._scaled_normals.T).max(axis=-1))

    def radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return 1.0 / self.gauge_many(u)

    def corner_angles(self) -> np.ndarray:
        return self.angles.copy()

    def _locate(self, theta):
        """Edge index containing ``theta`` and the index of a snapped vertex (-1 if none)."""
        t = np.mod(theta, TWO_PI)
        m = len(self.angles)
        k = (np.searchsorted(self.angles, t, side="right") - 1) % m
        d_here = np.abs(wrap_pi(2 * (t - self.angles[k])) / 2)
        nxt = (k + 1) % m
        d_next = np.abs(wrap_pi(2 * (t - self.angles[nxt])) / 2)
        vert = np.where(d_here <= VERTEX_SNAP, k, np.where(d_next <= VERTEX_SNAP, nxt, -1))
        return k, vert

    def tangent_offsets(self, theta):
        theta = np.asarray(theta, dtype=float)
        k, vert = self._locate(theta)
        m = len(self.angles)

        def off(edge):
            return np.mod(self.edge_dirs[edge] - theta, TWO_PI) - HALF_PI

        edge_off = off(k)
        vi = np.where(vert >= 0, vert, 0)
        lo_v = off((vi - 1) % m) - VERTEX_SNAP
        hi_v = off(vi) + VERTEX_SNAP
        is_v = vert >= 0
        return np.where(is_v, lo_v, edge_off), np.where(is_v, hi_v, edge_off)


# ---------------------------------------------------------------- orthogonality

def _as_point(body: PlanarBody, p) -> np.ndarray:
    if isinstance(p, BoundaryPoint):
        return np.array(p.point, dtype=float)
    return np.asarray(p, dtype=float)


def gauge(body: PlanarBody, x) -> float:
    return body.gauge(_as_point(body, x))


def is_birkhoff_orthogonal(body: PlanarBody, x, y, tol: float = 1e-8) -> bool:
    """Decide ``x ⊣ y``: ``min_t ||x + t y|| >= ||x|| - tol``."""
    xv, yv = _as_point(body, x), _as_point(body, y)
    gx, gy = body.gauge(xv), body.gauge(yv)
    if abs(gy - 1.0) > 1e-6:
        raise ValueError(f"y is not on the unit circle (gauge {gy:.6g})")
    if abs(gx - 1.0) > 1e-6:
        raise ValueError(f"x is not on the unit circle (gauge {gx:.6g})")
    if body.closed_form:
        h = 1e-6
        qp = (body.gauge(xv + h * yv) - gx) / h
        qm = (body.gauge(xv - h * yv) - gx) / h
        if qp >= -1e-8 and qm >= -1e-8:
            return True
    # the minimizer satisfies |t| <= 2 gx / gy by the triangle inequality
    span = 2.0 * gx / gy
    _, fmin = golden_section(lambda t: body.gauge(xv + t * yv), -span, span, iterations=200)
    return fmin >= gx - tol


def birkhoff_partners(body: PlanarBody, theta: float) -> list[Arc]:
    """Polar angles ``psi`` with ``x(theta) ⊣ y(psi)``, as two antipodal arcs."""
    lo, hi = body.tangent_offsets(float(theta))
    lo, hi = float(lo), float(hi)
    if hi - lo <= 2 * VERTEX_SNAP + CORNER_TOL:
        if hi - lo <= 2 * VERTEX_SNAP:
            lo = hi = 0.5 * (lo + hi)
    base = (float(theta) + HALF_PI) % TWO_PI
    first = Arc(base + lo, base + hi)
    return [first, Arc(first.start + math.pi, first.end + math.pi)]


def _signed_gap(lo, hi):
    """Signed distance (mod pi) of 0 from the direction interval ``[lo, hi]``.

    Positive means 0 lies beyond the interval, negative means before it.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    shift = np.floor((lo + HALF_PI) / math.pi) * math.pi
    lo = lo - shift
    hi = hi - shift
    inside = ((lo <= 0) & (hi >= 0)) | (hi - math.pi >= 0)
    # lo in [-pi/2, pi/2): if lo > 0 the interval sits above 0, else it ends below 0
    res = np.where(lo > 0, np.where(lo <= math.pi - hi, -lo, math.pi - hi),
                   np.where(-hi <= lo + math.pi, -hi, -(lo + math.pi)))
    return np.where(inside, 0.0, res)


def auerbach_residual(body: PlanarBody, theta):
    """Signed angular distance of ``theta`` from the set of partners of its partners.

    Zero exactly at Auerbach points; changes sign across isolated ones.
    """
    theta = np.asarray(theta, dtype=float)
    d_lo, d_hi = body.tangent_offsets(theta)
    psi_lo = theta + HALF_PI + d_lo
    psi_hi = theta + HALF_PI + d_hi
    e_lo, _ = body.tangent_offsets(psi_lo)
    _, e_hi = body.tangent_offsets(psi_hi)
    return _signed_gap(d_lo + e_lo, d_hi + e_hi)


def _partner_gap(body: PlanarBody, theta: float, d: float) -> float:
    """Signed distance of the direction ``theta`` from the partner set of ``y(theta + pi/2 + d)``."""
    lo, hi = body.tangent_offsets(theta + HALF_PI + d)
    return float(_signed_gap(d + lo, d + hi))


def is_auerbach(body: PlanarBody, theta: float, tol: float = 1e-9, atol: float = 0.0) -> bool:
    """True iff an Auerbach point lies within angular distance ``tol`` of ``theta``.

    ``atol`` is the residual regarded as zero; zero residuals are computed
    exactly for circular arcs and polygon edges.
    """
    theta = float(theta)
    r = auerbach_residual(body, np.array([theta - tol, theta, theta + tol]))
    if np.any(np.abs(r) <= atol):
        return True
    small = np.abs(r) < _WRAP_GUARD
    for i in (0, 1):
        if small[i] and small[i + 1] and (r[i] > 0) != (r[i + 1] > 0):
            return True
    return False


def phi(body: PlanarBody, theta: float, tol: float = 1e-12, atol: float = 1e-13) -> float:
    """First mutual-orthogonality partner of ``theta`` in the positive direction."""
    theta = float(theta)
    lo, hi = body.tangent_offsets(theta)
    lo, hi = float(lo), float(hi)
    g_lo = _partner_gap(body, theta, lo)
    if abs(g_lo) <= atol:
        return theta + HALF_PI + lo
    if hi > lo and g_lo > 0 and _partner_gap(body, theta, hi) <= atol:
        d = bisect_predicate(lambda d: _partner_gap(body, theta, d) <= atol, hi, lo, tol=tol)
        return theta + HALF_PI + d
    raise ValueError(f"no mutual-orthogonality partner for theta={theta!r} within a half-turn")


# ---------------------------------------------------------------- angular sets

def _merge_pi_circle(comps: list[tuple[float, float]], gap: float, period: float) -> list[tuple[float, float]]:
    """Merge closed intervals on a circle of the given period whose distance is <= gap."""
    if not comps:
        return []
    comps = sorted(((s % period, s % period + (e - s)) for s, e in comps))
    out = [list(comps[0])]
    for s, e in comps[1:]:
        if s - out[-1][1] <= gap:
            out[-1][1] = max(out[-1][1], e)
        else:
            out.append([s, e])
    if len(out) > 1 and out[0][0] + period - out[-1][1] <= gap:
        first = out.pop(0)
        out[-1][1] = max(out[-1][1], first[1] + period)
    if len(out) == 1 and out[0][1] - out[0][0] >= period - gap:
        return [(0.0, period)]
    return [(s, e) for s, e in out]


@dataclass(frozen=True)
class AuerbachSet:
    """Detected Auerbach points as components over ``[0, 2pi)`` (ends may exceed 2pi)."""

    components: tuple[Component, ...]
    resolution: float
    tol: float

    @property
    def full_circle(self) -> bool:
        return len(self.components) == 1 and self.components[0].width >= TWO_PI

    def angles(self) -> np.ndarray:
        return np.array([c.start for c in self.components])

    def contains(self, theta: float, slack: float = 0.0) -> bool:
        return any(Arc(c.start, c.end).contains(theta, slack) for c in self.components)


@dataclass(frozen=True)
class Segment:
    arc: Arc
    direction: tuple[float, float]


@dataclass(frozen=True)
class SegmentSet:
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.segments)

    def arcs(self) -> list[Arc]:
        return [s.arc for s in self.segments]


def _mirror(comps: list[tuple[float, float]], isolated_width: float) -> tuple[Component, ...]:
    if comps == [(0.0, math.pi)]:
        return (Component(0.0, TWO_PI, False),)
    out = []
    for s, e in comps:
        iso = (e - s) < isolated_width
        out.append(Component(s, e, iso))
        out.append(Component(s + math.pi, e + math.pi, iso))
    return tuple(sorted(out))


def auerbach_set(body: PlanarBody, resolution: float = 1e-3, tol: float = 1e-10,
                 atol: float = 0.0) -> AuerbachSet:
    """Grid scan of the Auerbach residual with bisection refinement.

    Scans the half-turn ``[0, pi)`` (the set is antipodally symmetric) on a
    grid of step ``resolution`` plus all corner angles; runs of zero residual
    become arcs, sign changes become isolated points.  Components closer than
    twice the resolution are merged.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    n = max(8, int(math.ceil(math.pi / resolution)))
    grid = np.arange(n) * (math.pi / n)
    corners = np.mod(body.corner_angles(), math.pi)
    if corners.size:
        grid = np.unique(np.concatenate([grid, corners]))
    grid = grid[grid < math.pi]
    res = auerbach_residual(body, grid)
    zero = np.abs(res) <= atol
    m = len(grid)

    def is_zero(t):
        return abs(float(auerbach_residual(body, t))) <= atol

    def resid(t):
        return float(auerbach_residual(body, t))

    if zero.all():
        comps = [(0.0, math.pi)]
    else:
        comps = []
        # rotate so that index 0 is a nonzero residual: runs never wrap
        start = int(np.argmin(zero))
        idx = [(start + k) % m for k in range(m)]

        def lifted(k):
            return grid[(start + k) % m] + math.pi * ((start + k) // m)

        k = 0
        while k < m:
            if zero[idx[k]]:
                k0 = k
                while k + 1 < m and zero[idx[k + 1]]:
                    k += 1
                left = bisect_predicate(is_zero, lifted(k0), lifted(k0 - 1), tol=tol)
                right = bisect_predicate(is_zero, lifted(k), lifted(k + 1), tol=tol)
                comps.append((left, right))
            k += 1
        for k in range(m):
            i, j = idx[k], idx[(k + 1) % m]
            a, b = res[i], res[j]
            if zero[i] or zero[j]:
                continue
            if abs(a) < _WRAP_GUARD and abs(b) < _WRAP_GUARD and (a > 0) != (b > 0):
                t0, t1 = lifted(k), lifted(k + 1)
                root = bisect_sign(resid, t0, t1, tol=tol)
                comps.append((root, root))
        comps = _merge_pi_circle(comps, 2.0 * resolution, math.pi)
    if not comps:
        raise RuntimeError("no Auerbach point detected; tolerance or resolution is inconsistent")
    return AuerbachSet(_mirror(comps, resolution), resolution, tol)


def segment_set(body: PlanarBody, tol: float = 1e-13, n: int = 1 << 16) -> SegmentSet:
    """Maximal open boundary segments (antipodally symmetric)."""
    if isinstance(body, PolygonBody):
        m = len(body.vertices)
        segs = []
        for i in range(m):
            s = body.angles[i]
            e = body.angles[(i + 1) % m]
            if e <= s:
                e += TWO_PI
            d = body.vertices[(i + 1) % m] - body.vertices[i]
            d = d / np.hypot(*d)
            segs.append(Segment(Arc(float(s), float(e)), (float(d[0]), float(d[1]))))
        return SegmentSet(tuple(sorted(segs, key=lambda s: s.arc.start)))
    h = math.pi / n
    th = np.arange(n + 2) * h
    if body.closed_form:
        # tangent angle increments, h + d(offset): exact zero on a segment
        off, _ = body.tangent_offsets(th)
        turn = np.abs(h + np.diff(off))
        shift = 1
    else:
        tol = max(tol, 1e-10)
        pts = body.point(th)
        chords = np.diff(pts, axis=0)
        chord_dir = np.arctan2(chords[:, 1], chords[:, 0])
        turn = np.abs(wrap_pi(2 * np.diff(chord_dir)) / 2)
        shift = 2
    flat = turn <= tol
    runs = []
    k = 0
    while k < len(flat):
        if flat[k]:
            k0 = k
            while k + 1 < len(flat) and flat[k + 1]:
                k += 1
            if k - k0 >= 2:
                runs.append((th[k0], th[min(k + shift, len(th) - 1)]))
        k += 1
    runs = _merge_pi_circle(runs, 0.0, math.pi)
    segs = []
    for s, e in runs:
        p0, p1 = body.point(s), body.point(e)
        d = (p1 - p0) / np.hypot(*(p1 - p0))
        for off in (0.0, math.pi):
            sgn = 1.0 if off == 0.0 else -1.0
            segs.append(Segment(Arc(s + off, e + off), (sgn * float(d[0]), sgn * float(d[1]))))
    return SegmentSet(tuple(sorted(segs, key=lambda s: s.arc.start)))


def subtract_segments(aset: AuerbachSet, segments: SegmentSet) -> AuerbachSet:
    """Remove open segment arcs from the Auerbach components."""
    opens = [(s.arc.start, s.arc.end) for s in segments.segments]
    if not opens:
        return aset
    pieces: list[tuple[float, float]] = []
    for c in aset.components:
        cur = [(c.start, c.end)]
        for s, e in opens:
            nxt = []
            for lo, hi in cur:
                for shift in (-TWO_PI, 0.0, TWO_PI):
                    s2, e2 = s + shift, e + shift
                    if s2 < hi and e2 > lo:
                        break
                else:
                    nxt.append((lo, hi))
                    continue
                if lo <= s2:
                    nxt.append((lo, min(hi, s2)))
                if hi >= e2:
                    nxt.append((max(lo, e2), hi))
            cur = nxt
        pieces.extend(cur)
    pieces = [(s % TWO_PI, s % TWO_PI + (e - s)) for s, e in pieces]
    # dedupe touching copies (e.g. a vertex shared by two edges)
    pieces = _merge_pi_circle(pieces, 1e-12, TWO_PI) if pieces else []
    comps = tuple(sorted(Component(s, e, (e - s) < aset.resolution) for s, e in pieces))
    return AuerbachSet(comps, aset.resolution, aset.tol)
