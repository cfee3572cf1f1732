"""Test bodies: disk, l_p balls, polygons and the Cantor-bump body."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .geometry import PlanarBody, PolygonBody, RadialBody, wrap_pi

BASE_ARC = (-math.pi / 4, math.pi / 4)


def bump(x):
    """Smooth bump ``exp(-1/(1-x^2))`` on (-1, 1), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    q = np.where(inside, 1.0 - x * x, 1.0)
    out = np.where(inside, np.exp(-1.0 / q), 0.0)
    return out if out.ndim else float(out)


def bump_d1(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    q = np.where(inside, 1.0 - x * x, 1.0)
    out = np.where(inside, np.exp(-1.0 / q) * (-2.0 * x / q**2), 0.0)
    return out if out.ndim else float(out)


def bump_d2(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    q = np.where(inside, 1.0 - x * x, 1.0)
    poly = 4.0 * x * x / q**4 - 2.0 / q**2 - 8.0 * x * x / q**3
    out = np.where(inside, np.exp(-1.0 / q) * poly, 0.0)
    return out if out.ndim else float(out)


def disk() -> RadialBody:
    return RadialBody(lambda t: np.ones_like(t), lambda t: np.zeros_like(t),
                      lambda t: np.zeros_like(t), descriptor={"kind": "disk"})


def lp_ball(p: float) -> PlanarBody:
    p = float(p)
    if not p >= 1.0:
        raise ValueError("l_p ball needs p >= 1")
    if p == 1.0:
        return PolygonBody([[1, 0], [0, 1], [-1, 0], [0, -1]], descriptor={"kind": "lp", "p": 1.0})
    if math.isinf(p):
        return PolygonBody([[1, 1], [-1, 1], [-1, -1], [1, -1]], descriptor={"kind": "lp", "p": "inf"})

    def S(t):
        return np.abs(np.cos(t)) ** p + np.abs(np.sin(t)) ** p

    def r(t):
        return S(t) ** (-1.0 / p)

    def dr(t):
        c, s = np.cos(t), np.sin(t)
        ds = np.abs(s) ** (p - 1) * np.sign(s) * c - np.abs(c) ** (p - 1) * np.sign(c) * s
        return -S(t) ** (-1.0 / p - 1.0) * ds

    return RadialBody(r, dr, descriptor={"kind": "lp", "p": p})


def regular_polygon(n: int, phase: float = 0.0) -> PolygonBody:
    if n < 4 or n % 2:
        raise ValueError("regular symmetric polygon needs an even n >= 4")
    t = phase + np.arange(n) * (2 * math.pi / n)
    return PolygonBody(np.stack([np.cos(t), np.sin(t)], axis=1),
                       descriptor={"kind": "regular_polygon", "n": n, "phase": phase})


def cantor_fractions(depth: int) -> list[tuple[Fraction, Fraction, int]]:
    """Middle-thirds gaps of ``[0, 1]`` up to ``depth``, as ``(u, v, generation)``.

    Ordered by generation, left to right within a generation.
    """
    gaps = []
    pieces = [(Fraction(0), Fraction(1))]
    for gen in range(1, depth + 1):
        nxt = []
        for a, b in pieces:
            third = (b - a) / 3
            gaps.append((a + third, b - third, gen))
            nxt += [(a, a + third), (b - third, b)]
        pieces = nxt
    return gaps


@dataclass(frozen=True)
class CantorBumpSpec:
    depth: int = 6
    epsilon: float = 0.01

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise ValueError("depth must be an integer >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def curvature_numerator(body: RadialBody, theta) -> np.ndarray:
    r = body.radius(theta)
    d1 = body.dradius(theta)
    d2 = body.d2radius(theta)
    return r * r + 2 * d1 * d1 - r * d2


def make_cantor_bump(spec: CantorBumpSpec, check_points: int = 100_000) -> RadialBody:
    """Unit circle indented by bumps over the removed middle-thirds gaps of ``[-pi/4, pi/4]``.

    A gap of generation ``k`` gets amplitude ``epsilon * 9**(1-k)`` so the
    curvature bound is the same for every generation.
    """
    a0, a1 = BASE_ARC
    width = a1 - a0
    fr = cantor_fractions(spec.depth)
    g0 = np.array([a0 + width * float(u) for u, _, _ in fr])
    g1 = np.array([a0 + width * float(v) for _, v, _ in fr])
    gen = np.array([k for _, _, k in fr])
    order = np.argsort(g0)
    g0, g1, gen = g0[order], g1[order], gen[order]
    amp = spec.epsilon * 9.0 ** (1 - gen)
    mid = 0.5 * (g0 + g1)
    scale = 2.0 / (g1 - g0)

    def locate(t):
        t = wrap_pi(t)
        k = np.searchsorted(g0, t, side="right") - 1
        kk = np.clip(k, 0, len(g0) - 1)
        inside = (k >= 0) & (t > g0[kk]) & (t < g1[kk])
        u = np.where(inside, scale[kk] * (t - mid[kk]), 2.0)
        return kk, inside, u

    def r(t):
        k, inside, u = locate(t)
        return 1.0 - np.where(inside, amp[k] * bump(u), 0.0)

    def dr(t):
        k, inside, u = locate(t)
        return -np.where(inside, amp[k] * scale[k] * bump_d1(u), 0.0)

    def d2r(t):
        k, inside, u = locate(t)
        return -np.where(inside, amp[k] * scale[k] ** 2 * bump_d2(u), 0.0)

    meta = {
        "gaps": list(zip(g0.tolist(), g1.tolist())),
        "generations": gen.tolist(),
        "amplitudes": amp.tolist(),
    }
    body = RadialBody(r, dr, d2r, descriptor={"kind": "cantor_bump", "depth": spec.depth,
                                              "epsilon": spec.epsilon},
                      base_angle=a0 % (2 * math.pi), meta=meta, check=False)
    th = np.concatenate([np.linspace(-math.pi / 2, math.pi / 2, check_points, endpoint=False), mid])
    if np.min(curvature_numerator(body, th)) <= 0:
        raise ValueError(f"epsilon={spec.epsilon} breaks strict convexity")
    body._validate()
    return body


def cantor_intervals(depth: int) -> list[tuple[float, float]]:
    """Angular pieces of the depth-``depth`` Cantor approximation of the base arc."""
    pieces = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        pieces = [q for a, b in pieces for q in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
    a0, a1 = BASE_ARC
    return [(a0 + (a1 - a0) * float(a), a0 + (a1 - a0) * float(b)) for a, b in pieces]


def make_body(kind: str, **params) -> PlanarBody:
    if kind == "disk":
        return disk()
    if kind == "lp":
        p = params.get("p")
        if p is None:
            raise ValueError("lp body needs 'p'")
        return lp_ball(float("inf") if p == "inf" else float(p))
    if kind == "polygon":
        verts = params.get("vertices")
        if not verts:
            raise ValueError("polygon body needs 'vertices'")
        return PolygonBody(verts)
    if kind == "regular_polygon":
        return regular_polygon(int(params.get("n", 6)), float(params.get("phase", 0.0)))
    if kind == "cantor_bump":
        return make_cantor_bump(CantorBumpSpec(int(params.get("depth", 6)),
                                               float(params.get("epsilon", 0.01))))
    raise ValueError(f"unknown body kind {kind!r}")


def body_from_json(doc: dict | str | Path) -> PlanarBody:
    if not isinstance(doc, dict):
        doc = json.loads(Path(doc).read_text())
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("body descriptor must be a JSON object with a 'kind'")
    params = {k: v for k, v in doc.items() if k != "kind"}
    return make_body(doc["kind"], **params)
