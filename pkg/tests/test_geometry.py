import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbk.geometry import (
    TWO_PI,
    Arc,
    auerbach_set,
    birkhoff_partners,
    gauge,
    is_auerbach,
    is_birkhoff_orthogonal,
    phi,
    segment_set,
    subtract_segments,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
angles = st.floats(0.0, TWO_PI, allow_nan=False, exclude_max=True)


def brute_orthogonal(body, x, y, tol=1e-6, step=1e-4, span=10.0):
    t = np.arange(-span, span + step / 2, step)
    pts = x[None, :] + t[:, None] * y[None, :]
    return bool(body.gauge_many(pts).min() >= body.gauge(x) - tol)


# ------------------------------------------------------------ gauge

def test_gauge_examples(zoo):
    assert gauge(zoo["disk"], (3, 4)) == pytest.approx(5.0, abs=1e-12)
    assert gauge(zoo["square"], (2, 1)) == pytest.approx(2.0, abs=1e-12)
    assert gauge(zoo["l4"], (1, 1)) == pytest.approx(2 ** 0.25, abs=1e-12)
    assert gauge(zoo["hexagon"], (0, 0)) == 0.0


@pytest.mark.parametrize("name", ["disk", "l4", "square", "hexagon"])
@settings(max_examples=60, deadline=None)
@given(x=finite, y=finite, c=st.floats(-20, 20, allow_nan=False))
def test_gauge_homogeneous(zoo, name, x, y, c):
    body = zoo[name]
    g = gauge(body, (x, y))
    assert gauge(body, (c * x, c * y)) == pytest.approx(abs(c) * g, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("name", ["disk", "l4", "square", "hexagon"])
@settings(max_examples=40, deadline=None)
@given(th=angles)
def test_boundary_points_have_unit_gauge(zoo, name, th):
    body = zoo[name]
    assert gauge(body, body.point(th)) == pytest.approx(1.0, abs=1e-12)


def test_gauge_triangle_inequality(zoo):
    rng = np.random.default_rng(3)
    for body in zoo.values():
        a, b = rng.normal(size=(2, 500, 2))
        assert np.all(body.gauge_many(a + b) <= body.gauge_many(a) + body.gauge_many(b) + 1e-12)


# ------------------------------------------------------------ orthogonality

def test_birkhoff_examples(zoo):
    d, sq = zoo["disk"], zoo["square"]
    assert is_birkhoff_orthogonal(d, (1, 0), (0, 1))
    assert not is_birkhoff_orthogonal(d, (1, 0), (1 / math.sqrt(2), 1 / math.sqrt(2)))
    assert is_birkhoff_orthogonal(sq, (1, 0.5), (0, 1))


def test_birkhoff_rejects_off_boundary(zoo):
    with pytest.raises(ValueError):
        is_birkhoff_orthogonal(zoo["disk"], (1, 0), (0, 2))


@pytest.mark.parametrize("name", ["disk", "l4", "square", "hexagon"])
@settings(max_examples=30, deadline=None)
@given(a=angles, b=angles)
def test_birkhoff_sign_flips(zoo, name, a, b):
    body = zoo[name]
    x, y = body.point(a), body.point(b)
    r = is_birkhoff_orthogonal(body, x, y)
    assert r == is_birkhoff_orthogonal(body, x, -y) == is_birkhoff_orthogonal(body, -x, y)


@pytest.mark.parametrize("name", ["disk", "l4", "square", "hexagon"])
def test_birkhoff_against_brute_force(zoo, name):
    body = zoo[name]
    rng = np.random.default_rng(11)
    for _ in range(60):
        a = rng.uniform(0, TWO_PI)
        lo, hi = body.tangent_offsets(a)
        # half near a partner direction, half random
        b = a + math.pi / 2 + rng.uniform(lo, hi) + (rng.normal(scale=1e-2) if rng.random() < 0.5 else rng.uniform(0, TWO_PI))
        x, y = body.point(a), body.point(b)
        assert is_birkhoff_orthogonal(body, x, y, tol=1e-6) == brute_orthogonal(body, x, y)


def test_partners_disk(zoo):
    arcs = birkhoff_partners(zoo["disk"], 0.0)
    mids = sorted((a.start + a.width / 2) % TWO_PI for a in arcs)
    assert mids == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-12)
    assert all(a.width < 1e-12 for a in arcs)


def test_partners_square_corner(zoo):
    sq = zoo["square"]
    arcs = birkhoff_partners(sq, math.pi / 4)
    # brute-force scan over directions
    grid = np.linspace(0, TWO_PI, 721, endpoint=False)
    x = sq.point(math.pi / 4)
    scan = np.array([brute_orthogonal(sq, x, sq.point(p), step=1e-3) for p in grid])
    inside = np.array([any(a.contains(p, 1e-9) for a in arcs) for p in grid])
    assert np.array_equal(scan, inside)
    assert any(a.contains(math.pi / 2, 1e-9) for a in arcs) and any(a.contains(math.pi, 1e-9) for a in arcs)
    assert any(a.contains(3 * math.pi / 4) for a in arcs) and not any(a.contains(math.pi / 4) for a in arcs)


def test_partners_square_edge_point(zoo):
    sq = zoo["square"]
    th = math.atan2(0.5, 1.0)
    arcs = birkhoff_partners(sq, th)
    mids = sorted((a.start + a.width / 2) % TWO_PI for a in arcs)
    assert mids == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-12)
    assert all(a.width < 1e-12 for a in arcs)


# ------------------------------------------------------------ Auerbach points

def l4_auerbach_defect(t):
    # analytic oracle: gradient of the l4 norm is proportional to (x^3, y^3)
    x = np.array([math.cos(t), math.sin(t)])
    g = x ** 3
    y = np.array([-g[1], g[0]])
    return abs(float(np.dot(y ** 3, x))) / (np.linalg.norm(y) ** 3)


def test_is_auerbach_examples(zoo):
    rng = np.random.default_rng(5)
    assert all(is_auerbach(zoo["disk"], t) for t in rng.uniform(0, TWO_PI, 50))
    assert is_auerbach(zoo["l4"], 0.0)
    assert not is_auerbach(zoo["l4"], 0.3)


def test_is_auerbach_l4_matches_analytic():
    from mbk.bodies import lp_ball

    body = lp_ball(4)
    for t in np.linspace(0, TWO_PI, 400, endpoint=False):
        expect = l4_auerbach_defect(t) < 1e-12
        assert is_auerbach(body, t) == expect, t


def test_auerbach_set_disk(zoo):
    a = auerbach_set(zoo["disk"])
    assert a.full_circle and len(a.components) == 1


def test_auerbach_set_l4(zoo):
    a = auerbach_set(zoo["l4"])
    assert len(a.components) == 8 and all(c.isolated for c in a.components)
    assert np.allclose(sorted(c.start for c in a.components), np.arange(8) * math.pi / 4, atol=1e-4)


def test_auerbach_set_square(zoo):
    a = auerbach_set(zoo["square"])
    assert len(a.components) == 8 and all(c.isolated for c in a.components)
    assert np.allclose(sorted(c.start for c in a.components), np.arange(8) * math.pi / 4, atol=1e-9)


def test_auerbach_set_antipodal(zoo, cantor_body):
    for body in [*zoo.values(), cantor_body]:
        a = auerbach_set(body, 1e-3)
        for c in a.components:
            assert a.contains((c.start + math.pi) % TWO_PI, 1e-9)


def test_segments(zoo, cantor_body):
    assert len(segment_set(zoo["disk"])) == 0
    assert len(segment_set(zoo["l4"])) == 0
    assert len(segment_set(cantor_body)) == 0
    sq = segment_set(zoo["square"])
    assert len(sq) == 4
    mids = sorted((s.arc.start + s.arc.width / 2) % TWO_PI for s in sq.segments)
    assert np.allclose(mids, np.arange(4) * math.pi / 2, atol=1e-12)
    assert all(s.arc.width == pytest.approx(math.pi / 2) for s in sq.segments)


def test_subtract_segments_polygons(zoo):
    sq = subtract_segments(auerbach_set(zoo["square"]), segment_set(zoo["square"]))
    assert np.allclose(sorted(c.start for c in sq.components), math.pi / 4 + np.arange(4) * math.pi / 2)
    hx = auerbach_set(zoo["hexagon"])
    assert hx.full_circle
    hx_e = subtract_segments(hx, segment_set(zoo["hexagon"]))
    assert len(hx_e.components) == 6 and all(c.isolated for c in hx_e.components)
    assert np.allclose(sorted(c.start for c in hx_e.components), np.arange(6) * math.pi / 3, atol=1e-9)


def test_hexagon_is_radon(zoo):
    hx = zoo["hexagon"]
    rng = np.random.default_rng(8)
    for a, b in rng.uniform(0, TWO_PI, (300, 2)):
        x, y = hx.point(a), hx.point(b)
        assert is_birkhoff_orthogonal(hx, x, y, 1e-6) == is_birkhoff_orthogonal(hx, y, x, 1e-6)


# ------------------------------------------------------------ partner map

def test_phi_examples(zoo, cantor_body):
    for t in [0.0, 0.4, 2.0, 5.9]:
        assert phi(zoo["disk"], t) == pytest.approx(t + math.pi / 2, abs=1e-10)
    assert phi(zoo["square"], math.pi / 4) == pytest.approx(3 * math.pi / 4, abs=1e-9)
    assert phi(cantor_body, 0.0) == pytest.approx(math.pi / 2, abs=1e-9)


def test_phi_partner_is_mutual(cantor_body):
    for t in [0.0, 0.785398, -0.785398 % TWO_PI]:
        p = phi(cantor_body, t)
        x, y = cantor_body.point(t), cantor_body.point(p)
        assert is_birkhoff_orthogonal(cantor_body, x, y, 1e-6)
        assert is_birkhoff_orthogonal(cantor_body, y, x, 1e-6)


def test_arc_container():
    a = Arc(3 * math.pi / 2, TWO_PI + 0.1)
    assert a.contains(0.05) and a.contains(4.8) and not a.contains(1.0)


def test_component_endpoints_are_auerbach(zoo, cantor_body):
    for body, res in [*((b, 1e-3) for b in zoo.values()), (cantor_body, 2.5e-4)]:
        a = auerbach_set(body, res)
        for c in a.components[:: max(1, len(a.components) // 60)]:
            assert is_auerbach(body, c.start % TWO_PI) and is_auerbach(body, c.end % TWO_PI)


def test_partners_never_empty(zoo, cantor_body):
    for body in [*zoo.values(), cantor_body]:
        for t in np.linspace(0, TWO_PI, 97, endpoint=False):
            arcs = birkhoff_partners(body, t)
            assert arcs
            x = body.point(t)
            for a in arcs:
                assert is_birkhoff_orthogonal(body, x, body.point(a.start), 1e-6)


def test_disk_orthogonality_is_euclidean(zoo):
    d = zoo["disk"]
    rng = np.random.default_rng(2)
    for t in rng.uniform(0, TWO_PI, 200):
        x = d.point(t)
        assert is_birkhoff_orthogonal(d, x, d.point(t + math.pi / 2))
        s = t + math.pi / 2 + rng.choice([-1, 1]) * rng.uniform(1e-3, math.pi / 2)
        y = d.point(s)
        assert abs(np.dot(x, y)) > 1e-4
        assert not is_birkhoff_orthogonal(d, x, y)
