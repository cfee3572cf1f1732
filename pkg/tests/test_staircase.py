from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from mbk.bmeasure import max_atom
from mbk.staircase import (
    PerfectSet,
    assign_levels,
    build_measure,
    eval_staircase,
    measure_of,
    perfect_set_from_json,
)


def cantor_function(x: Fraction) -> Fraction:
    """Classical Cantor function from the ternary expansion, exact for every rational."""
    if x >= 1:
        return Fraction(1)
    out, w = Fraction(0), Fraction(1, 2)
    seen = {}
    while x not in seen:
        seen[x] = (out, w)
        x *= 3
        d = int(x)
        x -= d
        if d == 1:
            return out + w
        out += w * (d // 2)
        w /= 2
        if x == 0:
            return out
    # periodic expansion: sum the repeating block as a geometric series
    out0, w0 = seen[x]
    return out0 + (out - out0) / (1 - w / w0)


def test_oracle_sanity():
    assert cantor_function(Fraction(1, 4)) == Fraction(1, 3)
    assert cantor_function(Fraction(1, 3)) == Fraction(1, 2)
    assert cantor_function(Fraction(1, 9)) == Fraction(1, 4)


def test_levels_examples():
    f = assign_levels(PerfectSet.cantor(3))
    lv = dict(zip(f.H.gaps, f.levels))
    assert lv[(1 / 3, 2 / 3)] == 0.5
    assert lv[(1 / 9, 2 / 9)] == 0.25
    assert lv[(7 / 9, 8 / 9)] == 0.75
    empty = assign_levels(PerfectSet())
    assert empty.levels == ()


def test_levels_distinct_and_monotone():
    f = assign_levels(PerfectSet.cantor(8))
    lv = np.array(f.levels)
    assert len(set(lv)) == len(lv)
    assert np.all(np.diff(lv) > 0)


def test_order_matters():
    H = PerfectSet.cantor(2)
    # enumerate (1/9, 2/9) first: it sits between the unbounded gaps
    idx = H.gaps.index((1 / 9, 2 / 9))
    rest = [i for i in range(3) if i != idx]
    f = assign_levels(H, [idx] + rest)
    assert f.levels[idx] == 0.5
    assert np.all(np.diff(f.levels) > 0)
    with pytest.raises(ValueError):
        assign_levels(H, [0, 0, 1])


def test_eval_examples():
    c = build_measure(PerfectSet.cantor(12))
    assert eval_staircase(c.f, 0.5) == 0.5
    assert abs(eval_staircase(c.f, 0.25) - 1 / 3) < 2.0 ** -12
    full = build_measure(PerfectSet())
    assert eval_staircase(full.f, 0.7) == pytest.approx(0.7, abs=1e-15)


def test_staircase_exact_at_triadic_rationals():
    f = assign_levels(PerfectSet.cantor(12))
    rng = np.random.default_rng(0)
    k = rng.integers(1, 13, 1000)
    p = np.array([rng.integers(0, 3 ** int(kk) + 1) for kk in k])
    xs = [Fraction(int(a), 3 ** int(b)) for a, b in zip(p, k)]
    got = eval_staircase(f, np.array([float(x) for x in xs]))
    want = np.array([float(cantor_function(x)) for x in xs])
    assert np.array_equal(got, want)


def test_measure_examples():
    c = build_measure(PerfectSet.cantor(12))
    assert measure_of(c, 0, 1 / 3) == pytest.approx(0.5, abs=1e-12)
    assert measure_of(c, 1 / 3, 2 / 3) == 0.0
    assert measure_of(c, 0, 1 / 9) == pytest.approx(0.25, abs=1e-12)
    assert measure_of(c, 0.4, 0.4) == 0.0
    with pytest.raises(ValueError):
        measure_of(c, 0.5, 0.2)
    full = build_measure(PerfectSet())
    assert measure_of(full, 0, 0.3) == pytest.approx(0.3, abs=1e-15)


def test_gaps_get_zero_and_pieces_get_dyadic_mass():
    c = build_measure(PerfectSet.cantor(12))
    u = np.array([g[0] for g in c.H.gaps])
    v = np.array([g[1] for g in c.H.gaps])
    assert np.all(c.cdf(v) - c.cdf(u) == 0.0)
    p = np.array([a for a, _ in c.H.pieces])
    q = np.array([b for _, b in c.H.pieces])
    mass = c.cdf(q) - c.cdf(p)
    assert len(mass) == 2 ** 12
    assert np.all(mass >= 2.0 ** -12 - 1e-15)
    assert mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_no_atoms():
    c = build_measure(PerfectSet.cantor(12))
    assert max_atom(c.cdf, 0.0, 1.0) <= 2.0 ** -12


def test_two_piece_set_against_quadrature():
    H = PerfectSet.from_gaps([(0.25, 0.5)])
    m = build_measure(H)
    assert measure_of(m, 0, 0.25) == pytest.approx(3 / 7, abs=1e-12)

    # numeric oracle: integrate the density f' + 1_H over [0, x]
    def density(x, h=1e-7):
        fd = (eval_staircase(m.f, x + h) - eval_staircase(m.f, x - h)) / (2 * h)
        return fd + (0.0 if 0.25 < x < 0.5 else 1.0)

    left = quad(density, 0, 0.25, points=[0.25], limit=200)[0]
    total = left + quad(density, 0.25, 1, points=[0.5], limit=200)[0]
    assert left / total == pytest.approx(3 / 7, abs=1e-6)


def test_cdf_monotone_continuous():
    c = build_measure(PerfectSet.cantor(9))
    x = np.linspace(0, 1, 20001)
    F = c.cdf(x)
    assert F[0] == 0 and F[-1] == 1
    assert np.all(np.diff(F) >= 0)


def test_set_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        PerfectSet.from_gaps([(0.2, 0.5), (0.4, 0.6)])
    with pytest.raises(ValueError):
        PerfectSet.from_gaps([(0.0, 0.3)])
    with pytest.raises(ValueError):
        PerfectSet.from_gaps([(0.5, 0.5)])
    p = tmp_path / "h.json"
    p.write_text('{"kind": "gaps", "gaps": [[0.25, 0.5]]}')
    assert perfect_set_from_json(p).gaps == ((0.25, 0.5),)
    assert len(perfect_set_from_json({"kind": "cantor", "depth": 3}).gaps) == 7
    assert perfect_set_from_json({"kind": "full"}).gaps == ()
    with pytest.raises(ValueError):
        perfect_set_from_json({"kind": "?"})
