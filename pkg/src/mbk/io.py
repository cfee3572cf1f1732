"""CSV, JSON and SVG emitters.  Floats are written with 17 significant digits."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bmeasure import AngularMeasure
from .geometry import TWO_PI, AuerbachSet, PlanarBody, SegmentSet


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")


def body_hash(body: PlanarBody) -> str:
    canon = json.dumps(body.descriptor, sort_keys=True, default=float)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_auerbach_csv(path: Path, aset: AuerbachSet) -> None:
    write_csv(path, ["component_start_theta", "component_end_theta", "is_isolated"],
              [(c.start, c.end, c.isolated) for c in aset.components])


def write_segments_csv(path: Path, segs: SegmentSet) -> None:
    write_csv(path, ["start_theta", "end_theta", "dir_x", "dir_y"],
              [(s.arc.start, s.arc.end, s.direction[0], s.direction[1]) for s in segs.segments])


def write_measure_csv(path: Path, mu: AngularMeasure, n: int, header: dict) -> None:
    th, G = mu.tabulate(n)
    meta = dict(header, grid_size=n, normalization=TWO_PI)
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True, default=float) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "G"])
        for t, g in zip(th, G):
            w.writerow([fmt(t), fmt(g)])


def read_measure_csv(path: Path) -> tuple[AngularMeasure, dict]:
    lines = Path(path).read_text().splitlines()
    header = {}
    if lines and lines[0].startswith("#"):
        header = json.loads(lines[0][1:])
        lines = lines[1:]
    rows = list(csv.reader(lines))
    if not rows or rows[0] != ["theta", "G"]:
        raise ValueError("measure CSV must have a 'theta,G' header")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return AngularMeasure.from_table(data[:, 0], data[:, 1], header), header


@dataclass(frozen=True)
class TabulatedCDF:
    """CDF on [0, 1] read from a two-column (x, F) table, linearly interpolated."""

    x: np.ndarray
    F: np.ndarray

    def cdf(self, s):
        return np.interp(s, self.x, self.F)


def read_cdf_csv(path: Path) -> TabulatedCDF:
    rows = list(csv.reader(Path(path).read_text().splitlines()))
    body = [r for r in rows if r and not r[0].startswith("#")]
    if body and not _is_number(body[0][0]):
        body = body[1:]
    data = np.array([[float(a), float(b)] for a, b in body])
    x, F = data[:, 0], data[:, 1]
    if np.any(np.diff(x) <= 0) or np.any(np.diff(F) < 0):
        raise ValueError("CDF table must have increasing x and nondecreasing F")
    if x[0] > 0.0 or x[-1] < 1.0:
        raise ValueError("CDF table must cover [0, 1]")
    return TabulatedCDF(x, F)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------- SVG

_W, _H, _PAD = 480, 480, 40


def _svg(body_parts: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n<title>{title}</title>\n'
            f'<rect width="{_W}" height="{_H}" fill="white"/>\n')
    return head + "\n".join(body_parts) + "\n</svg>\n"


def _polyline(xy: np.ndarray, stroke: str, width: float = 1.5) -> str:
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in xy)
    return f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}" points="{pts}"/>'


def svg_boundary(path: Path, body: PlanarBody, aset: AuerbachSet, n: int = 2048, title: str = "Auerbach set") -> None:
    th = np.linspace(0.0, TWO_PI, n + 1)
    pts = body.point(th)
    scale = (_W / 2 - _PAD) / float(np.max(np.abs(pts)))

    def to_px(p):
        return np.stack([_W / 2 + scale * p[:, 0], _H / 2 - scale * p[:, 1]], axis=1)

    parts = [_polyline(to_px(pts), "#888888", 1.0)]
    for c in aset.components:
        if c.isolated or c.width < 1e-9:
            p = to_px(body.point(np.array([c.start])))[0]
            parts.append(f'<circle cx="{p[0]:.3f}" cy="{p[1]:.3f}" r="3" fill="#c0392b"/>')
        else:
            k = max(2, int(math.ceil(c.width / TWO_PI * n)) + 1)
            parts.append(_polyline(to_px(body.point(np.linspace(c.start, c.end, k))), "#c0392b", 3.0))
    Path(path).write_text(_svg(parts, title))


def svg_curve(path: Path, x: np.ndarray, y: np.ndarray, title: str, max_points: int = 4097) -> None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size > max_points:
        keep = np.unique(np.linspace(0, x.size - 1, max_points).round().astype(int))
        x, y = x[keep], y[keep]
    xr = (x.min(), x.max() if x.max() > x.min() else x.min() + 1)
    yr = (y.min(), y.max() if y.max() > y.min() else y.min() + 1)
    px = _PAD + (x - xr[0]) / (xr[1] - xr[0]) * (_W - 2 * _PAD)
    py = _H - _PAD - (y - yr[0]) / (yr[1] - yr[0]) * (_H - 2 * _PAD)
    axes = (f'<path d="M{_PAD},{_PAD} V{_H - _PAD} H{_W - _PAD}" stroke="black" fill="none"/>')
    Path(path).write_text(_svg([axes, _polyline(np.stack([px, py], axis=1), "#1f4e79")], title))
