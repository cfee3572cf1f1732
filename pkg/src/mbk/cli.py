"""Command line: ``mbk {analyze,measure,verify,staircase}``.

Exit codes: 0 success, 2 input error, 3 existence gate failed,
4 verification failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bmeasure as bm
from .bodies import body_from_json
from .geometry import auerbach_set, segment_set
from .io import (
    body_hash,
    read_cdf_csv,
    read_measure_csv,
    svg_boundary,
    svg_curve,
    write_auerbach_csv,
    write_csv,
    write_json,
    write_measure_csv,
    write_segments_csv,
)
from .staircase import PerfectSet, build_measure, perfect_set_from_json

log = logging.getLogger("mbk")

EXIT_OK, EXIT_INPUT, EXIT_GATE, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


def _load_body(args):
    if not args.body:
        raise InputError("--body is required")
    try:
        doc = json.loads(Path(args.body).read_text())
        if not isinstance(doc, dict):
            raise ValueError("body descriptor must be a JSON object")
        if doc.get("kind") == "cantor_bump":
            if args.depth is not None:
                doc["depth"] = args.depth
            if args.epsilon is not None:
                doc["epsilon"] = args.epsilon
        return body_from_json(doc)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise InputError(f"bad body descriptor {args.body}: {exc}") from exc


def _resolution(args, body) -> float:
    if args.resolution is not None:
        if args.resolution <= 0:
            raise InputError("--resolution must be positive")
        return args.resolution
    return 2.5e-4 if body.descriptor.get("kind") == "cantor_bump" else 1e-3


def _tol(args, body) -> float:
    if args.tol is not None:
        if args.tol <= 0:
            raise InputError("--tol must be positive")
        return args.tol
    return 1e-3 if body.descriptor.get("kind") == "cantor_bump" else 1e-6


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_analyze(args) -> int:
    body = _load_body(args)
    res = _resolution(args, body)
    out = _out(args)
    aset = auerbach_set(body, res)
    segs = segment_set(body)
    ae = bm.subtract_segments(aset, segs)
    gate = bm.existence_gate(body, res, ae=ae)
    write_auerbach_csv(out / "auerbach.csv", aset)
    write_segments_csv(out / "segments.csv", segs)
    write_auerbach_csv(out / "auerbach_minus_segments.csv", ae)
    write_json(out / "gate.json", gate.to_dict())
    svg_boundary(out / "auerbach.svg", body, aset)
    print(f"gate: {'exists' if gate.exists else 'not exists'} ({gate.classification}); "
          f"{gate.n_components} component(s) of the Auerbach set minus segments, {gate.n_isolated} isolated")
    for s, e, iso in gate.components[:20]:
        print(f"  {s:.10f} {e:.10f} {'point' if iso else 'arc'}")
    if len(gate.components) > 20:
        print(f"  ... {len(gate.components) - 20} more")
    return EXIT_OK


def _nu(args, base, depth_default: int = 12):
    spec = args.nu or "uniform"
    if spec == "uniform":
        return build_measure(base.H), "staircase-on-H"
    if spec == "cantor":
        return build_measure(PerfectSet.cantor(args.depth or depth_default)), "cantor"
    if spec.startswith("file:"):
        try:
            return read_cdf_csv(Path(spec[5:])), spec
        except (OSError, ValueError) as exc:
            raise InputError(f"bad nu file: {exc}") from exc
    raise InputError(f"unknown --nu {spec!r}")


def cmd_measure(args) -> int:
    body = _load_body(args)
    res = _resolution(args, body)
    tol = _tol(args, body)
    out = _out(args)
    ae = bm.auerbach_minus_segments(body, res)
    gate = bm.existence_gate(body, res, ae=ae)
    if not gate.exists:
        print(f"gate: not exists ({gate.classification}); no B-measure", file=sys.stderr)
        return EXIT_GATE
    base = bm.choose_base_arc(body, ae)
    depth_default = 12
    if body.descriptor.get("kind") == "cantor_bump":
        # --depth belongs to the body here
        args = argparse.Namespace(**{**vars(args), "depth": None})
    nu, nu_kind = _nu(args, base, depth_default)
    partner = bm.PartnerMap.sample(body, base)
    try:
        mu = bm.build_b_measure(body, nu, partner, base, tol=tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    header = {"body_hash": body_hash(body), "body": body.descriptor, "nu": nu_kind}
    n = args.grid or (1 << 16) + 1
    write_measure_csv(out / "measure.csv", mu, n, header)
    th, G = mu.tabulate(n)
    svg_curve(out / "measure.svg", th, G, "B-measure CDF")
    write_json(out / "measure.json", {
        "a": base.a, "b": base.b, "window": [base.lo, base.hi], "nu": nu_kind,
        "H_gaps": [list(g) for g in base.H.gaps], "gate": gate.classification,
    })
    print(f"a={base.a:.12f} b={base.b:.12f} |H gaps|={len(base.H.gaps)} nu={nu_kind}")
    return EXIT_OK


def cmd_verify(args) -> int:
    body = _load_body(args)
    res = _resolution(args, body)
    tol = _tol(args, body)
    out = _out(args)
    src = args.measure or str(out / "measure.csv")
    if src == "arclength":
        mu = bm.arc_length_measure(body)
    elif src == "uniform":
        mu = bm.AngularMeasure.uniform()
    else:
        try:
            mu, _ = read_measure_csv(Path(src))
        except (OSError, ValueError) as exc:
            raise InputError(f"bad measure file {src}: {exc}") from exc
    report = bm.verify_b_measure(body, mu, n_samples=args.samples, tol=tol, resolution=res)
    payload = report.to_dict()
    payload["measure"] = src
    write_json(out / "report.json", payload)
    print(("PASS" if report.passed else "FAIL")
          + f" b_dev={report.b_deviation:.3e} mass={report.mass_residual:.3e} "
          f"sym={report.symmetry_residual:.3e} atom={report.max_atom:.3e} "
          f"outside={report.support_outside:.3e} tol={tol:g}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_staircase(args) -> int:
    out = _out(args)
    try:
        if args.set:
            H = perfect_set_from_json(Path(args.set))
        elif args.depth is not None:
            H = PerfectSet.cantor(args.depth)
        else:
            raise InputError("give --set <json> or --depth <d>")
    except (OSError, ValueError) as exc:
        raise InputError(f"bad perfect set: {exc}") from exc
    m = build_measure(H)
    n = args.grid or 3**7 + 1
    x = np.arange(n) / (n - 1)
    f = m.f(x)
    F = m.cdf(x)
    write_csv(out / "f.csv", ["x", "f"], zip(x, f))
    write_csv(out / "cdf.csv", ["x", "F"], zip(x, F))
    svg_curve(out / "cdf.svg", x, F, "staircase measure CDF")
    print(f"{len(H.gaps)} gaps, lambda(H)={H.lebesgue:.6g}, total mass before normalization={m.total:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mbk", description="B-measures on normed planes")
    sub = p.add_subparsers(dest="cmd", required=True)
    for name, fn, helptext in [
        ("analyze", cmd_analyze, "Auerbach set, segments and existence gate"),
        ("measure", cmd_measure, "construct a B-measure"),
        ("verify", cmd_verify, "verify a measure against the B-measure axioms"),
        ("staircase", cmd_staircase, "staircase function and measure of a perfect set"),
    ]:
        s = sub.add_parser(name, help=helptext)
        s.set_defaults(fn=fn)
        s.add_argument("--body")
        s.add_argument("--resolution", type=float)
        s.add_argument("--tol", type=float)
        s.add_argument("--depth", type=int)
        s.add_argument("--epsilon", type=float)
        s.add_argument("--nu", help="uniform | cantor | file:<path>")
        s.add_argument("--out", default="out")
        s.add_argument("--grid", type=int, help="tabulation grid size")
        if name == "verify":
            s.add_argument("--measure", help="measure CSV path, or 'arclength' / 'uniform'")
            s.add_argument("--samples", type=int, default=10_000)
        if name == "staircase":
            s.add_argument("--set", help="perfect-set JSON")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
