"""Command-line front end.

Exit codes: 0 on success (including a passed property check), 1 on errors,
2 when a property check fails.  Outputs carry the resolved configuration and
are byte-identical for identical inputs, whatever the thread count.
"""

import argparse
import io as _io
import json
import sys
from dataclasses import dataclass

from . import kernels
from .curvature import (
    GridParams,
    curvature_at,
    degenerate_points,
    gauss_bonnet_total,
    scan_curvature,
)
from .curve import CurveKind, gonality_gate, make_point
from .errors import CurvCanonError, GateFailed
from .io import load_curve_spec
from .l2 import gram_matrix
from .quadrature import QuadParams
from .symprod import theorem1_check

COMMANDS = ("info", "gram", "curvature", "scan", "weierstrass", "gauss-bonnet", "symprod")
CSV_COMMANDS = ("curvature", "scan", "weierstrass")
CSV_HEADER = "re_x,im_x,re_y,im_y,chart,lambda,theta,degeneracy"
GAUSS_BONNET_TOL = 0.01

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PROPERTY = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    curve_file: str
    seed: int = 0
    d: int = 2
    trials: int = 100
    grid: int = 200
    quad_target_rel: float = 1e-7
    quad_max_level: int = 6
    quad_far_radius: float = None
    tol_theta: float = 1e-9
    x: str = "0,0"
    sheet: int = 0
    output: str = None
    format: str = None

    def resolved_format(self):
        if self.format:
            return self.format
        return "csv" if self.command == "scan" else "json"

    def echo(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["format"] = self.resolved_format()
        out.pop("output")
        out["backend"] = kernels.BACKEND
        return out

    def quad_params(self):
        return QuadParams(
            target_rel=self.quad_target_rel,
            max_level=self.quad_max_level,
            far_radius=self.quad_far_radius,
        )

    def grid_params(self):
        return GridParams(n=self.grid, tol_theta=self.tol_theta)


def _f(v):
    # shortest round-trip repr; -0.0 printed as 0.0
    return repr(float(v) + 0.0)


def _csv_rows(xs, ys, charts, lam, theta, deg):
    for k in range(len(xs)):
        x, y = complex(xs[k]), complex(ys[k])
        yield ",".join(
            [_f(x.real), _f(x.imag), _f(y.real), _f(y.imag), str(charts[k]),
             _f(lam[k]), _f(theta[k]), _f(deg[k])]
        )


def _emit(cfg, payload, rows=None):
    """Render the result; ``rows`` (CSV lines) are used for CSV output."""
    buf = _io.StringIO()
    if cfg.resolved_format() == "csv":
        buf.write("# config: " + json.dumps(cfg.echo(), sort_keys=True) + "\n")
        buf.write(CSV_HEADER + "\n")
        for line in rows or ():
            buf.write(line + "\n")
    else:
        doc = {"config": cfg.echo()}
        doc.update(payload)
        buf.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cplx(z):
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _sample_payload(s):
    p = s.point
    return {
        "x": _cplx(p.x),
        "y": _cplx(p.y),
        "chart": p.chart.value,
        "lambda": s.lam,
        "theta": s.theta + 0.0,
        "degeneracy": s.degeneracy,
    }


def _parse_x(text):
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError:
        raise CurvCanonError(f"--x expects 're,im', got {text!r}") from None
    return complex(re_, im_)


def run(cfg):
    """Execute one command; returns the exit code."""
    if cfg.command not in COMMANDS:
        raise CurvCanonError(f"unknown command {cfg.command!r}")
    fmt = cfg.resolved_format()
    if fmt not in ("csv", "json"):
        raise CurvCanonError(f"unknown format {fmt!r}")
    if fmt == "csv" and cfg.command not in CSV_COMMANDS:
        raise CurvCanonError(f"csv output is available for: {', '.join(CSV_COMMANDS)}")
    spec = load_curve_spec(cfg.curve_file)

    if cfg.command == "info":
        _emit(cfg, {"curve": spec.describe()})
        return EXIT_OK

    if cfg.command == "symprod":
        # gate first: no quadrature needed to reject d >= gonality
        gate = gonality_gate(spec, cfg.d)
        if not gate:
            raise GateFailed(gate.certificate)

    gram = gram_matrix(spec, cfg.quad_params())

    if cfg.command == "gram":
        _emit(cfg, {"curve": spec.describe(), "gram": gram.to_dict()})
        return EXIT_OK

    if cfg.command == "curvature":
        pt = make_point(spec, _parse_x(cfg.x), sheet=cfg.sheet)
        s = curvature_at(spec, gram, pt)
        ok = s.theta <= cfg.tol_theta
        rows = _csv_rows([pt.x], [pt.y], [pt.chart.value], [s.lam], [s.theta], [s.degeneracy])
        _emit(cfg, {"sample": _sample_payload(s), "passed": ok}, rows)
        return EXIT_OK if ok else EXIT_PROPERTY

    if cfg.command == "scan":
        sc = scan_curvature(spec, gram, cfg.grid_params())
        bad = sc.violations()
        payload = {
            "samples": len(sc),
            "max_theta": sc.max_theta + 0.0,
            # margin: every sample has theta <= -delta
            "delta": max(0.0, -sc.max_theta) + 0.0,
            "violations": bad,
            "passed": bad == 0,
        }
        rows = _csv_rows(sc.x, sc.y, sc.chart, sc.lam, sc.theta, sc.degeneracy)
        _emit(cfg, payload, rows)
        return EXIT_OK if bad == 0 else EXIT_PROPERTY

    if cfg.command == "weierstrass":
        pts = degenerate_points(spec, gram, cfg.grid_params())
        samples = [curvature_at(spec, gram, p) for p in pts]
        if spec.kind is CurveKind.HYPERELLIPTIC:
            expected = len(spec.branch_points)
        else:
            expected = 0
        ok = len(pts) == expected
        rows = _csv_rows(
            [p.x for p in pts], [p.y for p in pts], [p.chart.value for p in pts],
            [s.lam for s in samples], [s.theta for s in samples], [s.degeneracy for s in samples],
        )
        payload = {
            "points": [_sample_payload(s) for s in samples],
            "count": len(pts),
            "expected": expected,
            "passed": ok,
        }
        _emit(cfg, payload, rows)
        return EXIT_OK if ok else EXIT_PROPERTY

    if cfg.command == "gauss-bonnet":
        res = gauss_bonnet_total(spec, gram, cfg.quad_params())
        ok = res.rel_error < GAUSS_BONNET_TOL
        payload = {
            "total": res.total,
            "expected": res.expected,
            "rel_error": res.rel_error,
            "passed": ok,
        }
        _emit(cfg, payload)
        return EXIT_OK if ok else EXIT_PROPERTY

    # symprod
    rep = theorem1_check(spec, gram, cfg.d, trials=cfg.trials, seed=cfg.seed)
    payload = {"report": rep.to_dict(), "passed": rep.passed}
    _emit(cfg, payload)
    return EXIT_OK if rep.passed else EXIT_PROPERTY


class _Parser(argparse.ArgumentParser):
    # usage errors are errors (exit 1); exit 2 is reserved for property failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(
        prog="curvcanon",
        description="L2 pairing, canonical-map curvature and divisor metrics on explicit curves.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--curve", required=True, help="curve JSON file")
    p.add_argument("--d", type=int, default=2, help="divisor degree for symprod")
    p.add_argument("--trials", type=int, default=100, help="random divisors for symprod")
    p.add_argument("--grid", type=int, default=200, help="scan grid points per side")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quad-target-rel", type=float, default=1e-7)
    p.add_argument("--quad-max-level", type=int, default=6)
    p.add_argument("--quad-far-radius", type=float, default=None)
    p.add_argument("--tol-theta", type=float, default=1e-9)
    p.add_argument("--x", default="0,0", help="point for curvature, as 're,im'")
    p.add_argument("--sheet", type=int, default=0, help="fibre index for curvature")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must be a 64-bit unsigned integer", file=sys.stderr)
        return EXIT_ERROR
    cfg = RunConfig(
        command=args.command,
        curve_file=args.curve,
        seed=args.seed,
        d=args.d,
        trials=args.trials,
        grid=args.grid,
        quad_target_rel=args.quad_target_rel,
        quad_max_level=args.quad_max_level,
        quad_far_radius=args.quad_far_radius,
        tol_theta=args.tol_theta,
        x=args.x,
        sheet=args.sheet,
        output=args.output,
        format=args.format,
    )
    try:
        return run(cfg)
    except (CurvCanonError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
