"""Command-line front end.

Commands:

* ``solve``        integrate the profile ODE and write ``r,Y,dY,d2Y,defect`` as CSV
* ``certify``      non-existence certificate(s) for quadratic profiles as JSON
* ``verify``       run the numerical oracles for one configuration, JSON summary
* ``export-field`` ambient velocity samples ``x1,x2,x3,u1,u2,u3[,p1,p2]`` as CSV
* ``limits``       flat-limit coefficient deviations as JSON

Exit status is 0 on success, 2 when a certificate is inconclusive and 1 on any
error.  Floats are written with 17 significant digits so that output files are
byte-identical across runs and round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata

import numpy as np

from . import oracle
from .analysis import (
    RegionSpec,
    Verdict,
    certify_nonexistence,
    flat_limit_consistency,
    reconstruct_pressure,
    solve_flow,
    solve_interval,
)
from .calculus import (
    ROTATION_CONVENTIONS,
    FlowParameters,
    QuadraticProfile,
    convection_oneform,
    hodge_laplacian_oneform,
)
from .errors import FlowError
from .geometry import Chart, ChartKind, ChartPoint, embed, frame_at, poincare_project

CHART_NAMES = {
    "sphere": ChartKind.SPHERE_POLAR,
    "hyperbolic-polar": ChartKind.HYPERBOLIC_POLAR,
    "hyperbolic-disc": ChartKind.HYPERBOLIC_POLAR,
    "hyperbolic-edge": ChartKind.HYPERBOLIC_CARTESIAN,
}
PARAM_FIELDS = ("nu", "beta", "delta", "alpha0", "alpha1", "alpha2")


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - running from a source tree
        from . import __version__

        return __version__


def fmt(x) -> str:
    return "%.17g" % x


def _jsonable(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# --- parsing -------------------------------------------------------------------------


def _positive(text: str) -> float:
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return x


def _finite(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return x


def _epsilon(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"epsilon0 must be positive or inf, got {text!r}")
    return x


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("geometry and flow")
    g.add_argument("--chart", choices=sorted(CHART_NAMES), default="sphere")
    g.add_argument("--a", type=_positive, default=1.0, help="curvature scale, K = +a^2 or -a^2")
    g.add_argument("--nu", type=_positive, default=1.0, help="kinematic viscosity")
    g.add_argument("--beta", type=_finite, default=0.0, help="rotation rate (sphere only)")
    g.add_argument("--delta", type=_finite, default=None, help="inner radius in radians (default pi/(4a); 0 on the edge chart)")
    g.add_argument("--alpha0", type=_finite, default=0.0)
    g.add_argument("--alpha1", type=_finite, default=1.0)
    g.add_argument("--alpha2", type=_finite, default=1.0)
    g.add_argument("--theta-extent", type=_positive, default=math.pi / 2, help="sector angle")
    g.add_argument("--epsilon0", type=_epsilon, default=math.inf, help="radial thickness of the region")
    g.add_argument("--tol", type=_positive, default=1e-10, help="Runge-Kutta tolerance")
    g.add_argument("--rotation-convention", choices=ROTATION_CONVENTIONS, default="paper")
    g.add_argument("--out", default="-", help="output path, '-' for stdout")
    g.add_argument("--seed", type=int, default=0, help="seed for randomised checks")


class _Parser(argparse.ArgumentParser):
    """Parse errors exit with status 1; status 2 means an inconclusive certificate."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spaceform-flows", description="Parallel laminar flows on space forms of constant curvature."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the profile ODE, write CSV")
    _add_common(p)
    p.add_argument("--points", type=int, default=201, help="number of equispaced output rows")

    p = sub.add_parser("certify", help="certify non-existence of a quadratic profile")
    _add_common(p)
    p.add_argument("--grid", help="CSV of parameter rows (columns among nu,beta,delta,alpha0,alpha1,alpha2)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for --grid")
    p.add_argument("--extension-check", action="store_true", help="also continue the data through the Case-3 ODE")

    p = sub.add_parser("verify", help="run the numerical oracles for one configuration")
    _add_common(p)

    p = sub.add_parser("export-field", help="ambient velocity samples as CSV")
    _add_common(p)
    p.add_argument("--profile", choices=("ode", "quadratic"), default="ode")
    p.add_argument("--n1", type=int, default=11, help="samples along c1")
    p.add_argument("--n2", type=int, default=9, help="samples along c2")

    p = sub.add_parser("limits", help="flat-limit coefficient deviations")
    p.add_argument("--a-values", type=_positive, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4])
    p.add_argument("--r-window", type=_positive, nargs=2, default=[0.5, 1.5])
    p.add_argument("--out", default="-")
    return parser


def config_from_args(args):
    """Chart, parameters and region, re-validated with actionable messages."""
    chart = Chart(CHART_NAMES[args.chart], args.a)
    delta = args.delta
    if delta is None:
        delta = 0.0 if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN else math.pi / (4 * args.a)
    params = FlowParameters(args.nu, args.beta, delta, args.alpha0, args.alpha1, args.alpha2)
    params.validate(chart)
    region = RegionSpec(delta, args.theta_extent, args.epsilon0).validate(chart)
    return chart, params, region


def _write(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


# --- commands ------------------------------------------------------------------------


def cmd_solve(args) -> int:
    chart, params, region = config_from_args(args)
    sol, report = solve_flow(chart, params, region, args.tol)
    t0, t_end = solve_interval(chart, params, region)
    rs = np.linspace(t0, t_end, max(args.points, 2))
    rows = []
    for r in rs:
        derivs = sol(r)
        rows.append((r, derivs[0], derivs[1], derivs[2], params.nu * sol.system.apply(r, derivs)))
    _write(args.out, _csv_text(["r", "Y", "dY", "d2Y", "defect"], rows))
    return 0


def certificate_record(cert) -> dict:
    d = cert.to_dict()
    w = d["witness"]
    witness = {"name": w["name"], "value": w["value"], "location": w["location"]}
    witness.update({k: v for k, v in w.items() if k not in witness})
    return {
        "chart": d["chart"],
        "a": d["a"],
        "params": d["params"],
        "case_label": d["case_label"],
        "witness": witness,
        "verdict": d["verdict"],
        "error_estimate": d["error_estimate"],
        "tool_version": tool_version(),
    }


def _certify_one(job):
    kind, a, values, extension = job
    chart = Chart(kind, a)
    return certificate_record(certify_nonexistence(chart, FlowParameters(**values), extension_check=extension))


def _read_grid(path: str, base: FlowParameters) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        unknown = set(reader.fieldnames or ()) - set(PARAM_FIELDS)
        if unknown:
            raise ValueError(f"unknown grid columns {sorted(unknown)}; allowed: {', '.join(PARAM_FIELDS)}")
        rows = []
        for row in reader:
            values = {f: getattr(base, f) for f in PARAM_FIELDS}
            values.update({k: float(v) for k, v in row.items()})
            rows.append(values)
    return rows


def cmd_certify(args) -> int:
    chart, params, _ = config_from_args(args)
    if args.grid:
        rows = _read_grid(args.grid, params)
        jobs = [(chart.kind, chart.a, values, args.extension_check) for values in rows]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                records = list(pool.map(_certify_one, jobs))  # map keeps input order
        else:
            records = [_certify_one(j) for j in jobs]
        _write(args.out, dump_json(records))
        inconclusive = any(r["verdict"] != Verdict.NON_EXISTENCE.value for r in records)
    else:
        cert = certify_nonexistence(chart, params, extension_check=args.extension_check)
        _write(args.out, dump_json(certificate_record(cert)))
        inconclusive = cert.verdict is not Verdict.NON_EXISTENCE
    return 2 if inconclusive else 0


def _operator_orders(chart, params, seed) -> dict:
    rng = np.random.default_rng(seed)
    lo = 0.0 if chart.kind is ChartKind.HYPERBOLIC_CARTESIAN else params.delta
    c1 = lo + rng.uniform(0.2, 0.8) / chart.a
    if chart.is_sphere:
        c1 = min(c1, 0.5 * (params.delta + math.pi / chart.a))
    p = ChartPoint(c1, rng.uniform(0.1, 1.0))
    prof = QuadraticProfile.from_params(params)
    metric = oracle.chart_metric_fn(chart)
    vec, cov = oracle.parallel_flow_fields(metric, prof)
    hs = [0.04 / chart.a / 2**k for k in range(3)]
    lap = hodge_laplacian_oneform(chart, prof, p)
    conv = convection_oneform(chart, prof, p)
    lap_err = [np.max(np.abs(oracle.hodge_laplacian(metric, cov, p, h) - np.array(lap))) for h in hs]
    conv_err = [np.max(np.abs(oracle.covariant_self_derivative(metric, vec, p, h) - np.array(conv))) for h in hs]
    return {
        "point": list(p),
        "laplacian_orders": oracle.convergence_orders(lap_err).tolist(),
        "convection_orders": oracle.convergence_orders(conv_err).tolist(),
    }


def cmd_verify(args) -> int:
    chart, params, region = config_from_args(args)
    checks = {}
    sol, report = solve_flow(chart, params, region, args.tol)
    checks["defect"] = {
        "value": report.max_relative_defect,
        "threshold": 1e-8,
        "passed": report.max_relative_defect <= 1e-8,
    }
    checks["cross_solver"] = {
        "value": report.cross_solver_error,
        "threshold": 1e-8,
        "passed": report.cross_solver_error <= 1e-8,
    }
    t0, t_end = solve_interval(chart, params, region)
    span = t_end - t0
    path = [
        ChartPoint(t0 + 0.1 * span, 0.1 * region.theta_extent),
        ChartPoint(t0 + 0.9 * span, 0.1 * region.theta_extent),
        ChartPoint(t0 + 0.9 * span, 0.9 * region.theta_extent),
    ]
    pres = reconstruct_pressure(chart, params, sol, region, path, args.rotation_convention)
    bound = 1e-6 * max(1.0, pres.alpha_norm)
    checks["pressure_closure"] = {
        "value": pres.closure_error,
        "threshold": bound,
        "passed": pres.closure_error <= bound,
    }
    orders = _operator_orders(chart, params, args.seed)
    worst = min(orders["laplacian_orders"] + orders["convection_orders"])
    checks["operator_order"] = {"value": worst, "threshold": 1.9, "passed": worst >= 1.9, **orders}
    if params.alpha1 > 0 and params.alpha2 > 0:
        cert = certify_nonexistence(chart, params)
        checks["quadratic_nonexistence"] = {
            "value": cert.witness["value"],
            "case_label": cert.case_label.value,
            "passed": cert.verdict is Verdict.NON_EXISTENCE,
        }
    passed = all(c["passed"] for c in checks.values())
    out = {
        "chart": chart.kind.value,
        "a": chart.a,
        "params": {f: getattr(params, f) for f in PARAM_FIELDS},
        "seed": args.seed,
        "checks": checks,
        "passed": passed,
        "tool_version": tool_version(),
    }
    _write(args.out, dump_json(out))
    return 0 if passed else 1


def ambient_velocity(chart, p, y: float) -> np.ndarray:
    """``u = -Y e2`` in ambient coordinates."""
    return -y * frame_at(chart, p).e2


def field_rows(chart, params, region, prof, n1: int, n2: int) -> list:
    """Ambient position and velocity ``u = -Y e2`` on a ``(c1, c2)`` grid strictly
    inside the region; hyperbolic rows carry Poincare-disc coordinates."""
    t0, t_end = solve_interval(chart, params, region)
    span = t_end - t0
    c1s = t0 + span * (np.arange(n1) + 0.5) / n1
    c2s = region.theta_extent * (np.arange(n2) + 0.5) / n2
    rows = []
    for c1 in c1s:
        y = prof(c1)[0]
        for c2 in c2s:
            p = ChartPoint(float(c1), float(c2))
            x = embed(chart, p)
            u = ambient_velocity(chart, p, y)
            row = [*x, *u]
            if not chart.is_sphere:
                row.extend(poincare_project(x, chart.a))
            rows.append(row)
    return rows


def cmd_export_field(args) -> int:
    chart, params, region = config_from_args(args)
    if args.profile == "quadratic":
        prof = QuadraticProfile.from_params(params)
    else:
        prof, _ = solve_flow(chart, params, region, args.tol)
    header = ["x1", "x2", "x3", "u1", "u2", "u3"]
    if not chart.is_sphere:
        header += ["p1", "p2"]
    rows = field_rows(chart, params, region, prof, max(args.n1, 1), max(args.n2, 1))
    _write(args.out, _csv_text(header, rows))
    return 0


def cmd_limits(args) -> int:
    a_values = sorted(args.a_values, reverse=True)
    rep = flat_limit_consistency(a_values, tuple(args.r_window))
    out = {
        "a_values": rep.a_values.tolist(),
        "sphere_deviation": rep.sphere_deviation.tolist(),
        "hyperbolic_deviation": rep.hyperbolic_deviation.tolist(),
        "sphere_vs_hyperbolic": rep.sphere_vs_hyperbolic.tolist(),
        "sphere_slope": rep.sphere_slope,
        "hyperbolic_slope": rep.hyperbolic_slope,
        "max_deviation": rep.max_deviation,
        "tool_version": tool_version(),
    }
    _write(args.out, dump_json(out))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "export-field": cmd_export_field,
    "limits": cmd_limits,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (FlowError, ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
