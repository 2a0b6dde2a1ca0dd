"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 verification failure.
Angles are radians unless suffixed with ``deg``; ``pi`` expressions such as
``pi/3`` or ``5pi/6`` are also accepted.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from . import analytics as an
from . import harness
from . import simulator as sim
from . import verify

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4


class _Usage(Exception):
    pass


_PI_EXPR = re.compile(r"^(?P<num>\d*\.?\d*)\*?pi(?:/(?P<den>\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    s = text.strip().lower()
    if s.endswith("deg"):
        return math.radians(float(s[:-3]))
    m = _PI_EXPR.match(s)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        return num * math.pi / den
    return float(s)


def parse_range(text: str) -> an.EpsilonRange:
    try:
        beta, alpha = (float(x) for x in text.split(":"))
    except ValueError:
        raise _Usage(f"range must be beta:alpha, got {text!r}") from None
    return an.EpsilonRange(beta, alpha)


def parse_grid(text: str) -> list[float]:
    """``start:stop:num`` (linspace, angles allowed) or a comma list."""
    if text.count(":") == 2:
        start, stop, num = text.split(":")
        n = int(num)
        a, b = parse_angle(start), parse_angle(stop)
        if n == 1:
            return [a]
        return [a + (b - a) * k / (n - 1) for k in range(n - 1)] + [b]
    return [parse_angle(x) for x in text.split(",") if x.strip()]


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _grid(text: str) -> list[float]:
    try:
        return parse_grid(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a grid: {text!r}") from None


class _Printer:
    def __init__(self, args, stream):
        self.fmt = args.format
        self.digits = args.digits
        self.stream = stream

    def num(self, x: float) -> str:
        if self.digits is None:
            return harness.format_number(x)
        return f"{x:.{self.digits}g}"

    def scalar(self, name: str, value) -> None:
        self.fields({name: value}, single=True)

    def fields(self, data: dict, single: bool = False) -> None:
        if self.fmt == "json":
            self.stream.write(json.dumps(data) + "\n")
        elif self.fmt == "csv":
            self.stream.write(",".join(data) + "\n")
            self.stream.write(",".join(self._cell(v) for v in data.values()) + "\n")
        elif single:
            self.stream.write(self._cell(next(iter(data.values()))) + "\n")
        else:
            for k, v in data.items():
                self.stream.write(f"{k}: {self._cell(v)}\n")

    def _cell(self, v) -> str:
        if isinstance(v, float):
            return self.num(v)
        if isinstance(v, (list, tuple)):
            return " ".join(self._cell(x) for x in v)
        return str(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--output", "-o", type=Path, help="write to this file instead of stdout")
    common.add_argument("--digits", type=int, default=None,
                        help="significant digits (default: shortest round-trip)")

    p = argparse.ArgumentParser(prog="phaseshift", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    for name, help_ in (("deviation", "failure probability after one iteration"),
                        ("gap", "D(theta) - eps^3 (factored form)"),
                        ("classify", "sign of D(theta) - eps^3"),
                        ("ratio", "success probability relative to the pi/3 iteration")):
        sp = cmd(name, help_)
        sp.add_argument("--theta", type=_angle, required=True)
        sp.add_argument("--eps", type=float, required=True)

    for name, help_ in (("threshold", "eps threshold above which D < eps^3"),
                        ("rho", "large-eps success ratio (5 - 4 cos theta)/3")):
        cmd(name, help_).add_argument("--theta", type=_angle, required=True)

    sp = cmd("zero-point", "phase giving zero deviation for a known eps")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--degrees", action="store_true", help="report the angle in degrees")

    for name, help_ in (("avg-zero-point", "average zero deviation point over a uniform eps range"),
                        ("kappa", "eps above which the average zero point beats eps^3")):
        sp = cmd(name, help_)
        sp.add_argument("--range", dest="eps_range", required=True, help="beta:alpha")
        if name == "avg-zero-point":
            sp.add_argument("--degrees", action="store_true")

    sp = cmd("recurse", "failure probabilities of the nested recursion")
    sp.add_argument("--theta", type=_angle, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--dim", type=int, default=None, help="also simulate with a crafted instance of this size")

    sp = cmd("simulate", "run one iteration on an explicit instance")
    sp.add_argument("--theta", type=_angle, required=True)
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--hadamard", type=int, metavar="N_QUBITS", default=None,
                    help="use H^n with s=0 instead of a crafted instance")
    sp.add_argument("--target", type=int, default=None, help="target index (default: last / 1)")

    sp = cmd("sweep", "parameter sweep over (theta, eps)")
    sp.add_argument("--spec", type=Path, help="JSON sweep spec ('-' for stdin)")
    sp.add_argument("--thetas", type=_grid, help="start:stop:num or comma list")
    sp.add_argument("--eps-grid", type=_grid, help="start:stop:num or comma list")
    sp.add_argument("--quantities", default=None, help="comma list of " + ",".join(harness.QUANTITIES))
    sp.add_argument("--cross-check", type=int, metavar="DIM", default=None)
    sp.add_argument("--threads", type=int, default=None)

    cmd("tables", "recompute the four tables with pass/fail flags")

    sp = cmd("figures", "curve data behind the figures")
    sp.add_argument("--id", dest="figure_id", required=True, choices=sorted(harness.FIGURES))

    cmd("verify", "run every invariant and oracle check")
    return p


def _run(args, out) -> int:
    pr = _Printer(args, out)
    c = args.command
    if c == "deviation":
        pr.scalar("deviation", an.deviation(args.theta, args.eps))
    elif c == "gap":
        pr.scalar("gap", an.deviation_gap(args.theta, args.eps))
    elif c == "classify":
        pr.scalar("classification", an.classify(args.theta, args.eps).value)
    elif c == "ratio":
        pr.scalar("ratio", an.success_ratio(args.theta, args.eps))
    elif c == "threshold":
        pr.scalar("threshold", an.epsilon_threshold(args.theta))
    elif c == "rho":
        pr.scalar("rho", an.rho(args.theta))
    elif c == "zero-point":
        theta = an.zero_deviation_point(args.eps)
        pr.scalar("theta", math.degrees(theta) if args.degrees else theta)
    elif c == "avg-zero-point":
        theta = an.average_zero_point(parse_range(args.eps_range))
        pr.scalar("theta", math.degrees(theta) if args.degrees else theta)
    elif c == "kappa":
        pr.scalar("kappa", an.kappa(parse_range(args.eps_range)))
    elif c == "recurse":
        trace = an.recurrence_trace(args.theta, args.eps, args.depth)
        data = {"theta_rad": trace.theta, "epsilons": list(trace.epsilons),
                "flushed": list(trace.flushed)}
        if args.dim is not None:
            inst = sim.crafted_instance(args.dim, args.eps, 0, 1)
            data["simulated"] = sim.recursion_failures(inst, args.theta, args.depth)
        if args.format == "csv":
            _recurse_csv(pr, data)
        else:
            pr.fields(data)
    elif c == "simulate":
        _simulate(args, pr)
    elif c == "sweep":
        spec = _sweep_spec(args)
        records = harness.run_sweep(spec, threads=args.threads)
        _emit_records(args, out, records)
    elif c == "tables":
        report = harness.reproduce_tables()
        if args.format == "json":
            out.write(json.dumps(report, indent=2) + "\n")
        else:
            out.write(harness.tables_to_text(report))
        return EXIT_OK if report["all_pass"] else EXIT_VERIFY
    elif c == "figures":
        records = harness.figure_data(args.figure_id)
        if args.format == "json":
            out.write(json.dumps({"figure": args.figure_id, "grid": harness.FIGURES[args.figure_id],
                                  "records": [r.row() for r in records]}) + "\n")
        elif args.format == "csv":
            out.write(harness.records_to_csv(records))
        else:
            out.write(f"# {args.figure_id}: {harness.FIGURES[args.figure_id]}\n")
            out.write(harness.records_to_csv(records))
    elif c == "verify":
        return _verify(args, out)
    return EXIT_OK


def _recurse_csv(pr: _Printer, data: dict) -> None:
    cols = ["m", "eps"] + (["simulated"] if "simulated" in data else [])
    pr.stream.write(",".join(cols) + "\n")
    for m, e in enumerate(data["epsilons"]):
        row = [str(m), pr.num(e)]
        if "simulated" in data:
            row.append(pr.num(data["simulated"][m]))
        pr.stream.write(",".join(row) + "\n")


def _simulate(args, pr: _Printer) -> None:
    if args.hadamard is not None:
        n = 1 << args.hadamard
        target = n - 1 if args.target is None else args.target
        inst = sim.hadamard_instance(args.hadamard, target)
    else:
        if args.eps is None:
            raise _Usage("simulate needs --eps unless --hadamard is given")
        target = 1 if args.target is None else args.target
        inst = sim.crafted_instance(args.dim, args.eps, 0, target)
    state = sim.one_iteration(inst, args.theta)
    simulated = sim.measured_failure(state, inst.t_index)
    analytic = an.deviation(args.theta, inst.eps)
    pr.fields({"dim": inst.dim, "eps": inst.eps, "theta_rad": float(args.theta),
               "analytic_deviation": analytic, "sim_deviation": simulated,
               "abs_discrepancy": abs(analytic - simulated)})


def _sweep_spec(args) -> harness.SweepSpec:
    base: dict = {}
    if args.spec is not None:
        text = sys.stdin.read() if str(args.spec) == "-" else args.spec.read_text()
        try:
            base = json.loads(text)
        except json.JSONDecodeError as exc:
            raise _Usage(f"bad spec JSON: {exc}") from None
    if args.thetas is not None:
        base["theta_grid"] = args.thetas
    if args.eps_grid is not None:
        base["eps_grid"] = args.eps_grid
    if args.quantities is not None:
        base["quantities"] = [q.strip() for q in args.quantities.split(",") if q.strip()]
    if args.cross_check is not None:
        base["mode"] = {"cross_checked": args.cross_check}
    try:
        return harness.SweepSpec.from_dict(base)
    except an.DomainError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise _Usage(f"bad sweep spec: {exc}") from None


def _emit_records(args, out, records) -> None:
    if args.format == "json":
        out.write(harness.records_to_json(records) + "\n")
    else:
        out.write(harness.records_to_csv(records))


def _verify(args, out) -> int:
    results = verify.run_checks()
    ok = all(r.passed for r in results)
    if args.format == "json":
        out.write(json.dumps({"all_pass": ok, "checks": [r.__dict__ for r in results]}, indent=2) + "\n")
    else:
        for r in results:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  [{r.module}] {r.name}: {r.detail} ({r.seconds:.2f}s)\n")
        n_fail = sum(not r.passed for r in results)
        out.write("all checks passed\n" if ok else f"{n_fail} of {len(results)} checks FAILED\n")
    return EXIT_OK if ok else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = open(args.output, "w", encoding="utf-8", newline="\n") if args.output else sys.stdout
    try:
        return _run(args, out)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"phaseshift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except an.DomainError as exc:
        print(f"phaseshift: domain error: {exc} (requires {exc.rule})", file=sys.stderr)
        return EXIT_DOMAIN
    except IndexError as exc:
        print(f"phaseshift: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    finally:
        if args.output:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
