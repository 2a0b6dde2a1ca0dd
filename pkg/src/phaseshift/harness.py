"""Parameter sweeps, table reproduction and figure curve data."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analytics as an
from . import simulator as sim

QUANTITIES: dict[str, Callable[[float, float], float]] = {
    "deviation": an.deviation,
    "gap": an.deviation_gap,
    "threshold": lambda theta, eps: an.epsilon_threshold(theta),
    "success": an.success_probability,
    "ratio": an.success_ratio,
    "rho": lambda theta, eps: an.rho(theta),
}

THREADS_ENV = "PHASESHIFT_THREADS"


def default_theta_grid(n: int = 181) -> list[float]:
    return [float(x) for x in np.linspace(0.0, math.pi, n)]


def default_eps_grid() -> list[float]:
    return [k / 100 for k in range(1, 100)]


def _check_grid(name: str, grid: Sequence[float], lo: float, hi: float) -> tuple[float, ...]:
    grid = tuple(float(x) for x in grid)
    if not grid:
        raise ValueError(f"{name} is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    if grid[0] < lo or grid[-1] > hi:
        raise an.DomainError(f"{name} must lie within [{lo!r}, {hi!r}]",
                             f"{name} within [{lo!r}, {hi!r}]")
    return grid


@dataclass(frozen=True)
class SweepSpec:
    """Grid and quantity selection for :func:`run_sweep`.

    ``cross_check_dim`` switches on the simulator column: each eps gets a
    crafted instance of that dimension and every point is compared.
    """

    theta_grid: tuple[float, ...]
    eps_grid: tuple[float, ...]
    quantities: tuple[str, ...] = ("deviation",)
    cross_check_dim: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", _check_grid("theta_grid", self.theta_grid, 0.0, math.pi))
        object.__setattr__(self, "eps_grid", _check_grid("eps_grid", self.eps_grid, 0.0, 1.0))
        quantities = tuple(self.quantities)
        unknown = [q for q in quantities if q not in QUANTITIES]
        if unknown:
            raise ValueError(f"unknown quantities {unknown}; choose from {sorted(QUANTITIES)}")
        if not quantities and self.cross_check_dim is None:
            raise ValueError("nothing to compute")
        object.__setattr__(self, "quantities", quantities)
        if self.cross_check_dim is not None and not 2 <= self.cross_check_dim <= sim.MAX_RECURSION_DIM:
            raise an.DomainError(f"cross-check dim {self.cross_check_dim} outside 2..{sim.MAX_RECURSION_DIM}",
                                 f"2 <= dim <= {sim.MAX_RECURSION_DIM}")

    @property
    def cross_checked(self) -> bool:
        return self.cross_check_dim is not None

    @property
    def columns(self) -> list[str]:
        cols = ["theta_rad", "eps", *self.quantities]
        if self.cross_checked:
            cols += ["sim_deviation", "abs_discrepancy"]
        return cols

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        """Build from a JSON-style mapping.

        Grids are either explicit lists or ``{"start", "stop", "num"}``
        linspace descriptors; ``mode`` is ``"analytic"`` or ``{"cross_checked": dim}``.
        """
        def grid(value, default):
            if value is None:
                return default
            if isinstance(value, dict):
                return [float(x) for x in np.linspace(value["start"], value["stop"], int(value["num"]))]
            return list(value)

        mode = d.get("mode", "analytic")
        dim = None
        if isinstance(mode, dict):
            dim = int(mode["cross_checked"])
        elif mode != "analytic":
            raise ValueError(f"unknown mode {mode!r}")
        return cls(
            theta_grid=grid(d.get("theta_grid"), default_theta_grid()),
            eps_grid=grid(d.get("eps_grid"), default_eps_grid()),
            quantities=tuple(d.get("quantities", ("deviation",))),
            cross_check_dim=dim,
        )


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    eps: float
    values: dict[str, float] = field(default_factory=dict)
    sim_deviation: float | None = None
    abs_discrepancy: float | None = None

    def row(self) -> dict[str, float]:
        out = {"theta_rad": self.theta, "eps": self.eps, **self.values}
        if self.sim_deviation is not None:
            out["sim_deviation"] = self.sim_deviation
            out["abs_discrepancy"] = self.abs_discrepancy
        return out


def _thread_count(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        threads = int(raw) if raw else 0
    if threads <= 0:
        threads = min(8, os.cpu_count() or 1)
    return threads


def _theta_row(spec: SweepSpec, theta: float, instances) -> list[SweepRecord]:
    records = []
    for j, eps in enumerate(spec.eps_grid):
        try:
            values = {q: QUANTITIES[q](theta, eps) for q in spec.quantities}
            sim_dev = disc = None
            if instances is not None:
                inst = instances[j]
                sim_dev = sim.measured_failure(sim.one_iteration(inst, theta), inst.t_index)
                disc = abs(an.deviation(theta, eps) - sim_dev)
        except an.DomainError as exc:
            raise an.DomainError(f"at grid point theta={theta!r}, eps={eps!r}: {exc}", exc.rule) from exc
        records.append(SweepRecord(theta, eps, values, sim_dev, disc))
    return records


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRecord]:
    """One record per (theta, eps) pair, theta-major.

    Rows are computed on a thread pool; output order never depends on it.
    """
    instances = None
    if spec.cross_checked:
        instances = [sim.crafted_instance(spec.cross_check_dim, eps, 0, 1) for eps in spec.eps_grid]
    n = _thread_count(threads)
    if n == 1 or len(spec.theta_grid) == 1:
        rows = [_theta_row(spec, th, instances) for th in spec.theta_grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(lambda th: _theta_row(spec, th, instances), spec.theta_grid))
    return [rec for row in rows for rec in row]


# -- serialisation ----------------------------------------------------------

def _columns_of(records: Sequence[SweepRecord]) -> list[str]:
    return list(records[0].row()) if records else ["theta_rad", "eps"]


def format_number(x: float) -> str:
    """Shortest string that round-trips to the same double."""
    return repr(float(x))


def records_to_csv(records: Sequence[SweepRecord], columns: Sequence[str] | None = None) -> str:
    columns = list(columns or _columns_of(records))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = rec.row()
        writer.writerow([format_number(row[c]) for c in columns])
    return buf.getvalue()


def records_to_json(records: Sequence[SweepRecord]) -> str:
    return json.dumps([rec.row() for rec in records], indent=None, allow_nan=False)


# -- tables -----------------------------------------------------------------

TABLE4_EXPECTED = {
    "pi/2": (math.pi / 2, 5 / 3),
    "2pi/3": (2 * math.pi / 3, 7 / 3),
    "3pi/4": (3 * math.pi / 4, (5 + 2 * math.sqrt(2)) / 3),
    "5pi/6": (5 * math.pi / 6, (5 + 2 * math.sqrt(3)) / 3),
    "pi": (math.pi, 3.0),
}

TABLE2_EXPECTED = {
    "pi": (math.pi, 3 / 5),
    "2pi/3": (2 * math.pi / 3, 1 / 2),
    "pi/2": (math.pi / 2, 1 / 3),
}

TABLE3_LABELS = {"pi/2": math.pi / 2, "2pi/3": 2 * math.pi / 3,
                 "3pi/4": 3 * math.pi / 4, "5pi/6": 5 * math.pi / 6}


def _table1() -> dict:
    """Classification regimes checked on a grid away from the boundaries."""
    thetas = np.linspace(0.0, math.pi, 61)
    epss = np.linspace(0.01, 0.99, 99)
    counts = {"below_above_threshold": 0, "above_small_theta": 0, "above_below_threshold": 0}
    mismatches = 0
    for th in thetas:
        for e in epss:
            if abs(th - an.PI_3) < 1e-9:
                continue
            tau = an.epsilon_threshold(th)
            if abs(e - tau) < 1e-9:
                continue
            got = an.classify(th, e)
            if th < an.PI_3:
                want, key = an.Classification.ABOVE_CUBE, "above_small_theta"
            elif e > tau:
                want, key = an.Classification.BELOW_CUBE, "below_above_threshold"
            else:
                want, key = an.Classification.ABOVE_CUBE, "above_below_threshold"
            counts[key] += 1
            mismatches += got is not want
    rows = [
        {"theta": "> pi/3", "relation": "D < eps^3", "eps": "> 1 - 2/(3 - 2cos theta)",
         "points": counts["below_above_threshold"]},
        {"theta": "< pi/3", "relation": "D > eps^3", "eps": "any",
         "points": counts["above_small_theta"]},
        {"theta": "> pi/3", "relation": "D > eps^3", "eps": "< 1 - 2/(3 - 2cos theta)",
         "points": counts["above_below_threshold"]},
    ]
    return {"title": "Phase shifts and the sign of D - eps^3", "rows": rows,
            "mismatches": mismatches, "pass": mismatches == 0}


def _table2(delta: float = 0.2) -> dict:
    rows = []
    ok = True
    for label, (alpha, want) in TABLE2_EXPECTED.items():
        got = an.epsilon_threshold(alpha)
        passed = abs(got - want) <= 1e-15
        ok &= passed
        rows.append({"theta_range": f"(pi/3, {label}]", "threshold": got,
                     "expected": want, "pass": passed})
    bound = an.phase_bound_for_delta(delta)
    got = an.epsilon_threshold(bound)
    passed = abs(got - delta) <= 1e-12
    ok &= passed
    rows.append({"theta_range": f"(pi/3, arccos((1-3d)/(2(1-d)))], d={delta!r}",
                 "theta_bound": bound, "threshold": got, "expected": delta, "pass": passed})
    return {"title": "Phase ranges with D < eps^3 above a threshold", "rows": rows, "pass": ok}


def _table3(n_samples: int = 20) -> dict:
    samples = [0.75 + 0.25 * (k + 1) / n_samples for k in range(n_samples)]
    rows = []
    ok = True
    for label, theta in TABLE3_LABELS.items():
        worst = max(abs(an.table3_deviation(theta, e) - an.deviation(theta, e)) for e in samples)
        passed = worst < 1e-12
        ok &= passed
        rows.append({"theta": label, "max_abs_error": worst, "samples": n_samples, "pass": passed})
    return {"title": "Closed-form deviations for eps > 3/4", "rows": rows, "pass": ok}


def _table4() -> dict:
    rows = []
    ok = True
    for label, (theta, want) in TABLE4_EXPECTED.items():
        got = an.rho(theta)
        passed = abs(got - want) <= 1e-12
        ok &= passed
        rows.append({"theta": label, "rho": got, "expected": want, "pass": passed})
    return {"title": "Large-eps success ratio rho", "rows": rows, "pass": ok}


def reproduce_tables() -> dict:
    """Recompute the four tables; each carries a ``pass`` flag."""
    tables = {"table1": _table1(), "table2": _table2(), "table3": _table3(), "table4": _table4()}
    return {"tables": tables, "all_pass": all(t["pass"] for t in tables.values())}


def tables_to_text(report: dict) -> str:
    lines = []
    for name, table in report["tables"].items():
        lines.append(f"{name}: {table['title']}  [{'PASS' if table['pass'] else 'FAIL'}]")
        for row in table["rows"]:
            cells = ", ".join(f"{k}={v:.15g}" if isinstance(v, float) else f"{k}={v}"
                              for k, v in row.items())
            lines.append(f"  {cells}")
    lines.append("all tables pass" if report["all_pass"] else "SOME TABLES FAILED")
    return "\n".join(lines) + "\n"


# -- figure data ------------------------------------------------------------

FIGURE_EPS_LARGE = (0.75, 0.8, 0.9, 0.99)

FIGURES = {
    "dev_vs_theta": "deviation over 181 theta points in [0, pi] for eps in {0.75, 0.8, 0.9, 0.99}",
    "gap_surface": "D - eps^3 over 181 theta points in [0, pi] x 99 eps points 0.01..0.99",
    "zero_locus": "zero deviation point for eps = 0.01..0.75 step 0.01 (theta column holds the point)",
    "rho_curve": "rho and the rational ratio at eps = 1 over 181 theta points in [0, pi]",
}


def figure_data(figure_id: str) -> list[SweepRecord]:
    if figure_id == "dev_vs_theta":
        return run_sweep(SweepSpec(default_theta_grid(), FIGURE_EPS_LARGE, ("deviation",)))
    if figure_id == "gap_surface":
        return run_sweep(SweepSpec(default_theta_grid(), default_eps_grid(), ("deviation", "gap")))
    if figure_id == "zero_locus":
        out = []
        for k in range(1, 76):
            eps = k / 100
            theta = an.zero_deviation_point(eps)
            out.append(SweepRecord(theta, eps, {"deviation": an.deviation(theta, eps)}))
        return out
    if figure_id == "rho_curve":
        return run_sweep(SweepSpec(default_theta_grid(), (1.0,), ("rho", "ratio")))
    raise ValueError(f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}")


def iter_curve(records: Iterable[SweepRecord], eps: float, quantity: str) -> list[tuple[float, float]]:
    """``(theta, value)`` pairs for one eps slice of a sweep."""
    return [(r.theta, r.values[quantity]) for r in records if r.eps == eps]
