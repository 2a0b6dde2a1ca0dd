"""Invariant and oracle-equivalence checks run by ``phaseshift verify``.

Each check returns ``(passed, detail)``; :func:`run_checks` times them and
collects :class:`CheckResult` rows. The quadrature check is the only user
of scipy.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import analytics as an
from . import harness
from . import simulator as sim


@dataclass(frozen=True)
class CheckResult:
    name: str
    module: str
    passed: bool
    detail: str
    seconds: float


_CHECKS: list[tuple[str, str, Callable[[], tuple[bool, str]]]] = []


def check(module: str, name: str):
    def deco(fn):
        _CHECKS.append((module, name, fn))
        return fn
    return deco


def _interior(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 2)[1:-1]


def _worst(label: str, value: float, tol: float) -> tuple[bool, str]:
    return value <= tol, f"{label} {value:.3e} (tol {tol:.0e})"


# -- analytics --------------------------------------------------------------

@check("analytics", "deviation bounded in [0, 1]")
def _bounds():
    bad = 0
    for th in np.linspace(0.0, math.pi, 201):
        for e in np.linspace(0.0, 1.0, 201):
            d = an.deviation(th, e)
            bad += not (0.0 <= d <= 1.0)
    return bad == 0, f"{bad} out-of-range values on 201x201 grid"


@check("analytics", "reduction identity (raw vs reduced deviation)")
def _reduction():
    rng = np.random.default_rng(20060101)
    worst = 0.0
    for _ in range(1000):
        th = rng.uniform(0.0, math.pi)
        u = math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        worst = max(worst, abs(an.deviation_raw(th, u) - an.deviation(th, 1 - abs(u) ** 2)))
    return _worst("max error", worst, 1e-12)


@check("analytics", "phase invariance of raw deviation")
def _phase_invariance():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(500):
        th = rng.uniform(0.0, math.pi)
        u = math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        phi = rng.uniform(0, 2 * math.pi)
        worst = max(worst, abs(an.deviation_raw(th, u * np.exp(1j * phi)) - an.deviation_raw(th, u)))
    return _worst("max error", worst, 1e-12)


@check("analytics", "factored gap equals D - eps^3")
def _gap_consistency():
    worst = 0.0
    for th in np.linspace(0.0, math.pi, 200):
        for e in np.linspace(0.0, 1.0, 200):
            worst = max(worst, abs(an.deviation_gap(th, e) - (an.deviation(th, e) - e ** 3)))
    return _worst("max error", worst, 1e-12)


@check("analytics", "gap positive for theta < pi/3")
def _lemma1():
    bad = sum(an.deviation_gap(th, e) <= 0.0
              for th in np.linspace(0.0, an.PI_3, 200, endpoint=False)
              for e in _interior(200))
    return bad == 0, f"{bad} nonpositive gaps"


@check("analytics", "gap negative exactly above the threshold for theta > pi/3")
def _lemma2():
    bad = 0
    for th in np.linspace(0.0, math.pi, 200):
        if abs(th - an.PI_3) < 1e-9:
            continue
        tau = an.epsilon_threshold(th)
        for e in _interior(200):
            if abs(e - tau) < 1e-9:
                continue
            below = an.deviation_gap(th, e) < 0.0
            bad += below != (th > an.PI_3 and e > tau)
    return bad == 0, f"{bad} sign mismatches"


@check("analytics", "threshold monotone with exact endpoints")
def _threshold():
    vals = [an.epsilon_threshold(th) for th in np.linspace(0.0, math.pi, 10001)]
    mono = all(b >= a for a, b in zip(vals, vals[1:]))
    ends = abs(vals[0] + 1.0) <= 1e-15 and abs(vals[-1] - 0.6) <= 1e-15
    return mono and ends, f"monotone={mono}, endpoints={vals[0]!r}, {vals[-1]!r}"


@check("analytics", "zero deviation points vanish")
def _zero_points():
    grid = np.linspace(0.0, 0.75, 301)[1:]
    worst = max(an.deviation(an.zero_deviation_point(e), e) for e in grid)
    inside = all(an.PI_3 < an.zero_deviation_point(e) <= math.pi for e in grid)
    ok, detail = _worst("max deviation", worst, 1e-12)
    return ok and inside, detail + f", in (pi/3, pi]={inside}"


QUAD_RANGES = ((0.0, 0.5), (0.0, 0.75), (0.1, 0.3), (0.5, 0.75), (0.2, 0.2001), (0.0, 1e-4))


@check("analytics", "average zero point matches quadrature")
def _quadrature():
    worst = 0.0
    for beta, alpha in QUAD_RANGES:
        rng = an.EpsilonRange(beta, alpha)
        integral, _ = integrate.quad(lambda e: 1.0 - 1.0 / (2.0 * (1.0 - e)), beta, alpha,
                                     epsabs=1e-14, epsrel=1e-13)
        mean = integral / (alpha - beta)
        worst = max(worst, abs(math.cos(an.average_zero_point(rng)) - mean))
    return _worst("max error", worst, 1e-9)


@check("analytics", "average zero point beats eps^3 above kappa")
def _kappa():
    bad = 0
    for beta, alpha in QUAD_RANGES:
        rng = an.EpsilonRange(beta, alpha)
        k = an.kappa(rng)
        if not 0.0 < k < 1.0:
            return False, f"kappa {k!r} outside (0, 1) for {rng}"
        for e in np.linspace(k + 1e-6, 1.0, 400, endpoint=False):
            bad += not an.average_zero_point_deviation(e, rng) < e ** 3
    return bad == 0, f"{bad} violations"


@check("analytics", "deviation nonincreasing in theta for eps >= 3/4")
def _monotone():
    thetas = np.linspace(0.0, math.pi, 1000)
    worst_rise = 0.0
    worst_end = 0.0
    for e in harness.FIGURE_EPS_LARGE:
        vals = [an.deviation(th, e) for th in thetas]
        worst_rise = max(worst_rise, max(b - a for a, b in zip(vals, vals[1:])))
        worst_end = max(worst_end, abs(vals[0] - e), abs(vals[-1] - e * (4 * e - 3) ** 2))
    ok = worst_rise <= 1e-14 and worst_end <= 1e-12
    return ok, f"largest rise {worst_rise:.3e}, endpoint error {worst_end:.3e}"


@check("analytics", "large-eps lower bound")
def _lower_bound():
    bad = 0
    for e in np.linspace(0.75, 1.0, 51):
        floor = an.min_deviation_large_eps(e)
        bad += sum(an.deviation(th, e) < floor - 1e-12 for th in np.linspace(0.0, math.pi, 361))
    return bad == 0, f"{bad} points below the bound"


@check("analytics", "closed forms at pi/2, 2pi/3, 3pi/4, 5pi/6")
def _table3_identities():
    worst = max(abs(an.table3_deviation(th, e) - an.deviation(th, e))
                for th in an.TABLE3_FORMS for e in np.linspace(0.0, 1.0, 101))
    return _worst("max error", worst, 1e-12)


@check("analytics", "eps^3 is o(D) away from pi/3")
def _small_eps():
    e = 1e-3
    worst = 0.0
    for th in np.linspace(0.0, math.pi, 181):
        if abs(2 * math.cos(th) - 1) > 0.1:
            worst = max(worst, e ** 3 / an.deviation(th, e))
    return worst < 1e-3, f"largest ratio {worst:.3e} (tol 1e-03)"


@check("analytics", "success ratio tends to rho")
def _rho_limit():
    worst = max(abs(an.success_ratio(th, 1 - 1e-4) - an.rho(th)) for th in np.linspace(0.0, math.pi, 181))
    ends = abs(an.rho(0.0) - 1 / 3) <= 1e-15 and abs(an.rho(math.pi) - 3.0) <= 1e-15
    ok, detail = _worst("max gap", worst, 1e-3)
    return ok and ends, detail


@check("analytics", "rational ratio equals probability quotient")
def _ratio_quotient():
    worst = 0.0
    for th in np.linspace(0.0, math.pi, 61):
        for e in np.linspace(0.01, 0.99, 99):
            q = an.success_probability(th, e) / an.success_probability(an.PI_3, e)
            worst = max(worst, abs(an.success_ratio(th, e) - q))
    return _worst("max error", worst, 1e-12)


@check("analytics", "pi/3 recursion equals eps^(3^m)")
def _recursion_closed_form():
    worst = 0.0
    for e0 in (0.1, 0.3, 0.5, 0.75, 0.9, 0.99):
        trace = an.recurrence_trace(an.PI_3, e0, 5)
        for m, e in enumerate(trace.epsilons):
            want = e0 ** (3 ** m)
            if want == 0.0 or m in trace.flushed:
                continue
            worst = max(worst, abs(e - want) / want)
    return _worst("max relative error", worst, 1e-9)


# -- simulator --------------------------------------------------------------

def _crafted(eps: float) -> sim.SearchInstance:
    return sim.crafted_instance(8, eps, 0, 1)


@check("simulator", "unitarity and norm preservation")
def _unitarity():
    worst_u = 0.0
    worst_n = 0.0
    instances = [sim.hadamard_instance(n, (1 << n) - 1) for n in range(1, 7)]
    instances += [_crafted(e) for e in np.linspace(0.0, 1.0, 21)]
    for inst in instances:
        worst_u = max(worst_u, sim.unitarity_error(inst.unitary))
        for th in (0.0, an.PI_3, math.pi / 2, math.pi):
            worst_n = max(worst_n, abs(np.linalg.norm(sim.one_iteration(inst, th)) - 1.0))
    for e in (0.3, 0.9):
        for u in sim.recursion_levels(_crafted(e), 5 * math.pi / 6, 6):
            worst_u = max(worst_u, sim.unitarity_error(u))
    ok = worst_u <= 1e-8 and worst_n <= 1e-10
    return ok, f"max |U^+U - I| {worst_u:.3e}, max norm drift {worst_n:.3e}"


def oracle_equivalence_error(n: int = 25, dim: int = 8) -> float:
    worst = 0.0
    for e in np.linspace(0.02, 0.98, n):
        inst = sim.crafted_instance(dim, e, 0, 1)
        for th in np.linspace(0.0, math.pi, n):
            got = sim.measured_failure(sim.one_iteration(inst, th), inst.t_index)
            worst = max(worst, abs(got - an.deviation(th, e)))
    return worst


@check("simulator", "simulated failure equals analytic deviation (25x25)")
def _oracle():
    return _worst("max discrepancy", oracle_equivalence_error(), 1e-10)


@check("simulator", "final state decomposes as predicted")
def _decomposition():
    worst = 0.0
    insts = [_crafted(e) for e in np.linspace(0.02, 0.98, 13)]
    insts += [sim.hadamard_instance(n, 1) for n in (1, 2, 3, 5)]
    for inst in insts:
        for th in np.linspace(0.0, math.pi, 13):
            diff = sim.one_iteration(inst, th) - sim.predicted_final_state(inst, th)
            worst = max(worst, float(np.max(np.abs(diff))))
    return _worst("max component error", worst, 1e-10)


RECURSION_THETAS = (an.PI_3, math.pi / 2, 5 * math.pi / 6)
RECURSION_EPS = (0.3, 0.75, 0.9)


def recursion_consistency_error(depth: int) -> float:
    worst = 0.0
    for th in RECURSION_THETAS:
        for e in RECURSION_EPS:
            simulated = sim.recursion_failures(_crafted(e), th, depth)
            analytic = an.recurrence_trace(th, e, depth).epsilons
            worst = max(worst, max(abs(a - b) for a, b in zip(simulated, analytic)))
    return worst


@check("simulator", "matrix recursion matches scalar recurrence (m <= 6)")
def _recursion():
    return _worst("max discrepancy", recursion_consistency_error(6), 1e-8)


@check("simulator", "theta = pi is textbook amplitude amplification")
def _theta_pi():
    worst = 0.0
    insts = [_crafted(e) for e in (0.1, 0.5, 0.9)] + [sim.hadamard_instance(3, 6)]
    for inst in insts:
        op = sim.iteration_operator(inst.unitary, inst.s_index, inst.t_index, math.pi)
        worst = max(worst, float(np.max(np.abs(op - sim.amplification_operator(inst)))))
    return _worst("max entry difference", worst, 1e-12)


# -- harness ----------------------------------------------------------------

@check("harness", "sweeps are byte-identical across runs and thread counts")
def _determinism():
    spec = harness.SweepSpec(harness.default_theta_grid(37), [k / 20 for k in range(1, 20)],
                             ("deviation", "gap", "ratio"), cross_check_dim=8)
    outs = {harness.records_to_csv(harness.run_sweep(spec, threads=t)) for t in (1, 1, 4)}
    outs_json = {harness.records_to_json(harness.run_sweep(spec, threads=t)) for t in (1, 3)}
    ok = len(outs) == 1 and len(outs_json) == 1
    return ok, f"{len(outs)} distinct CSV outputs, {len(outs_json)} distinct JSON outputs"


@check("harness", "cross-checked sweep discrepancies")
def _cross_checked():
    spec = harness.SweepSpec(harness.default_theta_grid(31), [float(x) for x in np.linspace(0.02, 0.98, 25)],
                             ("deviation",), cross_check_dim=8)
    worst = max(r.abs_discrepancy for r in harness.run_sweep(spec))
    return _worst("max discrepancy", worst, 1e-10)


@check("harness", "tables reproduce")
def _tables():
    report = harness.reproduce_tables()
    failed = [k for k, t in report["tables"].items() if not t["pass"]]
    return report["all_pass"], "all tables pass" if not failed else f"failed: {failed}"


def check_names() -> list[str]:
    return [name for _, name, _ in _CHECKS]


def run_checks(modules: set[str] | None = None) -> list[CheckResult]:
    results = []
    for module, name, fn in _CHECKS:
        if modules and module not in modules:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, module, bool(passed), detail, time.perf_counter() - t0))
    return results
