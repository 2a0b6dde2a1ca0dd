"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the log).
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from phaseshift import analytics as an
from phaseshift import simulator as sim
from phaseshift import verify
from phaseshift.analytics import EpsilonRange

PI = math.pi


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


def test_1_cube_law(report):
    eps_values = [float(e) for e in np.linspace(0.0, 1.0, 102)[1:-1]]
    worst = max(abs(an.deviation(PI / 3, e) - e ** 3) for e in eps_values)
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for e in eps_values:
            an.deviation(PI / 3, e)
        best = min(best, time.perf_counter() - t0)
    ok = worst <= 1e-15 and best < 1e-3
    report(1, "D(pi/3) = eps^3", ok, f"max error {worst:.2e} (tol 1e-15), 100 evals in {best * 1e3:.3f} ms (< 1 ms)")


def test_2_oracle_equivalence(report):
    t0 = time.perf_counter()
    worst = verify.oracle_equivalence_error(n=25, dim=8)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5.0
    report(2, "simulated failure vs analytic deviation, 25x25", ok,
           f"max discrepancy {worst:.2e} (tol 1e-10), {elapsed:.3f} s (< 5 s)")


TABLE4 = [(PI / 2, 5 / 3), (2 * PI / 3, 7 / 3), (3 * PI / 4, (5 + 2 * math.sqrt(2)) / 3),
          (5 * PI / 6, (5 + 2 * math.sqrt(3)) / 3), (PI, 3.0)]


def test_3_table4(report):
    exact = max(abs(an.rho(th) - want) for th, want in TABLE4)
    limit = max(abs(an.success_ratio(th, 1 - 1e-4) - want) for th, want in TABLE4)
    ok = exact <= 1e-12 and limit <= 1e-3
    report(3, "rho table", ok, f"rho error {exact:.2e} (tol 1e-12), ratio at 1-1e-4 off by {limit:.2e} (tol 1e-3)")


def test_4_thresholds(report):
    table = [(PI, 3 / 5), (2 * PI / 3, 1 / 2), (PI / 2, 1 / 3), (PI / 3, 0.0), (0.0, -1.0)]
    value_err = max(abs(an.epsilon_threshold(th) - want) for th, want in table)
    flips = []
    for th, tau in table[:3]:
        above = an.deviation_gap(th, tau - 1e-6) > 0
        below = an.deviation_gap(th, tau + 1e-6) < 0
        flips.append(above and below)
    # pi/3: threshold is 0, gap vanishes identically; the flip happens across theta
    for e in (0.2, 0.5, 0.9):
        flips.append(an.deviation_gap(PI / 3 - 1e-6, e) > 0 and an.deviation_gap(PI / 3 + 1e-6, e) < 0)
        flips.append(an.deviation_gap(PI / 3, e) == 0.0)
    # 0: threshold -1 lies outside (0, 1); the gap keeps one sign there
    flips.append(all(an.deviation_gap(0.0, e) > 0 for e in np.linspace(1e-6, 1 - 1e-6, 101)))
    ok = value_err <= 1e-15 and all(flips)
    report(4, "eps thresholds and sign flips", ok,
           f"max threshold error {value_err:.2e} (tol 1e-15), {sum(flips)}/{len(flips)} sign checks")


def test_5_average_zero_points(report):
    r1, r2 = EpsilonRange(0.0, 0.5), EpsilonRange(0.0, 0.75)
    a1, a2 = math.degrees(an.average_zero_point(r1)), math.degrees(an.average_zero_point(r2))
    k1, k2 = an.kappa(r1), an.kappa(r2)
    ok = (abs(a1 - 72.5) <= 0.5 and abs(a2 - 86.0) <= 0.5
          and abs(k1 - 0.16) <= 0.005 and abs(k2 - 0.30) <= 0.005)
    report(5, "average zero points and kappa", ok,
           f"theta1 {a1:.3f} deg vs 72.5, theta2 {a2:.3f} deg vs 86, kappa {k1:.4f} vs 0.16, {k2:.4f} vs 0.30")


def test_6_monotonicity_and_table3(report):
    thetas = np.linspace(0.0, PI, 1000)
    rise = 0.0
    ends = 0.0
    for e in (0.75, 0.9, 0.99):
        vals = [an.deviation(th, e) for th in thetas]
        rise = max(rise, max(b - a for a, b in zip(vals, vals[1:])))
        ends = max(ends, abs(vals[0] - e), abs(vals[-1] - e * (4 * e - 3) ** 2))
    samples = np.linspace(0.0, 1.0, 20)
    t3 = max(abs(an.table3_deviation(th, e) - an.deviation(th, e)) for th in an.TABLE3_FORMS for e in samples)
    ok = rise <= 1e-14 and ends <= 1e-12 and t3 <= 1e-12
    report(6, "large-eps monotonicity and closed forms", ok,
           f"largest rise {rise:.2e} (tol 1e-14), endpoint error {ends:.2e}, closed-form error {t3:.2e} (tol 1e-12)")


def test_7_recursion(report):
    t0 = time.perf_counter()
    worst = verify.recursion_consistency_error(5)
    worst_sim_cube = 0.0
    worst_rel = 0.0
    for e in verify.RECURSION_EPS:
        simulated = sim.recursion_failures(sim.crafted_instance(8, e, 0, 1), PI / 3, 5)
        trace = an.recurrence_trace(PI / 3, e, 5)
        for m in range(6):
            want = e ** (3 ** m)
            worst_sim_cube = max(worst_sim_cube, abs(simulated[m] - want))
            if m not in trace.flushed:
                worst_rel = max(worst_rel, abs(trace.epsilons[m] - want) / want)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and worst_sim_cube <= 1e-8 and worst_rel <= 1e-9 and elapsed < 10.0
    report(7, "matrix recursion vs scalar recurrence", ok,
           f"sim vs trace {worst:.2e}, sim vs eps^(3^m) {worst_sim_cube:.2e} (tol 1e-8), "
           f"trace relative {worst_rel:.2e} (tol 1e-9), {elapsed:.3f} s (< 10 s)")


def test_8_zero_deviation_certainty(report):
    fails = []
    for e in (0.1, 0.25, 0.5, 0.75):
        inst = sim.crafted_instance(8, e, 0, 1)
        fails.append(sim.measured_failure(sim.one_iteration(inst, an.zero_deviation_point(e)), 1))
    grover = [sim.measured_failure(sim.one_iteration(sim.hadamard_instance(2, k), PI), k) for k in range(4)]
    ok = max(fails) <= 1e-10 and max(grover) <= 1e-15
    report(8, "zero-deviation certainty", ok,
           f"max failure at zero points {max(fails):.2e} (tol 1e-10), N=4 Grover failure {max(grover):.2e}")


def test_9_verify_suite(report):
    modules = {m for m, _, _ in verify._CHECKS}
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "phaseshift", "verify"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    ok = (proc.returncode == 0 and "all checks passed" in proc.stdout
          and modules == {"analytics", "simulator", "harness"} and elapsed < 60.0)
    report(9, "verify suite", ok,
           f"exit {proc.returncode}, {len(verify.check_names())} checks over {sorted(modules)}, {elapsed:.2f} s (< 60 s)")
