"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (also collected into the
terminal summary).  The checks come from :mod:`lightcone.verify` in strict
mode, so nothing known to be out of reach on a finite grid is softened here.
"""

import json
import subprocess
import sys
import time
import warnings

import pytest

from lightcone import verify

from conftest import ACCEPTANCE_LINES


def _judge(label, checks, elapsed=None, budget=None):
    decisive = [c for c in checks if not c.informational]
    bad = [c for c in decisive if not c.passed]
    slow = budget is not None and elapsed > budget
    ok = not bad and not slow
    timing = "" if elapsed is None else f" ({elapsed:.1f} s" + (f", budget {budget:.0f} s)" if budget else ")")
    detail = ""
    if bad:
        worst = bad[0]
        detail = f"; {len(bad)}/{len(decisive)} checks failed, first: {worst.group}: {worst.name} = {worst.value:.3e} (tol {worst.tolerance})"
    if slow:
        detail += "; over the time budget"
    line = f"{'PASS' if ok else 'FAIL'} {label}{timing}{detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, bad


def _run(fn, **kw):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        checks = fn(strict=True, **kw)
    return checks, time.perf_counter() - t0


def _assert(label, checks, elapsed=None, budget=None):
    ok, bad = _judge(label, checks, elapsed, budget)
    assert ok, "\n".join(f"{c.group}: {c.name} = {c.value!r} (tol {c.tolerance!r}) {c.note}" for c in bad)


def test_01_isometry():
    checks, dt = _run(verify.check_isometry)
    _assert("1 cone transform isometry", checks, dt, 10)


def test_02_parity():
    checks, dt = _run(verify.check_parity)
    _assert("2 range parity", checks, dt)


def test_03_bijection():
    checks, dt = _run(verify.check_bijection)
    _assert("3 radiation map bijection", checks, dt, 10)


def test_04_exterior_identity():
    checks, dt = _run(verify.check_exterior_identity)
    _assert("4 exterior energy identity", checks, dt, 30)


def test_05_finite_speed():
    checks, dt = _run(verify.check_finite_speed)
    _assert("5 finite speed", checks, dt)


def test_06_plr():
    checks, dt = _run(verify.check_plr)
    _assert("6 PLR basis consistency", checks, dt)


def test_07_projection():
    checks, dt = _run(verify.check_projection, count=50, seed=0)
    _assert("7 projection properties (50 states)", checks, dt)


def test_08_source_solve():
    checks, dt = _run(verify.check_source_solve, count=5, seed=0)
    _assert("8 non-radiative source solve (5 sources)", checks, dt, 120)


def test_09_phi():
    checks, dt = _run(verify.check_phi)
    _assert("9 nonlinear map on small data", checks, dt, 300)


def test_10_wave_operator():
    checks, dt = _run(verify.check_wave_operator)
    _assert("10 wave operator", checks, dt, 300)


def test_11_determinism(tmp_path):
    reports = []
    t0 = time.perf_counter()
    for k in range(2):
        out = tmp_path / f"run{k}"
        r = subprocess.run(
            [sys.executable, "-m", "lightcone.cli", "verify-suite", "--seed", "0", "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert r.returncode in (0, 1), r.stderr
        reports.append((out / "report.json").read_bytes())
    same = reports[0] == reports[1]
    passed = json.loads(reports[0])["passed"]
    check = verify.Check("determinism", "identical report bytes", float(not same), 0.0, same)
    _assert("11 determinism of verify-suite", [check], time.perf_counter() - t0)
    assert passed is True
