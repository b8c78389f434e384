"""Scenario runners behind the command-line interface.

A runner takes the resolved configuration and returns a :class:`Outcome`:
a JSON-able summary, a list of checks, and the files to write (CSV text or
containers).  Nothing here touches argv or the exit status.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .container import load_radiation, load_state, save_radiation, save_state
from .duhamel import solve_with_report
from .exterior import exterior_energy_measure, measure_free_evolution, radiation_asymptotics_check
from .fields import CauchyData, Grid, ModeIndex, h_inner
from .nonlinear import NonlinearityConfig, phi_map, time_nodes, wave_operator
from .plr import pi_R, project_pR, project_state
from .radiation import invert_radiation, radiation_field
from .suites import (
    bump_state,
    compact_state,
    indicator_state,
    plr_member,
    radiation_bump,
    random_bandlimited_state,
    random_compact_source,
)
from .verify import Check, run_suite

__all__ = ["Outcome", "ConfigError", "SCENARIOS", "DEFAULTS", "build_grid", "build_state", "plan"]


class ConfigError(ValueError):
    """A configuration that passes the schema but cannot be run."""


@dataclass
class Outcome:
    summary: dict
    checks: list
    csv: dict = field(default_factory=dict)  # file name -> text
    containers: dict = field(default_factory=dict)  # file name -> writer(path)


DEFAULTS = {
    "dimension": 3,
    "degrees": [0],
    "R": 1.0,
    "seed": 0,
    "sigma": -1,
    "tolerances": {},
}

SCENARIO_DEFAULTS = {
    "radiation": {"grid": {"M": 1024, "s_max": 16.0}, "data": {"kind": "bump"}},
    "exterior-energy": {
        "grid": {"M": 32768, "s_max": 128.0},
        "data": {"kind": "indicator", "slot": "velocity", "interval": [1.0, 2.0]},
        "times": [5.0, 10.0, 20.0, 40.0, 60.0],
    },
    "invert": {"grid": {"M": 1024, "s_max": 16.0}, "size": 1.0},
    "plr-project": {"grid": {"M": 1024, "s_max": 16.0}, "data": {"kind": "random"}},
    "nonradiative-source": {"grid": {"M": 1024, "s_max": 32.0, "T_w": 22.0, "dt": 0.05}, "samples": 5, "times": [20.0]},
    "nonlinear-phi": {
        "grid": {"M": 2048, "s_max": 64.0, "T_w": 40.0, "dt": 0.05},
        "data": {"kind": "plr", "field_coefficients": {"0": 1.0}},
        "size": 0.05,
        "times": [20.0],
    },
    "wave-operator": {
        "grid": {"M": 2048, "s_max": 64.0, "T_w": 40.0, "dt": 0.05},
        "size": 0.05,
        "times": [5.0, 10.0, 15.0, 20.0, 30.0],
    },
    "verify-suite": {},
}

TOLERANCES = {
    "radiation": {"isometry": 1e-5, "round_trip": 1e-4, "parity": 1e-10},
    "exterior-energy": {"agreement": 1e-2, "oracle": 1e-6},
    "invert": {"round_trip": 1e-4, "isometry": 1e-5},
    "plr-project": {"idempotence": 1e-10, "orthogonality": 1e-8},
    "nonradiative-source": {"residual": 1e-2, "exterior": 1e-6, "projection": 1e-8, "linearity": 1e-10, "measured": 1e-2},
    "nonlinear-phi": {"picard": 1e-12, "projection": 1e-6, "exterior": 1e-4},
    "wave-operator": {"picard": 1e-12, "gap_t20": 1e-3},
    "verify-suite": {},
}


def merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = v
    return out


def resolve(config: dict) -> dict:
    """Fill defaults for the scenario named in ``config``."""
    kind = config["scenario"]
    cfg = merge(merge(DEFAULTS, SCENARIO_DEFAULTS[kind]), config)
    cfg["tolerances"] = merge(TOLERANCES[kind], config.get("tolerances", {}))
    g = cfg.get("grid", {})
    if "r_max" in g:
        if "s_max" in config.get("grid", {}) and g["r_max"] != g["s_max"]:
            raise ConfigError("grid: r_max and s_max describe the same radial extent and must agree")
        g["s_max"] = g.pop("r_max")
    if cfg["dimension"] not in (3, 5):
        raise ConfigError(
            f"dimension: {cfg['dimension']} is not supported; only odd d in {{3, 5}} are implemented "
            "(even d needs a different transform theory)"
        )
    return cfg


def build_grid(cfg: dict) -> Grid:
    g = cfg["grid"]
    return Grid(int(g["M"]), float(g["s_max"]))


def _modes(cfg: dict) -> list[ModeIndex]:
    return [ModeIndex(cfg["dimension"], l) for l in cfg["degrees"]]


def _radial_only(cfg: dict, what: str) -> ModeIndex:
    if list(cfg["degrees"]) != [0]:
        raise ConfigError(f"degrees: {what} is implemented for radial data only; use degrees [0]")
    return ModeIndex(cfg["dimension"], 0)


def build_state(cfg: dict, grid: Grid, rng=None) -> CauchyData:
    data = cfg.get("data", {"kind": "bump"})
    kind = data.get("kind", "bump")
    d, R = cfg["dimension"], cfg["R"]
    if kind == "container":
        if "path" not in data:
            raise ConfigError("data.path: required for container data")
        s = load_state(data["path"])
        if s.grid != grid:
            raise ConfigError("data.path: container grid differs from the configured grid")
        return s
    if kind == "indicator":
        _radial_only(cfg, "indicator data")
        a, b = data.get("interval", [1.0, 2.0])
        return indicator_state(grid, d, a, b, data.get("slot", "velocity"))
    parts = []
    for mode in _modes(cfg):
        if kind == "bump":
            parts.append(bump_state(grid, mode, data.get("center", 3.0), data.get("width", 1.0)))
        elif kind == "compact":
            parts.append(compact_state(grid, mode, R))
        elif kind == "plr":
            fc = {int(k): v for k, v in data.get("field_coefficients", {"0": 1.0}).items()}
            vc = {int(k): v for k, v in data.get("velocity_coefficients", {}).items()}
            parts.append(plr_member(grid, mode, R, fc, vc))
        elif kind == "random":
            parts.append(random_bandlimited_state(grid, mode, rng or np.random.default_rng(cfg["seed"])))
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _le(group, name, value, tol, informational=False, note=""):
    value = float(value)
    return Check(group, name, value, tol, bool(value <= tol), informational, note)


def _profile_csv(F, grid: Grid) -> str:
    modes = F.modes
    header = ["s"] + [f"mode_{m.d}_{m.l}_{m.m}" for m in modes]
    rows = [[float(s)] + [float(F.samples[m][i]) for m in modes] for i, s in enumerate(grid.s)]
    return _csv(header, rows)


# runners -------------------------------------------------------------------


def run_radiation(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    state = build_state(cfg, grid)
    F = radiation_field(state)
    back = invert_radiation(F)
    nsq = state.h_norm() ** 2
    iso = abs(F.norm() ** 2 - nsq) / nsq
    trip = (back - state).h_norm() / state.h_norm()
    checks = [
        _le("radiation", "isometry", iso, tol["isometry"]),
        _le("radiation", "round trip", trip, tol["round_trip"]),
        _le("radiation", "parity defect", F.parity_defect(), tol["parity"]),
    ]
    summary = {"energy": nsq, "profile_norm_sq": F.norm() ** 2, "modes": [m.as_list() for m in F.modes]}
    return Outcome(
        summary,
        checks,
        csv={"radiation_profile.csv": _profile_csv(F, grid)},
        containers={"radiation.lcf": lambda p: save_radiation(p, F, provenance={"scenario": "radiation"})},
    )


def _indicator_oracle(cfg: dict) -> float | None:
    """Closed form of the exterior formula for a radial velocity indicator in d=3."""
    data = cfg.get("data", {})
    if data.get("kind") != "indicator" or data.get("slot", "velocity") != "velocity" or cfg["dimension"] != 3:
        return None
    a, b = data.get("interval", [1.0, 2.0])
    lo = max(a, cfg["R"])
    return 2 * math.pi * (b**3 - lo**3) / 3 if b > lo else 0.0


def run_exterior_energy(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    state = build_state(cfg, grid)
    R = cfg["R"]
    rep = measure_free_evolution(state, R, cfg["times"])
    form = rep.formula
    checks = []
    oracle = _indicator_oracle(cfg)
    if oracle is not None and oracle > 0:
        checks.append(_le("exterior-energy", "formula vs closed form", abs(form - oracle) / oracle, tol["oracle"]))
    tmax = rep.times[-1]
    gap = abs(rep.measured[-1] - form)
    checks.append(_le("exterior-energy", f"measured t={tmax!r} vs formula", gap, max(tol["agreement"] * form, 1e-6)))
    for t, e in zip(rep.times[:-1], rep.measured[:-1]):
        checks.append(
            _le("exterior-energy", f"measured t={t!r} vs formula", abs(e - form), max(tol["agreement"] * form, 1e-6), informational=True)
        )
    mono = all(b <= a * (1 + 1e-9) + 1e-14 for a, b in zip(rep.measured, rep.measured[1:]))
    checks.append(Check("exterior-energy", "measured non-increasing in t", float(rep.measured[-1]), None, mono))
    summary = rep.to_dict()
    summary["closed_form"] = oracle
    if len(rep.times) >= 2:
        (t1, e1), (t2, e2) = list(zip(rep.times, rep.measured))[-2:]
        # E(t) ~ E + c/t
        summary["extrapolated"] = (t2 * e2 - t1 * e1) / (t2 - t1)
    return Outcome(summary, checks, csv={"exterior_energy.csv": rep.to_csv()})


def run_invert(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    data = cfg.get("data", {})
    if data.get("kind") == "container":
        F = load_radiation(data["path"])
        if F.grid != grid:
            raise ConfigError("data.path: container grid differs from the configured grid")
    else:
        F = None
        for m in _modes(cfg):
            G = radiation_bump(grid, m, norm=cfg.get("size", 1.0), center=data.get("center", 1.0), width=data.get("width", 0.5))
            F = G if F is None else F + G
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        state = invert_radiation(F)
    F2 = radiation_field(state)
    trip = (F2 - F).norm() / F.norm()
    iso = abs(F.norm() ** 2 - state.h_norm() ** 2) / F.norm() ** 2
    checks = [_le("invert", "round trip", trip, tol["round_trip"]), _le("invert", "isometry", iso, tol["isometry"])]
    summary = {"profile_norm": F.norm(), "energy_norm": state.h_norm(), "warnings": sorted({str(w.message) for w in caught})}
    return Outcome(summary, checks, containers={"state.lcf": lambda p: save_state(p, state, provenance={"scenario": "invert"})})


def run_plr_project(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    R = cfg["R"]
    state = build_state(cfg, grid)
    elem = project_pR(state, R)
    basis = project_state(state, R)
    cone = pi_R(state, R)
    checks = []
    for route, p, f in (("basis", basis, project_state), ("cone", cone, pi_R)):
        n = state.h_norm()
        checks.append(_le("plr-project", f"{route} idempotence", (f(p, R) - p).h_norm() / n, tol["idempotence"]))
        checks.append(_le("plr-project", f"{route} residual orthogonality", abs(h_inner(state - p, p)) / n**2, tol["orthogonality"]))
    summary = {
        "element": elem.to_dict(),
        "norm": state.h_norm(),
        "projected_norm_basis": basis.h_norm(),
        "projected_norm_cone": cone.h_norm(),
        "route_difference": (basis - cone).h_norm() / max(state.h_norm(), 1e-300),
    }
    return Outcome(summary, checks, containers={"projection.lcf": lambda p: save_state(p, cone, provenance={"scenario": "plr-project"})})


def run_nonradiative_source(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    mode = _radial_only(cfg, "the randomized source suite")
    g = cfg["grid"]
    times = time_nodes(-g["T_w"], g["T_w"], g["dt"])
    if max(cfg["times"]) > g["T_w"]:
        raise ConfigError("times: measurement times must lie inside the window T_w")
    rng = np.random.default_rng(cfg["seed"])
    checks, rows, reports = [], [], []
    for i in range(cfg["samples"]):
        h = random_compact_source(grid, mode, times, rng)
        _, rep = solve_with_report(h, cfg["R"], measure_times=tuple(cfg["times"]), tolerances=cfg["tolerances"])
        reports.append(rep.to_dict())
        vals = rep.check_values()
        for key, ok in sorted(rep.passed.items()):
            checks.append(Check("nonradiative-source", f"source {i} {key}", vals[key], rep.tolerances.get(key), bool(ok)))
        rows.append([i, rep.residual, rep.exterior_forward, rep.exterior_backward, rep.projection_at_zero, rep.linearity, rep.x_bound_constant])
    csv_text = _csv(["source", "residual", "exterior_forward", "exterior_backward", "projection", "linearity", "x_over_n"], rows)
    return Outcome({"reports": reports}, checks, csv={"source_solves.csv": csv_text})


def _picard_checks(group, rep, tol):
    note = rep.message
    if rep.ratios:
        note += f" (last ratio {rep.ratios[-1]:.3g})"
    checks = [Check(group, "Picard converged", float(rep.iterations), None, rep.converged, note=note.strip())]
    if rep.converged:
        checks.append(_le(group, "window tail estimate", rep.tail_estimate, tol["picard"], informational=True))
    return checks


def run_nonlinear_phi(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    _radial_only(cfg, "the nonlinear flow")
    R = cfg["R"]
    g = cfg["grid"]
    nl = NonlinearityConfig(cfg["dimension"], cfg["sigma"])
    data = build_state(cfg, grid)
    data = data * (cfg["size"] / data.h_norm())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        u0, tr, rep = phi_map(data, R, nl, window=g["T_w"], dt=g["dt"], tol=tol["picard"])
    checks = _picard_checks("nonlinear-phi", rep, tol)
    summary = {"size": cfg["size"], "picard": rep.to_dict()}
    if rep.converged:
        res = (pi_R(u0, R) - pi_R(data, R)).h_norm()
        checks.append(_le("nonlinear-phi", "projection residual", res, tol["projection"]))
        meas = exterior_energy_measure(tr, R, cfg["times"]).measured
        lin = measure_free_evolution(data, R, cfg["times"]).measured
        summary.update(
            phi_minus_data=(u0 - data).h_norm(),
            measured_exterior=meas,
            linear_measured_exterior=lin,
        )
        budget = max(tol["exterior"] * cfg["size"] ** 2, rep.tail_estimate)
        for t, a, b in zip(cfg["times"], meas, lin):
            checks.append(_le("nonlinear-phi", f"exterior energy t={t!r} minus linear", abs(a - b), budget))
    return Outcome(summary, checks, csv={"picard.csv": rep.to_csv()})


def run_wave_operator(cfg: dict) -> Outcome:
    grid = build_grid(cfg)
    tol = cfg["tolerances"]
    mode = _radial_only(cfg, "the nonlinear flow")
    g = cfg["grid"]
    nl = NonlinearityConfig(cfg["dimension"], cfg["sigma"])
    data = cfg.get("data", {})
    if data.get("kind") == "container":
        F = load_radiation(data["path"])
        F = F * (cfg["size"] / F.norm())
    else:
        F = radiation_bump(grid, mode, norm=cfg["size"], center=data.get("center", 1.0), width=data.get("width", 0.5))
    times = sorted(cfg["times"])
    if times[-1] > g["T_w"]:
        raise ConfigError("times: evaluation times must lie inside the window T_w")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        u, vL, rep = wave_operator(F, nl, window=g["T_w"], dt=g["dt"], tol=tol["picard"])
    checks = _picard_checks("wave-operator", rep, tol)
    summary = {"size": cfg["size"], "picard": rep.to_dict()}
    rows = []
    if rep.converged:
        ts = [t for t in times if t >= u.times[0]]
        gaps = [(u.state(u.index(t)) - vL.state(vL.index(t))).h_norm() for t in ts]
        asym = [radiation_asymptotics_check(u, F, t) for t in ts]
        rows = [[t, a, b] for t, a, b in zip(ts, gaps, asym)]
        checks.append(Check("wave-operator", "|u - v_L| decreasing", gaps[-1], None, all(b <= a for a, b in zip(gaps, gaps[1:]))))
        checks.append(Check("wave-operator", "asymptotics decreasing", asym[-1], None, all(b <= a for a, b in zip(asym, asym[1:]))))
        if 20.0 in ts:
            checks.append(_le("wave-operator", "|u - v_L| at t=20 / |F|", gaps[ts.index(20.0)] / F.norm(), tol["gap_t20"]))
        summary.update(start_time=rep.start_time, gaps=gaps, asymptotics=asym)
    return Outcome(
        summary,
        checks,
        csv={"picard.csv": rep.to_csv(), "wave_operator.csv": _csv(["time", "gap", "asymptotics"], rows)},
    )


def run_verify_suite(cfg: dict) -> Outcome:
    checks = run_suite(seed=cfg["seed"], quick=True, strict=False)
    groups = sorted({c.group for c in checks})
    summary = {
        "groups": {
            g: {
                "passed": sum(c.passed for c in checks if c.group == g and not c.informational),
                "failed": sum(not c.passed for c in checks if c.group == g and not c.informational),
                "informational": sum(c.informational for c in checks if c.group == g),
            }
            for g in groups
        }
    }
    rows = [[c.group, c.name, c.value, "" if c.tolerance is None else c.tolerance, c.passed, c.informational] for c in checks]
    return Outcome(summary, checks, csv={"verify_suite.csv": _csv(["group", "check", "value", "tolerance", "passed", "informational"], rows)})


SCENARIOS = {
    "radiation": run_radiation,
    "exterior-energy": run_exterior_energy,
    "invert": run_invert,
    "plr-project": run_plr_project,
    "nonradiative-source": run_nonradiative_source,
    "nonlinear-phi": run_nonlinear_phi,
    "wave-operator": run_wave_operator,
    "verify-suite": run_verify_suite,
}

_STEPS = {
    "radiation": ["build data", "cone transform per channel", "inverse map", "isometry / round trip / parity checks"],
    "exterior-energy": ["build data", "exterior formula on s > R", "free propagation to +-t", "energy outside |x| = t + R", "compare"],
    "invert": ["load or build profile", "parity split and inverse transform", "forward map", "round trip check"],
    "plr-project": ["build data", "cone-route projection", "basis-route projection and tail coefficients", "idempotence / orthogonality"],
    "nonradiative-source": ["draw sources", "Duhamel sweeps", "cone correction outside R", "five postcondition checks"],
    "nonlinear-phi": ["build and scale data", "free wave on the window", "Picard: nonlinearity -> non-radiative solve", "projection and exterior checks"],
    "wave-operator": ["build and scale profile", "invert to free data", "Picard from +infinity, T in (0, 5, 10, 20)", "decay checks"],
    "verify-suite": ["isometry", "parity", "bijection", "exterior", "finite-speed", "plr", "projection", "source-solve", "phi", "wave-operator"],
}


def plan(cfg: dict) -> str:
    """Seed-independent description of what ``run`` would do."""
    lines = [f"scenario: {cfg['scenario']}", f"dimension: {cfg['dimension']}", f"degrees: {list(cfg['degrees'])}", f"R: {cfg['R']!r}"]
    g = cfg.get("grid", {})
    if g:
        grid = build_grid(cfg)
        lines.append(f"grid: M={grid.M} s_max={grid.s_max!r} ds={grid.ds!r} nu_max={grid.rho_max!r}")
        if "T_w" in g:
            lines.append(f"time window: [-{g['T_w']!r}, {g['T_w']!r}] step {g['dt']!r}")
    if "times" in cfg:
        lines.append(f"times: {list(cfg['times'])}")
    lines.append("steps:")
    for i, s in enumerate(_STEPS[cfg["scenario"]], 1):
        lines.append(f"  {i}. {s}")
    lines.append("tolerances:")
    for k, v in sorted(cfg["tolerances"].items()):
        lines.append(f"  {k}: {v!r}")
    return "\n".join(lines) + "\n"
