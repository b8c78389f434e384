"""Property checks at desk scale, shared by ``lightcone verify-suite`` and the
acceptance tests.

Each ``check_*`` function returns a list of :class:`Check`.  With
``strict=False`` the checks that are known to be unattainable on a finite
grid are kept in the report but marked informational, so they do not
decide the exit status.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .duhamel import solve_with_report
from .exterior import exterior_energy_measure, measure_free_evolution, radiation_asymptotics_check
from .fields import CauchyData, Grid, ModeIndex, h_inner
from .nonlinear import NonlinearityConfig, phi_map, time_nodes, wave_operator
from .plr import is_nonradiative_linear, pi_R, plr_basis, project_state
from .radiation import apply_dsT, apply_T, invert_radiation, radiation_field
from .suites import (
    bump_state,
    compact_state,
    indicator_state,
    plr_member,
    profile_suite,
    radiation_bump,
    random_bandlimited_state,
    random_compact_source,
)

__all__ = ["Check", "CHECKS", "run_suite"]

TOLERANCE_VERSION = "1"


@dataclass
class Check:
    group: str
    name: str
    value: float
    tolerance: float | None
    passed: bool
    informational: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "informational": self.informational,
            "note": self.note,
        }


def _le(group, name, value, tol, informational=False, note=""):
    value = float(value)
    return Check(group, name, value, tol, bool(value <= tol), informational, note)


def _rel_energy_gap(a: CauchyData, b: CauchyData) -> float:
    return (a - b).h_norm() / max(b.h_norm(), 1e-300)


SUITE_CHANNELS = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1)]


def check_isometry(strict=True):
    """Norm of the cone transform against quadrature of the profile norm."""
    grid = Grid(1024, 16.0)
    out = []
    for d, l in SUITE_CHANNELS:
        mode = ModeIndex(d, l)
        worst = 0.0
        for prof, exact in profile_suite(grid, mode):
            worst = max(worst, abs(apply_T(prof).norm() - exact) / exact)
        out.append(_le("isometry", f"d={d} l={l}", worst, 1e-6 if d == 3 else 1e-3))
    return out


def check_parity(strict=True):
    grid = Grid(1024, 16.0)
    out = []
    for d, l in SUITE_CHANNELS:
        mode = ModeIndex(d, l)
        worst = 0.0
        for prof, _ in profile_suite(grid, mode):
            worst = max(worst, apply_T(prof).parity_defect(), apply_dsT(prof).parity_defect())
        out.append(_le("parity", f"d={d} l={l}", worst, 1e-10))
    return out


def check_bijection(strict=True):
    grid = Grid(1024, 16.0)
    out = []
    for d, l in SUITE_CHANNELS:
        mode = ModeIndex(d, l)
        s = bump_state(grid, mode, center=3.0, width=1.0)
        F = radiation_field(s)
        back = invert_radiation(F)
        G = radiation_bump(grid, mode, norm=1.0, center=1.0, width=0.7)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            G2 = radiation_field(invert_radiation(G))
        iso = abs(F.norm() ** 2 - s.h_norm() ** 2) / s.h_norm() ** 2
        out.append(_le("bijection", f"d={d} l={l} data->F->data", _rel_energy_gap(back, s), 1e-4))
        out.append(_le("bijection", f"d={d} l={l} F->data->F", (G2 - G).norm() / G.norm(), 1e-4))
        out.append(_le("bijection", f"d={d} l={l} isometry", iso, 1e-5))
    return out


def check_exterior_identity(strict=True):
    exact = 14 * math.pi / 3
    grid = Grid(8192, 32.0)
    s = indicator_state(grid)
    rep = measure_free_evolution(s, 1.0, [10.0, 20.0])
    e10, e20 = rep.measured
    out = [
        _le("exterior", "formula vs 14 pi/3", abs(rep.formula - exact) / exact, 1e-6),
        _le(
            "exterior",
            "measured t=20 vs formula",
            abs(e20 - rep.formula) / rep.formula,
            1e-2,
            informational=not strict,
            note="boundary term decays like 1/t; see the t=60 entry",
        ),
        _le(
            "exterior",
            "Richardson 2E(20)-E(10) vs formula",
            abs(2 * e20 - e10 - rep.formula) / rep.formula,
            1e-2,
            informational=True,
        ),
    ]
    big = Grid(16384, 128.0)
    rep60 = measure_free_evolution(indicator_state(big), 1.0, [60.0])
    out.append(_le("exterior", "measured t=60 vs formula", abs(rep60.measured[0] - rep60.formula) / rep60.formula, 1e-2))
    return out


def check_finite_speed(strict=True):
    grid = Grid(2048, 32.0)
    R = 1.0
    out = []
    for d, l in [(3, 0), (3, 1), (5, 0)]:
        s = compact_state(grid, ModeIndex(d, l), R)
        s = s * (1.0 / s.h_norm())
        rep = measure_free_evolution(s, R, [5.0, 10.0, 20.0])
        out.append(_le("finite-speed", f"d={d} l={l} formula", rep.formula, 1e-8))
        out.append(_le("finite-speed", f"d={d} l={l} measured", max(rep.measured), 1e-8))
    return out


PLR_CASES = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2)]


def admissible_reference(d: int, l: int):
    """Index sets straight from the exponent inequalities."""
    alpha = [-l - d + 2 * k + 2 for k in range(l + d)]
    kh = [k for k, a in enumerate(alpha) if a < 1 - d / 2]
    kl = [k for k, a in enumerate(alpha) if a < -d / 2]
    return kh, kl


def gram_by_quadrature(d: int, l: int, R: float):
    kh, kl = admissible_reference(d, l)
    L = l * (l + d - 2)

    def alpha(k):
        return -l - d + 2 * k + 2

    def h1(j, k):
        aj, ak = alpha(j), alpha(k)
        inner = integrate.quad(lambda r: (l * l + L) * r ** (2 * l - 2) / R ** (2 * l) * r ** (d - 1), 0, R, epsrel=1e-13)[0] if l else 0.0
        outer = integrate.quad(lambda r: (aj * ak + L) * r ** (aj + ak - 2) / R ** (aj + ak) * r ** (d - 1), R, np.inf, epsrel=1e-13)[0]
        return inner + outer

    def l2(j, k):
        return integrate.quad(lambda r: r ** (alpha(j) + alpha(k)) * r ** (d - 1), R, np.inf, epsrel=1e-13)[0]

    GH = np.array([[h1(j, k) for k in kh] for j in kh])
    GL = np.array([[l2(j, k) for k in kl] for j in kl])
    return GH, GL


def check_plr(strict=True):
    R = 1.0
    out = []
    grid = Grid(2048, 64.0)
    for d, l in PLR_CASES:
        spec = plr_basis(d, l, R)
        kh, kl = admissible_reference(d, l)
        same = list(spec.field_indices) == kh and list(spec.velocity_indices) == kl
        out.append(Check("plr", f"d={d} l={l} admissible sets", float(not same), 0.0, same))
        GH, GL = gram_by_quadrature(d, l, R)
        err = 0.0
        if GH.size:
            err = max(err, float(np.max(np.abs(spec.field_gram() - GH) / np.abs(GH))))
        if GL.size:
            err = max(err, float(np.max(np.abs(spec.velocity_gram() - GL) / np.abs(GL))))
        out.append(_le("plr", f"d={d} l={l} Gram vs quadrature", err, 1e-8))
        mode = ModeIndex(d, l)
        members = [(f"f_{k}", {k: 1.0}, None) for k in spec.field_indices]
        members += [(f"g_{k}", None, {k: 1.0}) for k in spec.velocity_indices]
        for name, fc, vc in members:
            s = plr_member(grid, mode, R, fc, vc)
            nsq = s.h_norm() ** 2
            nr = is_nonradiative_linear(s, R)
            out.append(
                _le(
                    "plr",
                    f"d={d} l={l} {name} nonradiative (formula / norm^2)",
                    nr.exterior_energy / nsq,
                    nr.tolerance,
                    informational=not strict,
                    note="power tail truncated at the grid edge",
                )
            )
            meas = measure_free_evolution(s, R, [20.0]).measured[0]
            out.append(
                _le(
                    "plr",
                    f"d={d} l={l} {name} measured t=20 / norm^2",
                    meas / nsq,
                    1e-4,
                    informational=not strict,
                    note="energy beyond |x| = t + R of a power tail is not small at finite t",
                )
            )
    return out


def check_projection(strict=True, count=50, seed=0):
    grid = Grid(512, 16.0)
    R = 1.5
    rng = np.random.default_rng(seed)
    modes = [ModeIndex(3, l) for l in (0, 1, 2)]
    out = []
    for route, proj in (("cone", pi_R), ("basis", project_state)):
        idem = sym = orth = expand = 0.0
        for _ in range(count):
            a = sum((random_bandlimited_state(grid, m, rng) for m in modes[1:]), random_bandlimited_state(grid, modes[0], rng))
            b = sum((random_bandlimited_state(grid, m, rng) for m in modes[1:]), random_bandlimited_state(grid, modes[0], rng))
            pa, pb = proj(a, R), proj(b, R)
            na = a.h_norm()
            idem = max(idem, (proj(pa, R) - pa).h_norm() / na)
            sym = max(sym, abs(h_inner(pa, b) - h_inner(a, pb)) / (na * b.h_norm()))
            orth = max(orth, abs(h_inner(a - pa, pa)) / na**2)
            expand = max(expand, pa.h_norm() / na - 1.0)
        out.append(_le("projection", f"{route} idempotence", idem, 1e-10))
        out.append(_le("projection", f"{route} symmetry", sym, 1e-8))
        out.append(_le("projection", f"{route} residual orthogonality", orth, 1e-8))
        out.append(_le("projection", f"{route} non-expansive (excess)", max(expand, 0.0), 1e-12))
    return out


def check_source_solve(strict=True, count=5, seed=0):
    grid = Grid(1024, 32.0)
    mode = ModeIndex(3, 0)
    rng = np.random.default_rng(seed)
    times = time_nodes(-22.0, 22.0, 0.05)
    out = []
    for i in range(count):
        h = random_compact_source(grid, mode, times, rng)
        _, rep = solve_with_report(h, 1.0, measure_times=(20.0,))
        vals = rep.check_values()
        for key, ok in sorted(rep.passed.items()):
            val = vals[key]
            tol = rep.tolerances.get(key)
            out.append(Check("source-solve", f"source {i} {key}", float(val), tol, bool(ok)))
    return out


NONLINEAR_GRID = (2048, 64.0)


def check_phi(strict=True, sizes=(0.025, 0.05, 0.1)):
    grid = Grid(*NONLINEAR_GRID)
    cfg = NonlinearityConfig(3, -1)
    mode = ModeIndex(3, 0)
    R = 1.0
    f0 = plr_member(grid, mode, R, {0: 1.0})
    f0 = f0 * (1.0 / f0.h_norm())
    out = []
    gaps = []
    for a in sizes:
        data = f0 * a
        u0, _, rep = phi_map(data, R, cfg)
        geometric = rep.converged and all(x < 1.0 for x in rep.ratios)
        out.append(Check("phi", f"size {a} converged with ratios < 1", float(max(rep.ratios, default=0.0)), 1.0, geometric))
        res = (pi_R(u0, R) - pi_R(data, R)).h_norm()
        out.append(_le("phi", f"size {a} projection residual", res, 1e-6))
        gaps.append((u0 - data).h_norm())
    slope = float(np.polyfit(np.log(sizes), np.log(gaps), 1)[0])
    out.append(_le("phi", "log-log slope of |Phi(a)-a| (distance from 5)", abs(slope - 5.0), 0.3, note=f"slope {slope!r}"))
    # exterior energy of the nonlinear flow from data inside the ball
    c = compact_state(grid, mode, R)
    c = c * (0.1 / c.h_norm())
    _, tr, rep = phi_map(c, R, cfg)
    meas = exterior_energy_measure(tr, R, [20.0]).measured[0]
    out.append(_le("phi", "compact data: measured exterior energy t=20", meas, max(1e-4 * 0.1**2, rep.tail_estimate)))
    return out


def check_wave_operator(strict=True, times=(5.0, 10.0, 15.0, 20.0, 30.0)):
    grid = Grid(*NONLINEAR_GRID)
    cfg = NonlinearityConfig(3, -1)
    mode = ModeIndex(3, 0)
    F = radiation_bump(grid, mode, norm=0.05)
    u, vL, rep = wave_operator(F, cfg)
    out = [Check("wave-operator", "converged at T=0", float(rep.start_time or 0.0), 0.0, rep.converged and rep.start_time == 0.0)]
    gaps = [(u.state(u.index(t)) - vL.state(vL.index(t))).h_norm() for t in times]
    asym = [radiation_asymptotics_check(u, F, t) for t in times]
    dec = all(b <= a for a, b in zip(gaps, gaps[1:]))
    out.append(Check("wave-operator", "|u - v_L| decreasing", float(gaps[-1]), None, dec))
    i20 = list(times).index(20.0)
    out.append(_le("wave-operator", "|u - v_L| at t=20 / |F|", gaps[i20] / F.norm(), 1e-3))
    dec = all(b <= a for a, b in zip(asym, asym[1:]))
    out.append(Check("wave-operator", "asymptotics decreasing", float(asym[-1]), None, dec))
    return out


CHECKS = {
    "isometry": check_isometry,
    "parity": check_parity,
    "bijection": check_bijection,
    "exterior": check_exterior_identity,
    "finite-speed": check_finite_speed,
    "plr": check_plr,
    "projection": check_projection,
    "source-solve": check_source_solve,
    "phi": check_phi,
    "wave-operator": check_wave_operator,
}


def run_suite(seed: int = 0, quick: bool = True, strict: bool = False, groups=None) -> list[Check]:
    """Run the property groups; ``quick`` trims the randomized sample counts."""
    out = []
    for name, fn in CHECKS.items():
        if groups is not None and name not in groups:
            continue
        kw = {"strict": strict}
        if name == "projection":
            kw.update(count=10 if quick else 50, seed=seed)
        elif name == "source-solve":
            kw.update(count=2 if quick else 5, seed=seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out.extend(fn(**kw))
    return out
