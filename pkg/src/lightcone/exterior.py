"""Energy outside the light cone ``|x| > |t| + R``: closed formula, direct
measurement, and the pointwise radiation asymptotics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .fields import CauchyData, Grid, ModeIndex, Trajectory
from .hankel import free_trajectory
from .radiation import RadiationProfile, apply_T, apply_dsT

__all__ = [
    "DomainCoverageError",
    "ExteriorEnergyReport",
    "exterior_energy_formula",
    "exterior_energy_measure",
    "measure_free_evolution",
    "energy_density",
    "exterior_energy_at",
    "radiation_asymptotics_check",
    "exterior_limits",
]


class DomainCoverageError(ValueError):
    """The grid does not reach far enough for the requested time."""


@dataclass
class ExteriorEnergyReport:
    R: float
    formula: float | None = None
    per_mode: dict = field(default_factory=dict)
    times: list = field(default_factory=list)
    forward: list = field(default_factory=list)
    backward: list = field(default_factory=list)
    measured: list = field(default_factory=list)
    measured_per_mode: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "formula": self.formula,
            "per_mode": [{"mode": m.as_list(), "value": v} for m, v in sorted(self.per_mode.items())],
            "times": list(self.times),
            "forward": list(self.forward),
            "backward": list(self.backward),
            "measured": list(self.measured),
            "tolerances": dict(self.tolerances),
        }

    def to_csv(self) -> str:
        modes = sorted({m for row in self.measured_per_mode for m in row})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "measured", "formula"] + [f"mode_{m.d}_{m.l}_{m.m}" for m in modes])
        for i, t in enumerate(self.times):
            row = self.measured_per_mode[i] if i < len(self.measured_per_mode) else {}
            w.writerow(
                [repr(float(t)), repr(self.measured[i]), repr(self.formula)]
                + [repr(row.get(m, 0.0)) for m in modes]
            )
        return buf.getvalue()

    @property
    def final(self) -> float:
        return self.measured[-1]


def exterior_energy_formula(state: CauchyData, R: float) -> ExteriorEnergyReport:
    """``||d/ds T u0||^2 + ||T u1||^2`` over ``s > R``, per channel."""
    if R < 0:
        raise ValueError("R must be >= 0")
    P = apply_dsT(state).half_line_energy(R)
    Q = apply_T(state, "velocity").half_line_energy(R)
    per_mode = {m: P[m] + Q[m] for m in state.modes}
    return ExteriorEnergyReport(R=R, formula=float(sum(per_mode.values())), per_mode=per_mode)


def exterior_limits(forward: CauchyData, backward: CauchyData, R: float) -> dict:
    """Limits of the exterior energy in each time direction.

    ``forward`` is the free data matched as ``t -> +inf`` and ``backward``
    as ``t -> -inf``; the limits are ``int_{s>R} (P - Q)^2`` and
    ``int_{s>R} (P + Q)^2`` with ``P = d/ds T u0`` and ``Q = T u1``.  For a
    free wave their mean is :func:`exterior_energy_formula`.
    """
    out = {}
    for key, state, sign in (("forward", forward, -1.0), ("backward", backward, 1.0)):
        w = state.grid.exterior_weights(R)
        P = apply_dsT(state)
        Q = apply_T(state, "velocity")
        tot = 0.0
        for m in state.modes:
            tot += float(np.dot(w, (P.positive(m) + sign * Q.positive(m)) ** 2))
        out[key] = tot
    out["mean"] = 0.5 * (out["forward"] + out["backward"])
    return out


def energy_density(state: CauchyData, mode: ModeIndex) -> np.ndarray:
    """``(u_t^2 + |grad u|^2) r^(d-1)`` of one channel at the radial nodes."""
    r = state.grid.r
    p0, p1 = state.profile0(mode), state.profile1(mode)
    psi, chi = p0.psi, p0.chi
    k = mode.l + mode.d - 2
    return p1.psi**2 + (chi - k * psi / r) ** 2 + mode.angular_weight * psi**2 / r**2


def _density_rows(tr: Trajectory, mode: ModeIndex) -> np.ndarray:
    grid = tr.grid
    r = grid.r
    psi = grid.from_amplitude(mode.order, tr.field[mode])
    chi = grid.from_amplitude(mode.order - 1, grid.nu * tr.field[mode])
    vel = grid.from_amplitude(mode.order, tr.velocity[mode])
    k = mode.l + mode.d - 2
    return vel**2 + (chi - k * psi / r) ** 2 + mode.angular_weight * psi**2 / r**2


def exterior_energy_at(state: CauchyData, radius: float) -> dict[ModeIndex, float]:
    """Energy of each channel in ``|x| > radius``."""
    w = state.grid.exterior_weights(radius)
    return {m: float(np.dot(w, energy_density(state, m))) for m in state.modes}


def _check_cover(grid: Grid, reach: float) -> None:
    if reach >= grid.s_max:
        raise DomainCoverageError(
            f"cone radius {reach} is outside the grid (r_max={grid.s_max}); enlarge s_max"
        )


def exterior_energy_measure(tr: Trajectory, R: float, times: Iterable[float]) -> ExteriorEnergyReport:
    """Half the sum of the energies outside ``|x| > |t| + R`` at ``+|t|`` and ``-|t|``.

    Both ``|t|`` and ``-|t|`` must be time nodes of ``tr``.
    """
    times = [abs(float(t)) for t in times]
    rep = ExteriorEnergyReport(R=R, times=times)
    for t in times:
        _check_cover(tr.grid, t + R)
        w = tr.grid.exterior_weights(t + R)
        ip, im = tr.index(t), tr.index(-t)
        fwd, bwd = {}, {}
        for m in tr.modes:
            dens = _density_rows(tr, m)
            fwd[m] = float(np.dot(w, dens[ip]))
            bwd[m] = float(np.dot(w, dens[im]))
        rep.forward.append(sum(fwd.values()))
        rep.backward.append(sum(bwd.values()))
        per = {m: 0.5 * (fwd[m] + bwd[m]) for m in tr.modes}
        rep.measured_per_mode.append(per)
        rep.measured.append(float(sum(per.values())))
    return rep


def measure_free_evolution(state: CauchyData, R: float, times: Iterable[float]) -> ExteriorEnergyReport:
    """Formula and measurement for the free evolution of ``state``.

    The backward branch is the forward evolution of ``(u0, -u1)``, which is
    the same as propagating to ``-t``.
    """
    times = sorted({abs(float(t)) for t in times})
    nodes = np.array(sorted({-t for t in times} | set(times)))
    tr = free_trajectory(state, nodes)
    rep = exterior_energy_measure(tr, R, times)
    form = exterior_energy_formula(state, R)
    rep.formula = form.formula
    rep.per_mode = form.per_mode
    return rep


def radiation_asymptotics_check(tr: Trajectory, F: RadiationProfile, t: float) -> float:
    """L2 distance over ``|x| >= t/2`` between ``u_t(t)`` and ``-F(|x| - t) / (sqrt 2 |x|^((d-1)/2))``.

    Only the time-derivative component is compared.
    """
    grid = tr.grid
    if t <= 0:
        raise ValueError("need t > 0")
    _check_cover(grid, t / 2)
    i = tr.index(t)
    r = grid.r
    keep = r >= t / 2
    total = 0.0
    zero = np.zeros(2 * grid.M)
    for m in set(tr.modes) | set(F.modes):
        if m in tr.modes:
            vel = grid.from_amplitude(m.order, tr.velocity[m][i])
        else:
            vel = np.zeros(grid.M)
        G = F.samples.get(m, zero)
        prof = np.interp(r - t, grid.s, G, left=0.0, right=0.0)
        diff = (vel + prof / math.sqrt(2.0))[keep]
        total += float(np.sum(diff**2)) * grid.ds
    return math.sqrt(total)
