"""The space of data whose free evolution carries no energy outside the
``R``-cone: compact pieces plus explicit power tails, and the orthogonal
projection onto it.

Work is done in the variables

    chi  = r^((d-1)/2) (u0' + (l + d - 2) u0 / r)      (field slot)
    psi1 = r^((d-1)/2) u1                               (velocity slot)

in which the energy inner product is the plain ``L2(dr)`` product on each
channel.  There the space is ``L2(0, R)`` plus the exterior tails
``r^(2k - n - 1)`` (field, ``k >= 1``) and ``r^(2k - n)`` (velocity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .fields import CauchyData, Grid, ModeIndex
from .exterior import exterior_energy_formula
from .radiation import cone_coordinates, from_cone_coordinates

__all__ = [
    "GramConditioningError",
    "PlrBasisSpec",
    "PlrElement",
    "plr_basis",
    "materialize",
    "project_pR",
    "project_state",
    "pi_R",
    "is_nonradiative_linear",
    "NonradiativeReport",
    "field_tail_chi",
    "velocity_tail_psi",
]

GRAM_COND_LIMIT = 1e12


class GramConditioningError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PlrBasisSpec:
    d: int
    l: int
    R: float

    def __post_init__(self):
        if self.d not in (3, 5):
            raise ValueError("only d = 3 and d = 5 are supported")
        if self.l < 0:
            raise ValueError("l must be >= 0")
        if not self.R > 0:
            raise ValueError("R must be positive")

    def alpha(self, k: int) -> int:
        return -self.l - self.d + 2 * k + 2

    @property
    def order(self) -> int:
        return self.l + (self.d - 3) // 2

    @property
    def field_indices(self) -> tuple[int, ...]:
        """``k`` with ``alpha_k < 1 - d/2`` (field tails in H1-dot)."""
        return tuple(k for k in range(self.l + self.d) if 2 * self.alpha(k) < 2 - self.d)

    @property
    def velocity_indices(self) -> tuple[int, ...]:
        """``k`` with ``alpha_k < -d/2`` (velocity tails in L2)."""
        return tuple(k for k in range(self.l + self.d) if 2 * self.alpha(k) < -self.d)

    @property
    def alphas(self) -> dict[int, int]:
        return {k: self.alpha(k) for k in self.field_indices}

    def velocity_gram(self) -> np.ndarray:
        """``<g_j, g_k>`` in L2 for the channel (angular factor 1)."""
        K = self.velocity_indices
        G = np.empty((len(K), len(K)))
        for a, j in enumerate(K):
            for b, k in enumerate(K):
                e = self.alpha(j) + self.alpha(k) + self.d
                G[a, b] = self.R**e / (-e)
        return G

    def field_gram(self) -> np.ndarray:
        """``<f_j, f_k>`` in H1-dot: exterior power part plus the shared interior ``l R^(d-2)``."""
        K = self.field_indices
        L = self.l * (self.l + self.d - 2)
        G = np.empty((len(K), len(K)))
        for a, j in enumerate(K):
            for b, k in enumerate(K):
                aj, ak = self.alpha(j), self.alpha(k)
                e = aj + ak + self.d - 2
                G[a, b] = (aj * ak + L) * self.R ** (self.d - 2) / (-e) + self.l * self.R ** (self.d - 2)
        return G

    def describe(self) -> dict:
        return {
            "d": self.d,
            "l": self.l,
            "R": self.R,
            "alpha": {str(k): self.alpha(k) for k in range(max(self.field_indices, default=0) + 1)},
            "field_indices": list(self.field_indices),
            "velocity_indices": list(self.velocity_indices),
        }


def plr_basis(d: int, l: int, R: float) -> PlrBasisSpec:
    spec = PlrBasisSpec(d, l, float(R))
    for G in (spec.field_gram(), spec.velocity_gram()):
        if G.size:
            w = np.linalg.eigvalsh(G)
            if w[0] <= 0 or w[-1] / w[0] > GRAM_COND_LIMIT:
                raise GramConditioningError(f"Gram matrix conditioning {w[-1] / w[0]:.2e}")
    return spec


def field_tail_chi(spec: PlrBasisSpec, k: int, r: np.ndarray) -> np.ndarray:
    """``chi`` of ``f_k = (r/R)^alpha_k`` outside, ``(r/R)^l`` inside."""
    d, l, R, n = spec.d, spec.l, spec.R, spec.order
    a = spec.alpha(k)
    inside = (2 * l + d - 2) * R ** (-l) * r**n
    outside = (a + l + d - 2) * R ** (-a) * r ** (2 * k - n - 1)
    return np.where(r < R, inside, outside)


def velocity_tail_psi(spec: PlrBasisSpec, k: int, r: np.ndarray) -> np.ndarray:
    """``psi`` of ``g_k = r^alpha_k`` on ``r > R``."""
    return np.where(r < spec.R, 0.0, r ** (2 * k - spec.order))


@dataclass(frozen=True, eq=False)
class PlrElement:
    """Coefficients over the tails per channel plus a compactly supported part."""

    R: float
    field_coeffs: Mapping[ModeIndex, Mapping[int, float]]
    velocity_coeffs: Mapping[ModeIndex, Mapping[int, float]]
    compact: CauchyData

    @property
    def grid(self) -> Grid:
        return self.compact.grid

    def to_dict(self) -> dict:
        def enc(tab):
            return [
                {"mode": m.as_list(), "coeffs": {str(k): float(c) for k, c in sorted(v.items())}}
                for m, v in sorted(tab.items())
            ]

        return {"R": self.R, "field": enc(self.field_coeffs), "velocity": enc(self.velocity_coeffs)}


def _chi_to_amp(grid: Grid, mode: ModeIndex, chi: np.ndarray) -> np.ndarray:
    return grid.to_amplitude(mode.order - 1, chi) / grid.nu


def _amp_to_chi(grid: Grid, mode: ModeIndex, amp: np.ndarray) -> np.ndarray:
    return grid.from_amplitude(mode.order - 1, grid.nu * amp)


def materialize(e: PlrElement, grid: Grid | None = None) -> CauchyData:
    """Sample the element on a grid (its own grid by default)."""
    grid = grid or e.grid
    if grid != e.grid:
        raise ValueError("materialize on a different grid is not supported")
    if grid.s_max <= e.R:
        raise ValueError("the grid must extend beyond R")
    r = grid.r
    field, vel = {}, {}
    for mode in set(e.field_coeffs) | set(e.velocity_coeffs):
        spec = PlrBasisSpec(mode.d, mode.l, e.R)
        chi = np.zeros(grid.M)
        for k, c in e.field_coeffs.get(mode, {}).items():
            chi += c * field_tail_chi(spec, k, r)
        psi = np.zeros(grid.M)
        for k, c in e.velocity_coeffs.get(mode, {}).items():
            psi += c * velocity_tail_psi(spec, k, r)
        field[mode] = _chi_to_amp(grid, mode, chi)
        vel[mode] = grid.to_amplitude(mode.order, psi)
    return CauchyData(grid, field, vel) + e.compact


def _lstsq_tail(values: np.ndarray, basis: list[np.ndarray], ds: float) -> np.ndarray:
    if not basis:
        return np.zeros(0)
    B = np.stack(basis, axis=1)
    G = B.T @ B * ds
    w = np.linalg.eigvalsh(G)
    if w[0] <= 0 or w[-1] / w[0] > GRAM_COND_LIMIT:
        raise GramConditioningError(f"discrete Gram conditioning {w[-1] / max(w[0], 1e-300):.2e}")
    return np.linalg.solve(G, B.T @ values * ds)


def _project_channel(grid: Grid, mode: ModeIndex, amp0, amp1, R: float):
    """Return projected (chi, psi1) and the fitted tail coefficients."""
    spec = PlrBasisSpec(mode.d, mode.l, R)
    r = grid.r
    inner = r < R
    chi = _amp_to_chi(grid, mode, amp0)
    psi1 = grid.from_amplitude(mode.order, amp1)
    ext = ~inner
    fk = [k for k in spec.field_indices if k >= 1]
    fb = [np.where(ext, r ** (2 * k - spec.order - 1), 0.0) for k in fk]
    bcoef = _lstsq_tail(np.where(ext, chi, 0.0), fb, grid.ds)
    gk = list(spec.velocity_indices)
    gb = [velocity_tail_psi(spec, k, r) for k in gk]
    dcoef = _lstsq_tail(np.where(ext, psi1, 0.0), gb, grid.ds)
    chi_p = np.where(inner, chi, 0.0)
    for b, v in zip(bcoef, fb):
        chi_p = chi_p + b * v
    psi_p = np.where(inner, psi1, 0.0)
    for c, v in zip(dcoef, gb):
        psi_p = psi_p + c * v
    # f_k weights from the fitted chi tails
    fcoef = {}
    for k, b in zip(fk, bcoef):
        a = spec.alpha(k)
        fcoef[k] = float(b / ((a + spec.l + spec.d - 2) * R ** (-a)))
    # value at R through psi(R) = R^-n int_0^R s^n chi ds (midpoint cells)
    n = spec.order
    uR = float(np.sum((r**n * chi_p)[inner]) * grid.ds) * R ** (-n) / R ** ((mode.d - 1) / 2)
    fcoef[0] = uR - sum(fcoef.values())
    vcoef = {k: float(c) for k, c in zip(gk, dcoef)}
    return chi_p, psi_p, fcoef, vcoef


def pi_R(state: CauchyData, R: float) -> CauchyData:
    """Orthogonal projection onto data with no energy outside the ``R``-cone.

    In cone coordinates the space is ``{P = Q = 0 on s > R}``, so the
    projection keeps the cells with ``s < R``.  This is exact for the
    discrete energy formula: ``||u - pi_R u||^2`` equals it.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    grid = state.grid
    if grid.s_max <= R:
        raise ValueError("the grid must extend beyond R")
    # whole cells by centre; put R on a cell boundary for exact agreement
    keep = grid.r < R
    coords = {m: (np.where(keep, P, 0.0), np.where(keep, Q, 0.0)) for m, (P, Q) in cone_coordinates(state).items()}
    return from_cone_coordinates(grid, coords)


def project_state(state: CauchyData, R: float) -> CauchyData:
    """Projection onto compact pieces plus the sampled power tails.

    This is the basis description of the same space; on a finite grid it
    differs from :func:`pi_R` by the truncation of the tails.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    grid = state.grid
    if grid.s_max <= R:
        raise ValueError("the grid must extend beyond R")
    field, vel = {}, {}
    for mode in state.modes:
        chi_p, psi_p, _, _ = _project_channel(grid, mode, state.field[mode], state.velocity[mode], R)
        field[mode] = _chi_to_amp(grid, mode, chi_p)
        vel[mode] = grid.to_amplitude(mode.order, psi_p)
    return CauchyData(grid, field, vel)


def project_pR(state: CauchyData, R: float) -> PlrElement:
    """Orthogonal projection onto the non-radiative space, as coefficients.

    The compact part keeps ``u1`` on ``r < R`` and ``u0`` minus the
    harmonic extension ``u0(R) (r/R)^l`` of its boundary value.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    grid = state.grid
    r = grid.r
    inner = r < R
    fco, vco, cf, cv = {}, {}, {}, {}
    for mode in state.modes:
        spec = PlrBasisSpec(mode.d, mode.l, R)
        chi_p, psi_p, fcoef, vcoef = _project_channel(grid, mode, state.field[mode], state.velocity[mode], R)
        fco[mode] = fcoef
        vco[mode] = vcoef
        tail = np.zeros(grid.M)
        for k, c in fcoef.items():
            tail += c * field_tail_chi(spec, k, r)
        cf[mode] = _chi_to_amp(grid, mode, np.where(inner, chi_p - tail, 0.0))
        cv[mode] = grid.to_amplitude(mode.order, np.where(inner, psi_p, 0.0))
    return PlrElement(float(R), fco, vco, CauchyData(grid, cf, cv))


@dataclass
class NonradiativeReport:
    nonradiative: bool
    exterior_energy: float
    energy_norm_sq: float
    projection_residual: float
    tolerance: float
    per_mode: dict = field(default_factory=dict)

    def __bool__(self):
        return self.nonradiative

    def to_dict(self) -> dict:
        return {
            "nonradiative": self.nonradiative,
            "exterior_energy": self.exterior_energy,
            "energy_norm_sq": self.energy_norm_sq,
            "projection_residual": self.projection_residual,
            "tolerance": self.tolerance,
        }


def is_nonradiative_linear(state: CauchyData, R: float, tol: float = 1e-6) -> NonradiativeReport:
    """Exterior-energy test, relative to the energy norm squared."""
    rep = exterior_energy_formula(state, R)
    nsq = state.h_norm() ** 2
    resid = (state - pi_R(state, R)).h_norm()
    ok = rep.formula <= tol * max(nsq, 1e-300) or rep.formula == 0.0
    return NonradiativeReport(bool(ok), rep.formula, nsq, resid, tol, rep.per_mode)
