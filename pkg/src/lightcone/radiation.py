"""Light-cone profiles: the transform ``T``, its s-derivative, the radiation
field and its inverses.

On a channel of Bessel order ``n`` the s-Fourier transform of ``T v`` at
``nu > 0`` is ``sqrt(pi) e^{-i tau} (-i)^l amp(nu)``, so on the cone grid

    G(s) = sqrt(dnu / (2 ds)) * C_n[amp](s),   s > 0,

where ``C_n`` is the orthonormal cosine/sine-IV transform with kernel
``cos(nu s - (n + 1) pi / 2)``.  The negative half follows from the parity
``G(-s) = (-1)^(n+1) G(s)``.  ``d/ds T`` uses order ``n - 1`` applied to
``nu * amp``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Mapping

import numpy as np

from ._transforms import unit_cone
from .fields import (
    CauchyData,
    Grid,
    GridMismatchError,
    ModeIndex,
    RadialProfile,
)

__all__ = [
    "RadiationProfile",
    "transform_parity",
    "apply_T",
    "apply_dsT",
    "radiation_field",
    "invert_radiation",
    "partial_inverse_G",
    "parity_extension",
    "cone_coordinates",
    "from_cone_coordinates",
    "PHASE_TAU",
    "C0",
]


def PHASE_TAU(d: int) -> float:
    """Phase ``(d - 1) pi / 4`` of the cone multiplier."""
    return (d - 1) * math.pi / 4


def C0(d: int) -> float:
    """Normalization ``1 / sqrt(2 (2 pi)^(d-1))`` of the cone multiplier."""
    return 1.0 / math.sqrt(2 * (2 * math.pi) ** (d - 1))


def transform_parity(mode: ModeIndex, derivative: bool = False) -> int:
    """Sign ``p`` in ``G(-s) = p G(s)`` for ``T`` (or ``d/ds T``) outputs.

    Equals ``sigma(d) (-1)^l`` with ``sigma = -1`` for ``d = 3 mod 4`` and
    ``+1`` for ``d = 1 mod 4``; the derivative flips it.
    """
    p = -1 if (mode.order + 1) % 2 else 1
    return -p if derivative else p


def _cone_scale(grid: Grid) -> float:
    return math.sqrt(grid.dnu / (2 * grid.ds))


def _extend(pos: np.ndarray, parity: int) -> np.ndarray:
    return np.concatenate([parity * pos[..., ::-1], pos], axis=-1)


@dataclass(frozen=True, eq=False)
class RadiationProfile:
    """Per-channel samples ``G(s)`` on the symmetric cone grid ``grid.s``.

    ``parity`` records the sign tag of each channel when it is known
    (``0`` for mixed profiles such as radiation fields).
    """

    grid: Grid
    samples: Mapping[ModeIndex, np.ndarray]
    parity: Mapping[ModeIndex, int] = dc_field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for mode, arr in self.samples.items():
            a = np.array(arr, dtype=float)
            if a.shape != (2 * self.grid.M,):
                raise ValueError("cone samples must have length 2M")
            if not np.all(np.isfinite(a)):
                raise ValueError("cone samples contain NaN or inf")
            a.setflags(write=False)
            vals[mode] = a
        object.__setattr__(self, "samples", dict(sorted(vals.items())))
        par = {m: int(self.parity.get(m, 0)) for m in vals}
        object.__setattr__(self, "parity", par)
        dims = {m.d for m in vals}
        if len(dims) > 1:
            raise ValueError("all channels must share the dimension")

    @classmethod
    def from_functions(cls, grid: Grid, functions: Mapping[ModeIndex, object]):
        """Build from callables of ``s`` (or arrays on ``grid.s``)."""
        out = {}
        for mode, f in functions.items():
            out[mode] = f(np.asarray(grid.s)) if callable(f) else f
        return cls(grid, out)

    @property
    def modes(self) -> tuple[ModeIndex, ...]:
        return tuple(self.samples)

    @property
    def dimension(self) -> int | None:
        return self.modes[0].d if self.modes else None

    @property
    def s(self) -> np.ndarray:
        return self.grid.s

    def positive(self, mode: ModeIndex) -> np.ndarray:
        return self.samples[mode][self.grid.M :]

    def negative_reflected(self, mode: ModeIndex) -> np.ndarray:
        """``G(-s)`` at the positive nodes."""
        return self.samples[mode][: self.grid.M][::-1]

    def norm(self) -> float:
        tot = sum(float(np.sum(a**2)) for a in self.samples.values())
        return math.sqrt(tot * self.grid.ds)

    def half_line_energy(self, R: float) -> dict[ModeIndex, float]:
        """``int_{s > R} G^2 ds`` per channel, boundary cell cut exactly."""
        w = self.grid.exterior_weights(R)
        return {m: float(np.dot(w, self.positive(m) ** 2)) for m in self.modes}

    def restrict(self, R: float) -> "RadiationProfile":
        """Zero every cell whose centre is not in ``s > R``."""
        keep = self.grid.s > R
        return RadiationProfile(self.grid, {m: np.where(keep, a, 0.0) for m, a in self.samples.items()})

    def parity_defect(self) -> float:
        """Largest relative violation of the tagged parity over the channels."""
        worst = 0.0
        for m, p in self.parity.items():
            if p == 0:
                continue
            a = self.positive(m)
            b = self.negative_reflected(m)
            scale = max(float(np.max(np.abs(a), initial=0.0)), 1e-300)
            worst = max(worst, float(np.max(np.abs(b - p * a), initial=0.0)) / scale)
        return worst

    def _combine(self, other: "RadiationProfile", sign: float) -> "RadiationProfile":
        if self.grid != other.grid:
            raise GridMismatchError("cone grids differ")
        zero = np.zeros(2 * self.grid.M)
        modes = set(self.modes) | set(other.modes)
        out = {m: self.samples.get(m, zero) + sign * other.samples.get(m, zero) for m in modes}
        par = {}
        for m in modes:
            pa, pb = self.parity.get(m), other.parity.get(m)
            if pa is None:
                par[m] = pb
            elif pb is None or pa == pb:
                par[m] = pa
            else:
                par[m] = 0
        return RadiationProfile(self.grid, out, par)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c: float):
        return RadiationProfile(self.grid, {m: c * a for m, a in self.samples.items()}, self.parity)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def _half_T(order: int, amp: np.ndarray, grid: Grid) -> np.ndarray:
    return _cone_scale(grid) * unit_cone(order, amp)


def _half_T_inverse(order: int, pos: np.ndarray, grid: Grid) -> np.ndarray:
    return unit_cone(order, pos) / _cone_scale(grid)


def _checked(out: RadiationProfile) -> RadiationProfile:
    defect = out.parity_defect()
    if defect > 1e-12:
        raise ArithmeticError(f"internal parity violation {defect:.2e}")
    return out


def apply_T(v: RadialProfile | CauchyData, slot: str = "velocity") -> RadiationProfile:
    """``T v`` for one profile, or for the chosen slot of every channel of a state.

    ``slot`` only matters for :class:`CauchyData` (``"field"`` or ``"velocity"``).
    """
    if isinstance(v, CauchyData):
        if slot not in ("field", "velocity"):
            raise ValueError("slot must be 'field' or 'velocity'")
        table = v.field if slot == "field" else v.velocity
        grid = v.grid
        samples, par = {}, {}
        for mode, amp in table.items():
            p = transform_parity(mode)
            samples[mode] = _extend(_half_T(mode.order, amp, grid), p)
            par[mode] = p
        return _checked(RadiationProfile(grid, samples, par))
    mode, grid = v.mode, v.grid
    p = transform_parity(mode)
    return _checked(RadiationProfile(grid, {mode: _extend(_half_T(mode.order, v.amplitude, grid), p)}, {mode: p}))


def apply_dsT(v: RadialProfile | CauchyData) -> RadiationProfile:
    """``d/ds T v`` of the field slot (spectral derivative, order lowered by one)."""
    if isinstance(v, CauchyData):
        profiles = [v.profile0(m) for m in v.modes]
        grid = v.grid
    else:
        profiles = [v]
        grid = v.grid
    samples, par = {}, {}
    for p in profiles:
        sign = transform_parity(p.mode, derivative=True)
        samples[p.mode] = _extend(_half_T(p.mode.order - 1, grid.nu * p.amplitude, grid), sign)
        par[p.mode] = sign
    return _checked(RadiationProfile(grid, samples, par))


def radiation_field(state: CauchyData) -> RadiationProfile:
    """``F = d/ds T u0 - T u1``; its L2 norm equals the energy norm of the state."""
    F = apply_dsT(state) - apply_T(state, "velocity")
    return F


def invert_radiation(F: RadiationProfile, warn_origin: float = 0.1) -> CauchyData:
    """Cauchy data whose radiation field is ``F``.

    Splits each channel by parity: the ``d/ds T`` part has sign
    ``(-1)^n`` and the ``T`` part ``(-1)^(n+1)``.
    """
    grid = F.grid
    field, vel = {}, {}
    for mode in F.modes:
        sgn = -1.0 if mode.order % 2 else 1.0
        pos = F.positive(mode)
        refl = F.negative_reflected(mode)
        dsT_part = 0.5 * (pos + sgn * refl)
        # F carries -T u1, so the T part is dsT_part - F
        T_part = dsT_part - pos
        eta = _half_T_inverse(mode.order - 1, dsT_part, grid)
        phi1 = _half_T_inverse(mode.order, T_part, grid)
        field[mode] = eta / grid.nu
        vel[mode] = phi1
        low = grid.nu < grid.dnu
        total = float(np.sum(eta**2 + phi1**2))
        if total > 0 and float(np.sum(eta[low] ** 2 + phi1[low] ** 2)) > warn_origin * total:
            warnings.warn(
                f"channel {mode.as_list()}: energy concentrated near the frequency origin",
                RuntimeWarning,
                stacklevel=2,
            )
    return CauchyData(grid, field, vel)


def partial_inverse_G(F_half: RadiationProfile, slot: int, R: float) -> CauchyData:
    """One-sided inverse of ``T`` (slot 1) or ``d/ds T`` (slot 0) on ``s > R``.

    The positive half is extended by the parity of the range of the operator
    and set to zero on ``[-R, R]``; the extension is then inverted exactly.
    Returns data with only the requested slot filled.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if slot not in (0, 1):
        raise ValueError("slot must be 0 (field) or 1 (velocity)")
    grid = F_half.grid
    keep = grid.r > R
    field, vel = {}, {}
    for mode in F_half.modes:
        p = F_half.parity.get(mode, 0)
        expected = transform_parity(mode, derivative=(slot == 0))
        if p not in (0, expected):
            raise ValueError(
                f"channel {mode.as_list()}: profile tagged with parity {p}, "
                f"the range of the slot-{slot} operator has parity {expected}"
            )
        pos = np.where(keep, F_half.positive(mode), 0.0)
        if slot == 1:
            vel[mode] = _half_T_inverse(mode.order, pos, grid)
            field[mode] = np.zeros(grid.M)
        else:
            eta = _half_T_inverse(mode.order - 1, pos, grid)
            field[mode] = eta / grid.nu
            vel[mode] = np.zeros(grid.M)
    return CauchyData(grid, field, vel)


def parity_extension(F_half: RadiationProfile, slot: int, R: float) -> RadiationProfile:
    """The extension used by :func:`partial_inverse_G` (for checks)."""
    grid = F_half.grid
    keep = grid.r > R
    out, par = {}, {}
    for mode in F_half.modes:
        p = transform_parity(mode, derivative=(slot == 0))
        out[mode] = _extend(np.where(keep, F_half.positive(mode), 0.0), p)
        par[mode] = p
    return RadiationProfile(grid, out, par)


def cone_coordinates(state: CauchyData) -> dict[ModeIndex, tuple[np.ndarray, np.ndarray]]:
    """Positive halves of ``(d/ds T u0, T u1)`` per channel.

    The map is unitary from the energy space onto pairs of half-line
    profiles with the ``ds``-weighted product.
    """
    grid = state.grid
    out = {}
    for mode in state.modes:
        P = _half_T(mode.order - 1, grid.nu * state.field[mode], grid)
        Q = _half_T(mode.order, state.velocity[mode], grid)
        out[mode] = (P, Q)
    return out


def from_cone_coordinates(grid: Grid, coords) -> CauchyData:
    """Inverse of :func:`cone_coordinates`."""
    field, vel = {}, {}
    for mode, (P, Q) in coords.items():
        field[mode] = _half_T_inverse(mode.order - 1, np.asarray(P), grid) / grid.nu
        vel[mode] = _half_T_inverse(mode.order, np.asarray(Q), grid)
    return CauchyData(grid, field, vel)
