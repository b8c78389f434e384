"""Domain types, grids and the discrete energy/Strichartz-type norms.

A state lives on one :class:`Grid`.  Each spherical-harmonic channel stores a
real *amplitude* on the frequency nodes,

    amp(nu) = (2 pi)^(-d/2) nu^((d-1)/2) b(nu),    vhat(nu w) = (-i)^l b(nu) Y(w),

which is the unitary normalization of the Fourier coefficient: the L2 norm of
the channel is ``sum(amp**2) * dnu`` and its H1 seminorm is
``sum((nu * amp)**2) * dnu``.  Physical samples are derived on demand.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy import integrate, special

from ._transforms import unit_hankel

__all__ = [
    "GridMismatchError",
    "TruncationError",
    "TruncationWarning",
    "ModeIndex",
    "RadialGrid",
    "FrequencyGrid",
    "Grid",
    "RadialProfile",
    "CauchyData",
    "Trajectory",
    "SourceTerm",
    "sphere_area",
    "harmonic_dimension",
    "h_inner",
    "h_norm",
    "norm_W",
    "norm_N",
    "norm_X",
    "physical_h_inner",
    "radial_coefficient",
    "lebesgue_norm_radial",
    "zonal_harmonic",
]

SUPPORTED_DIMENSIONS = (3, 5)
TAIL_WARN = 1e-10
TAIL_ERROR = 1e-4


class GridMismatchError(ValueError):
    """Two objects live on grids without a common refinement."""


class TruncationError(ValueError):
    """A profile carries too much mass near the outer edge of the grid."""


class TruncationWarning(UserWarning):
    pass


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def harmonic_dimension(l: int, d: int) -> int:
    """Dimension of the degree-``l`` spherical harmonics on S^(d-1)."""
    if l < 0:
        return 0
    first = math.comb(l + d - 1, d - 1)
    second = math.comb(l + d - 3, d - 1) if l >= 2 else 0
    return first - second


@dataclass(frozen=True, order=True)
class ModeIndex:
    """A spherical-harmonic channel ``Y_(l, m)`` on S^(d-1)."""

    d: int
    l: int = 0
    m: int = 0

    def __post_init__(self):
        if self.d not in SUPPORTED_DIMENSIONS:
            raise ValueError(
                f"dimension {self.d} not supported: only odd d in {SUPPORTED_DIMENSIONS}"
            )
        if self.l < 0:
            raise ValueError("harmonic degree must be >= 0")
        if not 0 <= self.m < harmonic_dimension(self.l, self.d):
            raise ValueError(f"multiplicity slot {self.m} out of range for l={self.l}")

    @property
    def order(self) -> int:
        """Riccati-Bessel order of the radial reduction."""
        return self.l + (self.d - 3) // 2

    @property
    def parity(self) -> int:
        """Antipodal factor: ``Y(-w) = parity * Y(w)``."""
        return -1 if self.l % 2 else 1

    @property
    def angular_weight(self) -> int:
        """``l (l + d - 2)``, the eigenvalue of the spherical Laplacian."""
        return self.l * (self.l + self.d - 2)

    def as_list(self) -> list[int]:
        return [self.d, self.l, self.m]


@dataclass(frozen=True, eq=False)
class RadialGrid:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.nodes) <= 0) or self.nodes[0] <= 0:
            raise ValueError("radial nodes must be positive and strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1] + 0.5 * self.weights[-1])


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes[0] <= 0:
            raise ValueError("the frequency origin is excluded from the grid")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("frequency nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def rho_max(self) -> float:
        return float(self.nodes[-1] + 0.5 * self.weights[-1])


@dataclass(frozen=True)
class Grid:
    """Paired radial, frequency and light-cone grids.

    ``r_j = (j + 1/2) ds`` for ``j < M`` with ``ds = s_max / M``; the cone
    variable runs over ``+-r_j`` and ``nu_k = (k + 1/2) dnu`` with
    ``dnu = pi / s_max`` so that ``rho_max = pi M / s_max``.  All quadratures
    are composite midpoint rules on these cells.
    """

    M: int = 2048
    s_max: float = 32.0

    def __post_init__(self):
        if self.M < 8:
            raise ValueError("need at least 8 nodes")
        if not self.s_max > 0:
            raise ValueError("s_max must be positive")

    @cached_property
    def ds(self) -> float:
        return self.s_max / self.M

    @cached_property
    def dnu(self) -> float:
        return math.pi / self.s_max

    @cached_property
    def r(self) -> np.ndarray:
        r = (np.arange(self.M) + 0.5) * self.ds
        r.setflags(write=False)
        return r

    @cached_property
    def nu(self) -> np.ndarray:
        nu = (np.arange(self.M) + 0.5) * self.dnu
        nu.setflags(write=False)
        return nu

    @cached_property
    def s(self) -> np.ndarray:
        s = np.concatenate([-self.r[::-1], self.r])
        s.setflags(write=False)
        return s

    @property
    def rho_max(self) -> float:
        return self.M * self.dnu

    @property
    def radial(self) -> RadialGrid:
        return RadialGrid(self.r, np.full(self.M, self.ds))

    @property
    def frequency(self) -> FrequencyGrid:
        return FrequencyGrid(self.nu, np.full(self.M, self.dnu))

    def descriptor(self) -> dict:
        return {"M": self.M, "s_max": self.s_max, "ds": self.ds, "dnu": self.dnu}

    def exterior_weights(self, radius: float) -> np.ndarray:
        """Midpoint weights for the integral over ``r > radius`` (cells cut exactly)."""
        left = self.r - 0.5 * self.ds
        frac = np.clip((left + self.ds - radius) / self.ds, 0.0, 1.0)
        return frac * self.ds

    def interior_mask(self, radius: float) -> np.ndarray:
        """Cells whose centre lies in ``r < radius``."""
        return self.r < radius

    # unitary amplitude <-> half-line sample maps
    def to_amplitude(self, order: int, samples: np.ndarray) -> np.ndarray:
        return math.sqrt(self.ds / self.dnu) * unit_hankel(order, samples)

    def from_amplitude(self, order: int, amp: np.ndarray) -> np.ndarray:
        return math.sqrt(self.dnu / self.ds) * unit_hankel(order, amp)


def _check_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}; no interpolation between grids")


def _check_tail(psi: np.ndarray, grid: Grid, check: bool | str) -> None:
    if not check:
        return
    total = float(np.sum(psi**2))
    if total == 0.0:
        return
    tail = float(np.sum(psi[grid.r > 0.9 * grid.s_max] ** 2)) / total
    if tail > TAIL_ERROR:
        raise TruncationError(
            f"profile not decayed at r_max={grid.s_max}: tail mass {tail:.3e} of the L2 mass"
        )
    if tail > TAIL_WARN:
        warnings.warn(
            f"profile tail mass {tail:.3e} beyond 0.9 r_max; expect truncation error",
            TruncationWarning,
            stacklevel=3,
        )


def _as_samples(values, grid: Grid) -> np.ndarray:
    if callable(values):
        values = values(np.asarray(grid.r))
    out = np.broadcast_to(np.asarray(values, dtype=float), (grid.M,)).copy()
    if not np.all(np.isfinite(out)):
        raise ValueError("profile samples contain NaN or inf")
    return out


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """One channel's radial coefficient, stored by its spectral amplitude."""

    mode: ModeIndex
    grid: Grid
    amplitude: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=float)
        if amp.shape != (self.grid.M,):
            raise ValueError("amplitude length does not match the grid")
        if not np.all(np.isfinite(amp)):
            raise ValueError("profile contains NaN or inf")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    @classmethod
    def zeros(cls, mode: ModeIndex, grid: Grid) -> "RadialProfile":
        return cls(mode, grid, np.zeros(grid.M))

    @classmethod
    def from_physical(cls, mode: ModeIndex, grid: Grid, values, check_tail=True):
        """Profile from radial samples ``v(r_j)`` (or a callable of ``r``)."""
        v = _as_samples(values, grid)
        psi = grid.r ** ((mode.d - 1) / 2) * v
        _check_tail(psi, grid, check_tail)
        return cls(mode, grid, grid.to_amplitude(mode.order, psi))

    @classmethod
    def from_gradient(cls, mode: ModeIndex, grid: Grid, values, derivative, check_tail=True):
        """Field-slot profile from ``v`` and ``dv/dr``.

        Goes through ``chi = r^((d-1)/2) (v' + (l + d - 2) v / r)`` and the
        order ``n - 1`` transform, which is exact for compactly supported
        ``chi`` and avoids differentiating samples.
        """
        v = _as_samples(values, grid)
        dv = _as_samples(derivative, grid)
        r = grid.r
        chi = r ** ((mode.d - 1) / 2) * (dv + (mode.l + mode.d - 2) * v / r)
        _check_tail(chi, grid, check_tail)
        eta = grid.to_amplitude(mode.order - 1, chi)
        return cls(mode, grid, eta / grid.nu)

    @classmethod
    def from_spectral(cls, mode: ModeIndex, grid: Grid, spectral) -> "RadialProfile":
        """Inverse of :attr:`spectral`; the phase must be ``(-i)^l``."""
        spec = np.asarray(spectral, dtype=complex)
        b = spec / (-1j) ** mode.l
        if np.max(np.abs(b.imag), initial=0.0) > 1e-12 * max(np.max(np.abs(b), initial=0.0), 1e-300):
            raise ValueError("spectral samples do not carry the (-i)^l phase of a real profile")
        amp = (2 * math.pi) ** (-mode.d / 2) * grid.nu ** ((mode.d - 1) / 2) * b.real
        return cls(mode, grid, amp)

    @property
    def spectral(self) -> np.ndarray:
        """Fourier coefficient of ``Y_l`` in ``vhat(rho w)`` at the frequency nodes."""
        d = self.mode.d
        b = (2 * math.pi) ** (d / 2) * self.grid.nu ** (-(d - 1) / 2) * self.amplitude
        return (-1j) ** self.mode.l * b

    @cached_property
    def psi(self) -> np.ndarray:
        """``r^((d-1)/2) v(r)`` at the radial nodes."""
        return self.grid.from_amplitude(self.mode.order, self.amplitude)

    @cached_property
    def chi(self) -> np.ndarray:
        """``r^((d-1)/2) (v' + (l + d - 2) v / r)``; its square integrates to the H1 seminorm."""
        return self.grid.from_amplitude(self.mode.order - 1, self.grid.nu * self.amplitude)

    @property
    def physical(self) -> np.ndarray:
        return self.psi * self.grid.r ** (-(self.mode.d - 1) / 2)

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(self.amplitude**2)) * self.grid.dnu)

    def h1_seminorm(self) -> float:
        return math.sqrt(float(np.sum((self.grid.nu * self.amplitude) ** 2)) * self.grid.dnu)


def _freeze(mapping: Mapping[ModeIndex, np.ndarray], M: int) -> dict[ModeIndex, np.ndarray]:
    out = {}
    for mode, arr in mapping.items():
        if not isinstance(mode, ModeIndex):
            raise TypeError("keys must be ModeIndex")
        a = np.array(arr, dtype=float)
        if a.shape[-1] != M:
            raise ValueError("amplitude length does not match the grid")
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite amplitudes")
        a.setflags(write=False)
        out[mode] = a
    return out


@dataclass(frozen=True, eq=False)
class CauchyData:
    """Data ``(u0, u1)`` in H1-dot x L2 as channel amplitudes on one grid.

    ``field[mode]`` is the amplitude of ``u0`` and ``velocity[mode]`` the
    amplitude of ``u1``; missing slots are zero.
    """

    grid: Grid
    field: Mapping[ModeIndex, np.ndarray] = dc_field(default_factory=dict)
    velocity: Mapping[ModeIndex, np.ndarray] = dc_field(default_factory=dict)

    def __post_init__(self):
        f = _freeze(self.field, self.grid.M)
        v = _freeze(self.velocity, self.grid.M)
        zero = np.zeros(self.grid.M)
        zero.setflags(write=False)
        for mode in set(f) | set(v):
            f.setdefault(mode, zero)
            v.setdefault(mode, zero)
        dims = {m.d for m in f}
        if len(dims) > 1:
            raise ValueError("all channels must share the dimension")
        object.__setattr__(self, "field", dict(sorted(f.items())))
        object.__setattr__(self, "velocity", dict(sorted(v.items())))

    # construction helpers
    @classmethod
    def zeros(cls, grid: Grid, modes: Iterable[ModeIndex] = ()) -> "CauchyData":
        z = {m: np.zeros(grid.M) for m in modes}
        return cls(grid, z, dict(z))

    @classmethod
    def from_profiles(cls, u0: Iterable[RadialProfile] = (), u1: Iterable[RadialProfile] = ()):
        u0, u1 = list(u0), list(u1)
        grids = {p.grid for p in u0 + u1}
        if len(grids) != 1:
            raise GridMismatchError("profiles must share one grid")
        grid = grids.pop()
        return cls(grid, {p.mode: p.amplitude for p in u0}, {p.mode: p.amplitude for p in u1})

    @classmethod
    def from_functions(cls, grid: Grid, mode: ModeIndex, u0=None, u1=None, du0=None, check_tail=True):
        """Single-channel data from radial coefficient functions of ``r``.

        With ``du0`` the field slot is built from its derivative (see
        :meth:`RadialProfile.from_gradient`).
        """
        p0 = None
        if u0 is not None:
            if du0 is not None:
                p0 = RadialProfile.from_gradient(mode, grid, u0, du0, check_tail)
            else:
                p0 = RadialProfile.from_physical(mode, grid, u0, check_tail)
        p1 = RadialProfile.from_physical(mode, grid, u1, check_tail) if u1 is not None else None
        f = {mode: p0.amplitude} if p0 is not None else {mode: np.zeros(grid.M)}
        v = {mode: p1.amplitude} if p1 is not None else {mode: np.zeros(grid.M)}
        return cls(grid, f, v)

    @property
    def modes(self) -> tuple[ModeIndex, ...]:
        return tuple(self.field)

    @property
    def dimension(self) -> int | None:
        return self.modes[0].d if self.modes else None

    def profile0(self, mode: ModeIndex) -> RadialProfile:
        amp = self.field.get(mode)
        return RadialProfile(mode, self.grid, amp if amp is not None else np.zeros(self.grid.M))

    def profile1(self, mode: ModeIndex) -> RadialProfile:
        amp = self.velocity.get(mode)
        return RadialProfile(mode, self.grid, amp if amp is not None else np.zeros(self.grid.M))

    def _combine(self, other: "CauchyData", op) -> "CauchyData":
        _check_grid(self.grid, other.grid)
        zero = np.zeros(self.grid.M)
        modes = set(self.modes) | set(other.modes)
        f = {m: op(self.field.get(m, zero), other.field.get(m, zero)) for m in modes}
        v = {m: op(self.velocity.get(m, zero), other.velocity.get(m, zero)) for m in modes}
        return CauchyData(self.grid, f, v)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c: float):
        return CauchyData(
            self.grid,
            {m: c * a for m, a in self.field.items()},
            {m: c * a for m, a in self.velocity.items()},
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def time_reversed(self) -> "CauchyData":
        """``(u0, -u1)``."""
        return CauchyData(self.grid, self.field, {m: -a for m, a in self.velocity.items()})

    def h_norm(self) -> float:
        return h_norm(self)


def h_inner(a: CauchyData, b: CauchyData) -> float:
    """Inner product of H1-dot x L2, summed over channels (zero-padded)."""
    _check_grid(a.grid, b.grid)
    nu2 = a.grid.nu**2
    total = 0.0
    for mode in set(a.modes) & set(b.modes):
        total += float(np.dot(nu2 * a.field[mode], b.field[mode]))
        total += float(np.dot(a.velocity[mode], b.velocity[mode]))
    return total * a.grid.dnu


def h_norm(a: CauchyData) -> float:
    return math.sqrt(max(h_inner(a, a), 0.0))


def _check_times(times: np.ndarray) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("need a nonempty 1-d array of time nodes")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time nodes must be strictly increasing")
    t = t.copy()
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States at time nodes; arrays are ``(K, M)`` per channel."""

    grid: Grid
    times: np.ndarray
    field: Mapping[ModeIndex, np.ndarray]
    velocity: Mapping[ModeIndex, np.ndarray]

    def __post_init__(self):
        t = _check_times(self.times)
        object.__setattr__(self, "times", t)
        f = _freeze(self.field, self.grid.M)
        v = _freeze(self.velocity, self.grid.M)
        if set(f) != set(v):
            raise ValueError("field and velocity must cover the same channels")
        for a in list(f.values()) + list(v.values()):
            if a.shape != (t.size, self.grid.M):
                raise ValueError("trajectory arrays must be (K, M)")
        object.__setattr__(self, "field", dict(sorted(f.items())))
        object.__setattr__(self, "velocity", dict(sorted(v.items())))

    @property
    def modes(self) -> tuple[ModeIndex, ...]:
        return tuple(self.field)

    @property
    def window(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def index(self, t: float, tol: float = 1e-9) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a node of the trajectory")
        return i

    def state(self, i: int) -> CauchyData:
        return CauchyData(
            self.grid,
            {m: a[i] for m, a in self.field.items()},
            {m: a[i] for m, a in self.velocity.items()},
        )

    def at(self, t: float) -> CauchyData:
        return self.state(self.index(t))

    def field_psi(self, mode: ModeIndex) -> np.ndarray:
        """``r^((d-1)/2) u(t, r)`` for every node, shape ``(K, M)``."""
        return self.grid.from_amplitude(mode.order, self.field[mode])

    def physical_field(self, mode: ModeIndex) -> np.ndarray:
        return self.field_psi(mode) * self.grid.r ** (-(mode.d - 1) / 2)

    def __add__(self, other: "Trajectory") -> "Trajectory":
        _check_grid(self.grid, other.grid)
        if self.times.shape != other.times.shape or np.any(self.times != other.times):
            raise ValueError("trajectories must share time nodes")
        zero = np.zeros((self.times.size, self.grid.M))
        modes = set(self.modes) | set(other.modes)
        return Trajectory(
            self.grid,
            self.times,
            {m: self.field.get(m, zero) + other.field.get(m, zero) for m in modes},
            {m: self.velocity.get(m, zero) + other.velocity.get(m, zero) for m in modes},
        )

    def __mul__(self, c: float) -> "Trajectory":
        return Trajectory(
            self.grid,
            self.times,
            {m: c * a for m, a in self.field.items()},
            {m: c * a for m, a in self.velocity.items()},
        )

    __rmul__ = __mul__

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        return self + (-1.0) * other

    def h_norms(self) -> np.ndarray:
        nu2 = self.grid.nu**2
        tot = np.zeros(self.times.size)
        for m in self.modes:
            tot += (self.field[m] ** 2) @ nu2 + np.sum(self.velocity[m] ** 2, axis=1)
        return np.sqrt(tot * self.grid.dnu)


@dataclass(frozen=True, eq=False)
class SourceTerm:
    """Forcing ``h(t)`` in the L2 slot, compactly supported in time."""

    grid: Grid
    times: np.ndarray
    values: Mapping[ModeIndex, np.ndarray]
    support: tuple[float, float] | None = None

    def __post_init__(self):
        t = _check_times(self.times)
        object.__setattr__(self, "times", t)
        vals = _freeze(self.values, self.grid.M)
        for a in vals.values():
            if a.shape != (t.size, self.grid.M):
                raise ValueError("source arrays must be (K, M)")
        object.__setattr__(self, "values", dict(sorted(vals.items())))
        active = np.zeros(t.size, dtype=bool)
        for a in vals.values():
            active |= np.any(a != 0.0, axis=1)
        if self.support is None:
            if active.any():
                idx = np.flatnonzero(active)
                lo, hi = max(idx[0] - 1, 0), min(idx[-1] + 1, t.size - 1)
                support = (float(t[lo]), float(t[hi]))
            else:
                support = (float(t[0]), float(t[0]))
            object.__setattr__(self, "support", support)
        else:
            a, b = map(float, self.support)
            if not (t[0] <= a <= b <= t[-1]):
                raise ValueError("declared support must lie within the time nodes")
            outside = (t < a - 1e-12) | (t > b + 1e-12)
            if np.any(active & outside):
                raise ValueError("source does not vanish outside its declared support")
            object.__setattr__(self, "support", (a, b))

    @classmethod
    def from_physical(cls, grid: Grid, times, samples: Mapping[ModeIndex, np.ndarray], support=None):
        """Source from radial samples ``h(t_i, r_j)`` per channel."""
        vals = {}
        for mode, arr in samples.items():
            arr = np.asarray(arr, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise ValueError("source samples contain NaN or inf")
            psi = arr * grid.r ** ((mode.d - 1) / 2)
            vals[mode] = grid.to_amplitude(mode.order, psi)
        return cls(grid, times, vals, support)

    @property
    def modes(self) -> tuple[ModeIndex, ...]:
        return tuple(self.values)

    def l2_norms(self) -> np.ndarray:
        tot = np.zeros(self.times.size)
        for a in self.values.values():
            tot += np.sum(a**2, axis=1)
        return np.sqrt(tot * self.grid.dnu)

    def __add__(self, other: "SourceTerm") -> "SourceTerm":
        _check_grid(self.grid, other.grid)
        if np.any(self.times != other.times):
            raise ValueError("sources must share time nodes")
        zero = np.zeros((self.times.size, self.grid.M))
        modes = set(self.modes) | set(other.modes)
        return SourceTerm(
            self.grid, self.times, {m: self.values.get(m, zero) + other.values.get(m, zero) for m in modes}
        )

    def __mul__(self, c: float) -> "SourceTerm":
        return SourceTerm(self.grid, self.times, {m: c * a for m, a in self.values.items()}, self.support)

    __rmul__ = __mul__


def _time_integral(values: np.ndarray, times: np.ndarray) -> float:
    if times.size == 1:
        return 0.0
    return float(integrate.trapezoid(values, times))


def norm_N(src: SourceTerm) -> float:
    """``int ||h(t)||_L2 dt`` (trapezoid in time)."""
    return _time_integral(src.l2_norms(), src.times)


def _critical_exponent(d: int) -> float:
    return (d + 2) / (d - 2)


def lebesgue_norm_radial(psi: np.ndarray, grid: Grid, d: int, p: float) -> np.ndarray:
    """``||u||_{L^p(R^d)}`` for radial ``u = v Y_0`` given ``psi = r^((d-1)/2) v``.

    Works row-wise on ``(K, M)`` input.
    """
    area = sphere_area(d)
    v = psi * grid.r ** (-(d - 1) / 2)
    integral = np.sum(np.abs(v) ** p * grid.r ** (d - 1), axis=-1) * grid.ds
    return (area ** (1 - p / 2) * integral) ** (1 / p)


def norm_W(tr: Trajectory) -> float:
    """``(int ||u(t)||_{L^{2q}}^q dt)^(1/q)``, radial channels only."""
    if not tr.modes:
        return 0.0
    d = tr.modes[0].d
    q = _critical_exponent(d)
    if any(m.l != 0 for m in tr.modes):
        raise ValueError(
            "the W norm is implemented for radial (l = 0) states only; "
            "project onto the radial channel first"
        )
    psi = sum(tr.field_psi(m) for m in tr.modes)
    spatial = lebesgue_norm_radial(psi, tr.grid, d, 2 * q)
    return _time_integral(spatial**q, tr.times) ** (1 / q)


def norm_X(tr: Trajectory) -> float:
    """``sup ||u||_H1 + sup ||u_t||_L2 + ||u||_W``."""
    nu2 = tr.grid.nu**2
    h1 = np.zeros(tr.times.size)
    l2 = np.zeros(tr.times.size)
    for m in tr.modes:
        h1 += (tr.field[m] ** 2) @ nu2
        l2 += np.sum(tr.velocity[m] ** 2, axis=1)
    sup = math.sqrt(float(h1.max()) * tr.grid.dnu) + math.sqrt(float(l2.max()) * tr.grid.dnu)
    return sup + norm_W(tr)


def physical_h_inner(a: CauchyData, b: CauchyData) -> float:
    """The same inner product by radial quadrature of the physical views.

    ``int (a0' b0' + l(l+d-2) a0 b0 / r^2) r^(d-1) dr + int a1 b1 r^(d-1) dr``
    with one-sided finite differences for the derivative.  Used as a check.
    """
    _check_grid(a.grid, b.grid)
    r = a.grid.r
    total = 0.0
    for mode in set(a.modes) & set(b.modes):
        w = r ** (mode.d - 1) * a.grid.ds
        fa, fb = a.profile0(mode).physical, b.profile0(mode).physical
        ga, gb = np.gradient(fa, r), np.gradient(fb, r)
        total += float(np.sum((ga * gb + mode.angular_weight * fa * fb / r**2) * w))
        total += float(np.sum(a.profile1(mode).physical * b.profile1(mode).physical * w))
    return total


def radial_coefficient(d: int) -> float:
    """Factor turning a radial function into its ``Y_0`` coefficient."""
    return math.sqrt(sphere_area(d))


def zonal_harmonic(l: int, d: int, cos_theta):
    """Normalized zonal harmonic of degree ``l`` on S^(d-1) (used by the FFT checks)."""
    lam = (d - 2) / 2
    x = np.asarray(cos_theta, dtype=float)
    if lam == 0.5:
        poly = special.eval_legendre(l, x)
        norm = math.sqrt((2 * l + 1) / (4 * math.pi))
        return norm * poly
    poly = special.eval_gegenbauer(l, lam, x)
    # ||C_l^lam(w . e)||^2 over the sphere
    area_lower = sphere_area(d - 1)
    sq = area_lower * math.pi * 2 ** (1 - 2 * lam) * math.gamma(l + 2 * lam) / (
        math.factorial(l) * (l + lam) * math.gamma(lam) ** 2
    )
    return poly / math.sqrt(sq)
