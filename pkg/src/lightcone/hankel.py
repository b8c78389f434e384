"""Per-channel Fourier-Bessel transforms and the free wave propagator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._transforms import unit_hankel
from .fields import CauchyData, Grid, ModeIndex, RadialProfile, Trajectory

__all__ = [
    "ModeTransform",
    "hankel_forward",
    "hankel_inverse",
    "free_propagate",
    "free_trajectory",
    "dalembert_oracle_d3",
]


@dataclass(frozen=True)
class ModeTransform:
    """The radial Fourier transform on one channel.

    ``forward`` maps ``psi = r^((d-1)/2) v`` samples to real amplitudes and
    ``inverse`` goes back; both are the same orthogonal matrix up to the
    factor ``sqrt(ds/dnu)``.  ``phase`` and ``scale`` turn an amplitude into
    the true Fourier coefficient, ``vhat = phase * scale * nu^(-(d-1)/2) * amp``.
    """

    mode: ModeIndex
    grid: Grid

    @property
    def order(self) -> int:
        return self.mode.order

    @property
    def phase(self) -> complex:
        return (-1j) ** self.mode.l

    @property
    def scale(self) -> float:
        return (2 * math.pi) ** (self.mode.d / 2)

    def forward(self, psi: np.ndarray) -> np.ndarray:
        return self.grid.to_amplitude(self.order, psi)

    def inverse(self, amp: np.ndarray) -> np.ndarray:
        return self.grid.from_amplitude(self.order, amp)

    def kernel(self) -> np.ndarray:
        """Dense orthonormal kernel (rows: frequency, columns: radius)."""
        return unit_hankel(self.order, np.eye(self.grid.M))

    def fourier_coefficient(self, amp: np.ndarray) -> np.ndarray:
        nu = self.grid.nu
        return self.phase * self.scale * nu ** (-(self.mode.d - 1) / 2) * amp


def hankel_forward(mode: ModeIndex, grid: Grid, values, check_tail=True) -> RadialProfile:
    """Spectral profile of the radial samples ``v(r_j)``.

    Raises on NaN, warns on mass near ``r_max`` and raises if it exceeds the
    error threshold (see :mod:`lightcone.fields`).
    """
    return RadialProfile.from_physical(mode, grid, values, check_tail=check_tail)


def hankel_inverse(profile: RadialProfile) -> np.ndarray:
    """Physical samples ``v(r_j)`` of a spectral profile."""
    return profile.physical


def _rotate(eta, phi1, t, nu):
    c, s = np.cos(t * nu), np.sin(t * nu)
    return c * eta + s * phi1, -s * eta + c * phi1


def free_propagate(state: CauchyData, t: float) -> CauchyData:
    """``S_L(t)``: rotate ``(nu * amp0, amp1)`` by the angle ``t * nu``."""
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("time must be finite")
    if t == 0.0:
        return state
    nu = state.grid.nu
    field, vel = {}, {}
    for mode in state.modes:
        eta, phi1 = _rotate(nu * state.field[mode], state.velocity[mode], t, nu)
        field[mode] = eta / nu
        vel[mode] = phi1
    return CauchyData(state.grid, field, vel)


def free_trajectory(state: CauchyData, times) -> Trajectory:
    """Free evolution sampled at ``times``."""
    times = np.asarray(times, dtype=float)
    nu = state.grid.nu
    tn = np.outer(times, nu)
    c, s = np.cos(tn), np.sin(tn)
    field, vel = {}, {}
    for mode in state.modes:
        eta0 = nu * state.field[mode]
        phi1 = state.velocity[mode]
        field[mode] = (c * eta0 + s * phi1) / nu
        vel[mode] = -s * eta0 + c * phi1
    return Trajectory(state.grid, times, field, vel)


def dalembert_oracle_d3(state: CauchyData, t: float) -> RadialProfile:
    """Physical-space d=3 radial evolution, for cross-checks only.

    ``w = r u`` solves the 1-d wave equation on the half line with ``w(0) = 0``;
    with odd extensions ``w(t, r) = (w0(r+t) + w0(r-t))/2 + (W1(r+t) - W1(r-t))/2``
    where ``W1`` is an antiderivative of ``w1``.  Returns the field slot.
    """
    modes = state.modes
    if any(m.d != 3 or m.l != 0 for m in modes) or len(modes) > 1:
        raise ValueError("the d'Alembert oracle needs a single radial d=3 channel")
    grid = state.grid
    mode = modes[0] if modes else ModeIndex(3, 0)
    if t == 0.0:
        return state.profile0(mode)
    w0 = state.profile0(mode).psi
    w1 = state.profile1(mode).psi
    s = grid.s
    w0_ext = np.concatenate([-w0[::-1], w0])
    w1_ext = np.concatenate([-w1[::-1], w1])
    # antiderivative at cell centres; an even function, so the constant cancels
    W1 = np.cumsum(w1_ext) * grid.ds - 0.5 * w1_ext * grid.ds
    r = grid.r

    def sample(arr, x):
        return np.interp(x, s, arr, left=0.0, right=0.0)

    w = 0.5 * (sample(w0_ext, r + t) + sample(w0_ext, r - t))
    # outside the grid the antiderivative is constant, not zero
    W1r = np.interp(r + t, s, W1, left=W1[0], right=W1[-1])
    W1l = np.interp(r - t, s, W1, left=W1[0], right=W1[-1])
    w += 0.5 * (W1r - W1l)
    return RadialProfile.from_physical(mode, grid, w / r, check_tail=False)
