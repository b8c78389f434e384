"""Test data shared by the CLI, the demos and the test-suite."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .fields import CauchyData, Grid, ModeIndex, RadialProfile, SourceTerm, radial_coefficient
from .plr import PlrElement, materialize
from .radiation import RadiationProfile

__all__ = [
    "smooth_bump",
    "smooth_bump_derivative",
    "indicator_state",
    "bump_state",
    "compact_state",
    "plr_member",
    "random_bandlimited_state",
    "random_compact_source",
    "gaussian_source",
    "radiation_bump",
    "profile_suite",
    "suite_profile",
]


def smooth_bump(x):
    """``exp(-1/(1 - x^2))`` on ``|x| < 1``, zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def smooth_bump_derivative(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi**2)) * (-2 * xi / (1.0 - xi**2) ** 2)
    return out


def indicator_state(grid: Grid, d: int = 3, a: float = 1.0, b: float = 2.0, slot: str = "velocity") -> CauchyData:
    """Radial data equal to ``1`` on ``a < |x| < b`` in one slot."""
    mode = ModeIndex(d, 0)
    c = radial_coefficient(d)

    def v(r):
        return c * ((r > a) & (r < b))

    if slot == "velocity":
        return CauchyData.from_functions(grid, mode, u1=v)
    return CauchyData.from_functions(grid, mode, u0=v)


def bump_state(grid: Grid, mode: ModeIndex, center=3.0, width=1.0, field=1.0, velocity=1.0) -> CauchyData:
    """``r^l exp(-((r - c)/w)^2)`` in both slots, built from the analytic derivative."""
    l = mode.l

    def f(r):
        return r**l * np.exp(-(((r - center) / width) ** 2))

    def df(r):
        g = np.exp(-(((r - center) / width) ** 2))
        lead = l * r ** (l - 1) * g if l else 0.0
        return lead - 2 * (r - center) / width**2 * f(r)

    u0 = (lambda r: field * f(r)) if field else None
    du0 = (lambda r: field * df(r)) if field else None
    u1 = (lambda r: velocity * f(r)) if velocity else None
    return CauchyData.from_functions(grid, mode, u0=u0, du0=du0, u1=u1)


def compact_state(grid: Grid, mode: ModeIndex, R: float, field=1.0, velocity=1.0) -> CauchyData:
    """Smooth data supported in ``r < R`` (vanishing to all orders at ``R``)."""
    c, w = 0.5 * R, 0.49 * R

    def f(r):
        return field * r**mode.l * smooth_bump((r - c) / w)

    def df(r):
        lead = mode.l * r ** (mode.l - 1) * smooth_bump((r - c) / w) if mode.l else 0.0
        return field * (lead + r**mode.l * smooth_bump_derivative((r - c) / w) / w)

    def g(r):
        return velocity * r**mode.l * smooth_bump((r - c) / w)

    return CauchyData.from_functions(grid, mode, u0=f, du0=df, u1=g)


def plr_member(grid: Grid, mode: ModeIndex, R: float, field=None, velocity=None) -> CauchyData:
    """Materialized tails, e.g. ``field={0: 1.0}`` for ``f_0``."""
    e = PlrElement(R, {mode: dict(field or {})}, {mode: dict(velocity or {})}, CauchyData.zeros(grid, [mode]))
    return materialize(e)


def random_bandlimited_state(grid: Grid, mode: ModeIndex, rng, cutoff: float = 4.0) -> CauchyData:
    """Random amplitudes with a Gaussian frequency envelope, normalized to unit energy."""
    env = np.exp(-((grid.nu / cutoff) ** 2))
    a0 = rng.standard_normal(grid.M) * env / grid.nu
    a1 = rng.standard_normal(grid.M) * env
    s = CauchyData(grid, {mode: a0}, {mode: a1})
    return s * (1.0 / s.h_norm())


def gaussian_source(grid: Grid, mode: ModeIndex, times, t0=0.0, tau=0.5, r0=1.5, width=0.5, amp=1.0) -> SourceTerm:
    """``amp * exp(-((t - t0)/tau)^2 - ((r - r0)/width)^2) r^l``, cut to exact zero outside 4 tau."""
    times = np.asarray(times, dtype=float)
    T, Rr = np.meshgrid(times, grid.r, indexing="ij")
    env = np.exp(-(((T - t0) / tau) ** 2))
    env = np.where(np.abs(T - t0) < 4 * tau, env, 0.0)
    vals = amp * env * np.exp(-(((Rr - r0) / width) ** 2)) * Rr**mode.l
    return SourceTerm.from_physical(grid, times, {mode: vals})


def random_compact_source(grid: Grid, mode: ModeIndex, times, rng) -> SourceTerm:
    """Smooth source compactly supported in time, randomized position and shape."""
    times = np.asarray(times, dtype=float)
    t0 = rng.uniform(-1.0, 1.0)
    tau = rng.uniform(0.5, 1.0)
    T, Rr = np.meshgrid(times, grid.r, indexing="ij")
    tw = smooth_bump((T - t0) / (2 * tau))
    vals = np.zeros_like(T)
    for _ in range(3):
        r0 = rng.uniform(0.5, 3.0)
        w = rng.uniform(0.3, 1.0)
        vals += rng.standard_normal() * np.exp(-(((Rr - r0) / w) ** 2))
    vals *= tw * Rr**mode.l
    return SourceTerm.from_physical(grid, times, {mode: vals})


def radiation_bump(grid: Grid, mode: ModeIndex, norm: float = 0.05, center=1.0, width=0.5) -> RadiationProfile:
    """Smooth profile of mixed parity, scaled to the given L2 norm."""
    s = grid.s
    G = np.exp(-(((s - center) / width) ** 2)) * (1 + s)
    F = RadiationProfile(grid, {mode: G})
    return F * (norm / F.norm())


# ten smooth profiles per channel: r^l P(r) exp(-a (r - c)^2)
_SUITE = [
    (1.0, 2.0, 0.0),
    (2.0, 3.0, 0.0),
    (0.5, 4.0, 0.0),
    (4.0, 2.5, 0.0),
    (1.0, 0.0, 0.0),
    (3.0, 0.0, 0.0),
    (1.5, 1.0, 0.5),
    (0.8, 3.5, -0.2),
    (2.5, 1.5, 1.0),
    (1.2, 5.0, 0.3),
]


def suite_profile(mode: ModeIndex, k: int):
    """Callable for the ``k``-th suite profile of a channel."""
    a, c, beta = _SUITE[k]
    l = mode.l

    def v(r):
        r = np.asarray(r, dtype=float)
        return r**l * (1 + beta * r) * np.exp(-a * (r - c) ** 2)

    return v


def profile_suite(grid: Grid, mode: ModeIndex):
    """``[(profile, exact L2 norm)]`` with the norm from adaptive quadrature."""
    out = []
    for k in range(len(_SUITE)):
        v = suite_profile(mode, k)
        val, _ = integrate.quad(lambda r: float(v(r)) ** 2 * r ** (mode.d - 1), 0, np.inf, epsabs=0, epsrel=1e-13, limit=400)
        out.append((RadialProfile.from_physical(mode, grid, v), math.sqrt(val)))
    return out
