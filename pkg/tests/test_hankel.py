import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from lightcone import CauchyData, Grid, ModeIndex, RadialProfile, free_propagate, free_trajectory, hankel_forward, hankel_inverse
from lightcone.hankel import ModeTransform, dalembert_oracle_d3
from lightcone.suites import bump_state, indicator_state


def shell_transform(nu, a=1.0, b=2.0):
    """Fourier transform of the indicator of a < |x| < b in R^3."""

    def prim(r):
        return np.sin(nu * r) - nu * r * np.cos(nu * r)

    return 4 * math.pi * (prim(b) - prim(a)) / nu**3


def test_shell_indicator_closed_form():
    g = Grid(4096, 16.0)
    m = ModeIndex(3, 0)
    c = math.sqrt(4 * math.pi)
    p = RadialProfile.from_physical(m, g, lambda r: c * ((r > 1) & (r < 2)))
    coef = ModeTransform(m, g).fourier_coefficient(p.amplitude)
    low = g.nu < 6.0
    # coefficient times Y_0 = 1/sqrt(4 pi) is the 3d transform
    got = (coef[low] / c).real
    want = shell_transform(g.nu[low])
    assert np.max(np.abs(got - want)) < 2e-3 * np.max(np.abs(want))
    assert np.max(np.abs(coef[low].imag)) == 0.0


def test_fft_oracle_l1():
    # u(x) = x_3 exp(-|x|^2) = r e^{-r^2} sqrt(4 pi / 3) Y_10
    n, L = 64, 6.0
    x = (np.arange(n) - n // 2) * (2 * L / n)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    u = Z * np.exp(-(X**2 + Y**2 + Z**2))
    uhat = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(u))) * (2 * L / n) ** 3
    k = np.fft.fftshift(np.fft.fftfreq(n, d=2 * L / n)) * 2 * math.pi
    i0 = n // 2
    sel = (k > 0.2) & (k < 4.0)
    fft_line = uhat[i0, i0, sel]

    g = Grid(2048, 16.0)
    m = ModeIndex(3, 1)
    p = RadialProfile.from_physical(m, g, lambda r: r * np.exp(-(r**2)) * math.sqrt(4 * math.pi / 3))
    coef = ModeTransform(m, g).fourier_coefficient(p.amplitude)
    y10_pole = math.sqrt(3 / (4 * math.pi))
    ours = CubicSpline(g.nu, coef)(k[sel]) * y10_pole
    assert np.max(np.abs(ours - fft_line)) < 1e-3 * np.max(np.abs(fft_line))
    # and the analytic -i xi/2 pi^(3/2) e^{-xi^2/4}
    exact = -1j * k[sel] / 2 * math.pi**1.5 * np.exp(-k[sel] ** 2 / 4)
    assert np.max(np.abs(ours - exact)) < 1e-3 * np.max(np.abs(exact))


@pytest.mark.parametrize("d,l", [(3, 0), (3, 2), (5, 1)])
def test_forward_inverse_round_trip(grid, d, l):
    m = ModeIndex(d, l)
    r = grid.r
    vals = r**l * np.exp(-((r - 3) ** 2))
    p = hankel_forward(m, grid, vals)
    assert np.max(np.abs(hankel_inverse(p) - vals)) < 1e-10 * np.max(np.abs(vals))


def test_dalembert_oracle():
    g = Grid(4096, 32.0)
    m = ModeIndex(3, 0)
    s = bump_state(g, m, center=4.0, width=1.0)
    for t in (1.0, 2.5, 3.0):
        spec = free_propagate(s, t).profile0(m)
        oracle = dalembert_oracle_d3(s, t)
        diff = np.max(np.abs(spec.physical - oracle.physical))
        assert diff < 1e-3 * np.max(np.abs(spec.physical))


def test_free_flow_group_and_energy(grid):
    s = bump_state(grid, ModeIndex(3, 1), center=3.0)
    a = free_propagate(free_propagate(s, 1.3), 0.7)
    b = free_propagate(s, 2.0)
    assert (a - b).h_norm() < 1e-13 * s.h_norm()
    assert b.h_norm() == pytest.approx(s.h_norm(), rel=1e-14)
    back = free_propagate(b, -2.0)
    assert (back - s).h_norm() < 1e-13 * s.h_norm()
    # reversing the velocity runs time backwards
    rev = free_propagate(s.time_reversed(), 2.0).time_reversed()
    assert (rev - free_propagate(s, -2.0)).h_norm() < 1e-13 * s.h_norm()


def test_free_trajectory_matches_propagate(grid):
    s = bump_state(grid, ModeIndex(5, 0))
    tr = free_trajectory(s, [0.0, 0.5, 1.0])
    assert (tr.state(2) - free_propagate(s, 1.0)).h_norm() < 1e-14


def test_finite_speed_of_free_wave():
    g = Grid(2048, 32.0)
    m = ModeIndex(3, 0)
    s = indicator_state(g, slot="velocity")
    u = free_propagate(s, 5.0).profile0(m).physical
    outside = g.r > 2 + 5 + 0.2
    assert np.max(np.abs(u[outside])) < 1e-2 * np.max(np.abs(u))
