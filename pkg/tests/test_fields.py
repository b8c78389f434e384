import math

import numpy as np
import pytest
from scipy import integrate

from lightcone import CauchyData, Grid, ModeIndex, RadialProfile, SourceTerm, Trajectory, TruncationError, h_inner
from lightcone.fields import (
    GridMismatchError,
    TruncationWarning,
    harmonic_dimension,
    norm_N,
    norm_W,
    norm_X,
    physical_h_inner,
    radial_coefficient,
    sphere_area,
)
from lightcone.suites import bump_state, indicator_state


def test_grid_geometry():
    g = Grid(64, 8.0)
    assert g.ds == pytest.approx(0.125)
    assert g.dnu == pytest.approx(math.pi / 8)
    assert g.r[0] == pytest.approx(g.ds / 2)
    assert g.s.size == 128
    np.testing.assert_allclose(g.s[:64], -g.r[::-1])
    assert Grid(64, 8.0) == g


def test_exterior_weights_split_cells():
    g = Grid(16, 4.0)
    w = g.exterior_weights(1.1)
    # total length of [1.1, 4]
    assert w.sum() == pytest.approx(4.0 - 1.1)


def test_mode_index_rules():
    with pytest.raises(ValueError, match="odd"):
        ModeIndex(4, 0)
    with pytest.raises(ValueError):
        ModeIndex(3, -1)
    with pytest.raises(ValueError):
        ModeIndex(3, 1, 3)
    m = ModeIndex(5, 2)
    assert m.order == 3
    assert m.angular_weight == 2 * 5
    assert harmonic_dimension(2, 3) == 5
    assert harmonic_dimension(1, 5) == 5


def test_sphere_area():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(5) == pytest.approx(8 * math.pi**2 / 3)
    assert radial_coefficient(3) ** 2 == pytest.approx(4 * math.pi)


def test_energy_of_shell_indicator():
    # ||(0, 1_{1<|x|<2})||^2 = 4 pi (8 - 1) / 3
    g = Grid(4096, 16.0)
    s = indicator_state(g)
    assert h_inner(s, s) == pytest.approx(28 * math.pi / 3, rel=1e-5)


def test_norms_of_gaussian_match_quadrature(grid):
    m = ModeIndex(3, 1)
    p = RadialProfile.from_physical(m, grid, lambda r: r * np.exp(-(r**2)))
    # int r^2 e^{-2r^2} r^2 dr = 3 sqrt(pi/2) / 32
    exact = 3 * math.sqrt(math.pi / 2) / 32
    assert p.l2_norm() ** 2 == pytest.approx(exact, rel=1e-10)
    # |grad|^2 = (d/dr f)^2 + l(l+1) f^2 / r^2 for f = r e^{-r^2}

    f = lambda r: r * math.exp(-(r**2))
    df = lambda r: (1 - 2 * r**2) * math.exp(-(r**2))
    h1 = integrate.quad(lambda r: (df(r) ** 2 + 2 * f(r) ** 2 / r**2) * r**2, 0, np.inf)[0]
    assert p.h1_seminorm() ** 2 == pytest.approx(h1, rel=1e-8)


def test_from_gradient_matches_from_physical(grid):
    m = ModeIndex(3, 2)
    a = bump_state(grid, m, velocity=0.0)
    b = CauchyData.from_functions(grid, m, u0=lambda r: r**2 * np.exp(-((r - 3.0) ** 2)))
    assert (a - b).h_norm() / a.h_norm() < 1e-6


def test_physical_inner_product_agrees(grid):
    m = ModeIndex(3, 0)
    a = bump_state(grid, m, center=3.0)
    b = bump_state(grid, m, center=3.5, width=0.8)
    assert physical_h_inner(a, b) == pytest.approx(h_inner(a, b), rel=1e-3)


def test_truncation_guard():
    g = Grid(256, 8.0)
    m = ModeIndex(3, 0)
    with pytest.raises(TruncationError):
        RadialProfile.from_physical(m, g, lambda r: np.exp(-((r - 7.5) ** 2)))
    with pytest.warns(TruncationWarning):
        RadialProfile.from_physical(m, g, lambda r: np.exp(-((r - 5.5) ** 2) / 0.5))


def test_grid_mismatch():
    m = ModeIndex(3, 0)
    a = CauchyData.zeros(Grid(64, 8.0), [m])
    b = CauchyData.zeros(Grid(128, 8.0), [m])
    with pytest.raises(GridMismatchError):
        a + b


def test_cauchy_arithmetic(grid):
    m0, m1 = ModeIndex(3, 0), ModeIndex(3, 1)
    a = bump_state(grid, m0)
    b = bump_state(grid, m1)
    c = a + b
    assert set(c.modes) == {m0, m1}
    assert c.h_norm() ** 2 == pytest.approx(a.h_norm() ** 2 + b.h_norm() ** 2)
    assert (c - b - a).h_norm() == 0.0
    assert (2.0 * a).h_norm() == pytest.approx(2 * a.h_norm())


def test_time_norms():
    g = Grid(128, 8.0)
    m = ModeIndex(3, 0)
    times = np.linspace(0.0, 2.0, 21)
    vals = np.zeros((21, 128))
    vals[:, 3] = 1.0 / math.sqrt(g.dnu)  # unit L2 norm per slice
    h = SourceTerm(g, times, {m: vals})
    assert norm_N(h) == pytest.approx(2.0)
    tr = Trajectory(g, times, {m: vals}, {m: vals})
    assert norm_X(tr) > norm_W(tr) > 0
    bad = Trajectory(g, times, {ModeIndex(3, 1): vals}, {ModeIndex(3, 1): vals})
    with pytest.raises(ValueError):
        norm_W(bad)


def test_trajectory_access():
    g = Grid(64, 8.0)
    m = ModeIndex(3, 0)
    times = np.array([0.0, 0.5, 1.0])
    f = np.arange(3 * 64, dtype=float).reshape(3, 64)
    tr = Trajectory(g, times, {m: f}, {m: -f})
    assert tr.index(0.5) == 1
    np.testing.assert_array_equal(tr.state(2).field[m], f[2])
    with pytest.raises(ValueError):
        Trajectory(g, np.array([0.0, 0.0]), {m: f[:2]}, {m: f[:2]})
