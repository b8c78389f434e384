import numpy as np
import pytest
from scipy import integrate

from lightcone import Grid, ModeIndex, SourceTerm, free_propagate, free_trajectory
from lightcone.duhamel import (
    duhamel_from_minus_infinity,
    duhamel_from_plus_infinity,
    extract_scattering,
    nonradiative_source_solve,
    solve_with_report,
    wave_residual,
)
from lightcone.exterior import exterior_limits
from lightcone.nonlinear import time_nodes
from lightcone.plr import pi_R
from lightcone.suites import gaussian_source, random_compact_source, smooth_bump


@pytest.fixture(scope="module")
def g():
    return Grid(512, 16.0)


@pytest.fixture(scope="module")
def times():
    return time_nodes(-4.0, 4.0, 0.05)


def test_zero_source_gives_zero(g, times):
    h = SourceTerm(g, times, {ModeIndex(3, 0): np.zeros((times.size, g.M))})
    v = duhamel_from_minus_infinity(h)
    assert np.max(v.h_norms()) == 0.0


def test_rejects_source_alive_at_first_node(g, times):
    vals = np.ones((times.size, g.M))
    with pytest.raises(ValueError, match="first time node"):
        duhamel_from_minus_infinity(SourceTerm(g, times, {ModeIndex(3, 0): vals}))


def test_matches_quadrature_per_frequency(g, times):
    # oracle: each amplitude solves a'' + nu^2 a = h(t) from rest,
    # a(t) = int sin(nu (t - s)) / nu * h(s) ds, here with a smooth h
    mode = ModeIndex(3, 0)
    prof = np.exp(-((g.nu - 1.0) ** 2))
    tw = smooth_bump(times / 3.0)
    h = SourceTerm(g, times, {mode: tw[:, None] * prof[None, :]})
    v = duhamel_from_minus_infinity(h)
    k_end = times.size - 1
    for j in (0, 40, 200):
        nu = g.nu[j]

        def f(s, nu=nu, t=times[-1]):
            return float(np.sin(nu * (t - s)) / nu * smooth_bump(np.array([s / 3.0]))[0])

        want, _ = integrate.quad(f, -3.0, 3.0, limit=200, epsabs=1e-13)
        # piecewise-linear source in time: second-order agreement
        assert v.field[mode][k_end, j] == pytest.approx(want * prof[j], abs=2e-4 * abs(prof[j]) + 1e-14)


def test_scattering_remainder_vanishes_after_support(g):
    mode = ModeIndex(3, 0)
    times = time_nodes(-3.0, 5.0, 0.05)
    h = gaussian_source(g, mode, times, t0=0.0, tau=0.5)
    dec = extract_scattering(h)
    after = times >= 2.0
    rem = dec.remainder.h_norms()
    assert np.max(rem[after]) < 1e-12 * np.max(dec.solution.h_norms())
    assert np.max(rem[~after]) > 1e-3


def test_plus_infinity_vanishes_after_support(g):
    mode = ModeIndex(3, 1)
    times = time_nodes(-3.0, 3.0, 0.05)
    h = gaussian_source(g, mode, times, tau=0.4)
    v = duhamel_from_plus_infinity(h)
    assert np.max(v.h_norms()[times > 1.7]) < 1e-14
    # both solve the same equation, so they differ by a free wave
    w = duhamel_from_minus_infinity(h) - v
    free = free_trajectory(free_propagate(w.state(0), -times[0]), times)
    assert np.max((w - free).h_norms()) < 1e-10 * np.max(w.h_norms())


def test_residual_small_for_duhamel(g):
    mode = ModeIndex(3, 0)
    times = time_nodes(-3.0, 3.0, 0.05)
    h = gaussian_source(g, mode, times)
    res = wave_residual(duhamel_from_minus_infinity(h), h)
    assert np.max(res) < 1e-2


def test_residual_rejects_nonuniform_nodes(g):
    mode = ModeIndex(3, 0)
    times = np.array([0.0, 0.1, 0.3])
    h = SourceTerm(g, times, {mode: np.zeros((3, g.M))})
    with pytest.raises(ValueError, match="uniform"):
        wave_residual(duhamel_from_minus_infinity(h), h)


def test_nonradiative_solve_properties():
    g = Grid(1024, 32.0)
    mode = ModeIndex(3, 0)
    times = time_nodes(-22.0, 22.0, 0.05)
    h = random_compact_source(g, mode, times, np.random.default_rng(7))
    u, rep = solve_with_report(h, 1.0)
    assert rep.ok, rep.check_values()
    v = rep.check_values()
    assert v["exterior"] < 1e-6
    assert v["projection"] < 1e-8
    assert v["linearity"] < 1e-10
    assert v["measured"] < 1e-2


def test_nonradiative_solve_is_linear(g):
    mode = ModeIndex(3, 0)
    times = time_nodes(-4.0, 4.0, 0.05)
    h1 = gaussian_source(g, mode, times, r0=1.0)
    h2 = gaussian_source(g, mode, times, r0=2.0, t0=0.5)
    both = SourceTerm(g, times, {mode: h1.values[mode] + 2.0 * h2.values[mode]})
    u = nonradiative_source_solve(both, 1.0)
    parts = nonradiative_source_solve(h1, 1.0) + nonradiative_source_solve(h2, 1.0) * 2.0
    assert np.max((u - parts).h_norms()) < 1e-10 * np.max(u.h_norms())


def test_nonradiative_solve_kills_exterior_limits(g):
    mode = ModeIndex(3, 1)
    times = time_nodes(-4.0, 4.0, 0.05)
    h = gaussian_source(g, mode, times, tau=0.4)
    u = nonradiative_source_solve(h, 1.0)
    first, last = u.state(0), u.state(times.size - 1)
    lim = exterior_limits(free_propagate(last, -times[-1]), free_propagate(first, -times[0]), 1.0)
    assert max(lim["forward"], lim["backward"]) < 1e-10 * np.max(u.h_norms()) ** 2
    k0 = int(np.argmin(np.abs(times)))
    assert pi_R(u.state(k0), 1.0).h_norm() < 1e-10


def test_solve_requires_zero_in_window(g):
    mode = ModeIndex(3, 0)
    times = time_nodes(1.0, 3.0, 0.05)
    h = gaussian_source(g, mode, times, t0=2.0, tau=0.2)
    with pytest.raises(ValueError, match="t = 0"):
        nonradiative_source_solve(h, 1.0)
    with pytest.raises(ValueError, match="positive"):
        nonradiative_source_solve(h, 0.0)
