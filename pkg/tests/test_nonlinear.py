import warnings

import numpy as np
import pytest

from lightcone import Grid, ModeIndex, free_trajectory
from lightcone.nonlinear import (
    ConvergenceError,
    NonlinearityConfig,
    evaluate_nonlinearity,
    lipschitz_ratio,
    phi_map,
    time_nodes,
    wave_operator,
)
from lightcone.plr import pi_R
from lightcone.suites import compact_state, plr_member, radiation_bump

R = 1.0


@pytest.fixture(scope="module")
def g():
    return Grid(512, 32.0)


@pytest.fixture(scope="module")
def f0(g):
    s = plr_member(g, ModeIndex(3, 0), R, {0: 1.0})
    return s * (1.0 / s.h_norm())


def test_config_validation():
    assert NonlinearityConfig(3).q == 5
    assert NonlinearityConfig(5).q == pytest.approx(7 / 3)
    with pytest.raises(ValueError):
        NonlinearityConfig(4)
    with pytest.raises(ValueError):
        NonlinearityConfig(3, sigma=0)


def test_nonlinearity_values():
    f = NonlinearityConfig(3, sigma=-1)
    assert f(np.array([2.0, -2.0])).tolist() == [-32.0, 32.0]
    assert NonlinearityConfig(3, sigma=1)(np.array([-1.0]))[0] == -1.0


def test_time_nodes_hit_zero_exactly():
    t = time_nodes(-1.0, 1.0, 0.1)
    assert t.size == 21
    assert 0.0 in t
    assert t[0] == pytest.approx(-1.0)


def test_radial_only(g):
    s = compact_state(g, ModeIndex(3, 1), R)
    with pytest.raises(ValueError, match="radial"):
        phi_map(s, R, NonlinearityConfig(3), window=2.0)


def test_dimension_mismatch(g):
    s = compact_state(g, ModeIndex(5, 0), R)
    with pytest.raises(ValueError, match="dimension"):
        phi_map(s, R, NonlinearityConfig(3), window=2.0)


def test_small_data_converges_and_stays_in_class(g, f0):
    cfg = NonlinearityConfig(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        u0, u, rep = phi_map(f0 * 0.05, R, cfg, window=10.0, dt=0.05)
    assert rep.converged
    assert all(r < 1 for r in rep.ratios)
    # same projection class as the data
    assert (pi_R(u0, R) - pi_R(f0 * 0.05, R)).h_norm() < 1e-8
    # the correction is quintic in the size
    assert 0 < (u0 - f0 * 0.05).h_norm() < 0.05**4


def test_correction_scales_with_fifth_power(g, f0):
    cfg = NonlinearityConfig(3)
    sizes = (0.05, 0.1)
    corr = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for a in sizes:
            u0, _, _ = phi_map(f0 * a, R, cfg, window=10.0)
            corr.append((u0 - f0 * a).h_norm())
    slope = np.log(corr[1] / corr[0]) / np.log(sizes[1] / sizes[0])
    assert slope == pytest.approx(5.0, abs=0.3)


def test_large_data_diverges(g, f0):
    cfg = NonlinearityConfig(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(ConvergenceError) as exc:
            phi_map(f0 * 8.0, R, cfg, window=10.0, max_iter=20, raise_on_failure=True)
    assert exc.value.report is not None
    assert not exc.value.report.converged


def test_wave_operator_small_profile():
    g = Grid(512, 32.0)
    F = radiation_bump(g, ModeIndex(3, 0), norm=0.05)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        u, vL, rep = wave_operator(F, NonlinearityConfig(3), window=10.0)
    assert rep.converged
    gaps = (u - vL).h_norms()
    # the nonlinear solution merges with the free wave as t grows
    assert gaps[-1] < 1e-12
    assert gaps[0] > gaps[len(gaps) // 2] > gaps[-1]


def test_lipschitz_ratio_finite(g, f0):
    t = time_nodes(-2.0, 2.0, 0.1)
    u = free_trajectory(f0 * 0.1, t)
    v = free_trajectory(f0 * 0.12, t)
    c = lipschitz_ratio(u, v, NonlinearityConfig(3))
    assert 0 < c < np.inf


def test_nonlinearity_source_zero_ends(g, f0):
    t = time_nodes(-1.0, 1.0, 0.1)
    src = evaluate_nonlinearity(free_trajectory(f0, t), NonlinearityConfig(3), zero_ends=True)
    vals = src.values[ModeIndex(3, 0)]
    assert np.all(vals[0] == 0) and np.all(vals[-1] == 0)
    assert np.any(vals[5] != 0)
