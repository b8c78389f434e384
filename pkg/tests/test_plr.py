import numpy as np
import pytest
from scipy import integrate

from lightcone import CauchyData, Grid, ModeIndex, h_inner, is_nonradiative_linear, pi_R, plr_basis, project_pR
from lightcone.plr import PlrBasisSpec, project_state
from lightcone.suites import bump_state, compact_state, plr_member, random_bandlimited_state


@pytest.mark.parametrize(
    "d,l,alphas,kh,kl",
    [
        (3, 0, [-1], [0], []),
        (5, 0, [-3], [0], [0]),
        (3, 2, [-3, -1], [0, 1], [0]),
    ],
)
def test_admissible_sets_examples(d, l, alphas, kh, kl):
    spec = plr_basis(d, l, 1.0)
    assert [spec.alpha(k) for k in range(len(alphas))] == alphas
    assert list(spec.field_indices) == kh
    assert list(spec.velocity_indices) == kl


@pytest.mark.parametrize("d,l", [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2)])
@pytest.mark.parametrize("R", [0.7, 2.0])
def test_gram_against_quadrature(d, l, R):
    spec = plr_basis(d, l, R)
    L = l * (l + d - 2)

    def grad_sq(j, k):
        aj, ak = spec.alpha(j), spec.alpha(k)
        fj = lambda r: (r / R) ** (l if r < R else aj)
        dj = lambda r, a: a * r ** (a - 1) / R**a
        def integrand(r):
            if r < R:
                return (dj(r, l) ** 2 + L * fj(r) ** 2 / r**2) * r ** (d - 1)
            return (dj(r, aj) * dj(r, ak) + L * (r / R) ** (aj + ak) / r**2) * r ** (d - 1)
        return integrate.quad(integrand, 0, R, epsrel=1e-13)[0] + integrate.quad(integrand, R, np.inf, epsrel=1e-13)[0]

    G = spec.field_gram()
    for a, j in enumerate(spec.field_indices):
        for b, k in enumerate(spec.field_indices):
            assert G[a, b] == pytest.approx(grad_sq(j, k), rel=1e-8)
    V = spec.velocity_gram()
    for a, j in enumerate(spec.velocity_indices):
        for b, k in enumerate(spec.velocity_indices):
            q = integrate.quad(lambda r: r ** (spec.alpha(j) + spec.alpha(k) + d - 1), R, np.inf, epsrel=1e-13)[0]
            assert V[a, b] == pytest.approx(q, rel=1e-8)
    assert np.all(np.linalg.eigvalsh(G) > 0)


def test_bad_spec():
    with pytest.raises(ValueError):
        PlrBasisSpec(4, 0, 1.0)
    with pytest.raises(ValueError):
        PlrBasisSpec(3, 0, 0.0)


@pytest.mark.parametrize("l", [0, 2])
def test_f0_shape_and_continuity(l):
    g = Grid(2048, 32.0)
    m = ModeIndex(3, l)
    s = plr_member(g, m, 1.0, {0: 1.0})
    u = s.profile0(m).physical
    r = g.r
    a = -l - 1
    out = (r > 1.2) & (r < 10)
    # (r/R)^alpha_0 outside, (r/R)^l inside
    assert np.max(np.abs(u[out] * r[out] ** -a - 1.0)) < 1e-2
    inside = (r > 0.2) & (r < 0.8)
    assert np.max(np.abs(u[inside] - r[inside] ** l)) < 1e-2
    near = np.abs(r - 1.0) < 0.02
    assert np.ptp(u[near]) < 0.05


@pytest.mark.parametrize("d,l", [(3, 0), (3, 1), (3, 2), (5, 1)])
def test_f0_energy_matches_gram(d, l):
    # f_0 has a vanishing exterior chi-tail, so the grid holds all of its energy
    g = Grid(2048, 32.0)
    m = ModeIndex(d, l)
    spec = plr_basis(d, l, 1.0)
    s = plr_member(g, m, 1.0, {0: 1.0})
    assert s.h_norm() ** 2 == pytest.approx(spec.field_gram()[0, 0], rel=1e-3)


def test_materialize_needs_room():
    g = Grid(64, 1.0)
    with pytest.raises(ValueError):
        plr_member(g, ModeIndex(3, 0), 2.0, {0: 1.0})


def test_pi_R_properties(grid, rng):
    R = 1.5
    m = [ModeIndex(3, l) for l in (0, 1, 2)]
    a = random_bandlimited_state(grid, m[0], rng) + random_bandlimited_state(grid, m[2], rng)
    b = random_bandlimited_state(grid, m[0], rng) + random_bandlimited_state(grid, m[1], rng)
    pa, pb = pi_R(a, R), pi_R(b, R)
    assert (pi_R(pa, R) - pa).h_norm() < 1e-13
    assert h_inner(pa, b) == pytest.approx(h_inner(a, pb), abs=1e-13)
    assert abs(h_inner(a - pa, pa)) < 1e-13
    assert pa.h_norm() <= a.h_norm()


def test_basis_route_projection(grid, rng):
    R = 1.5
    m = ModeIndex(3, 2)
    a = random_bandlimited_state(grid, m, rng)
    p = project_state(a, R)
    assert (project_state(p, R) - p).h_norm() < 1e-12
    resid = a - p
    for s in (compact_state(grid, m, R), plr_member(grid, m, R, {0: 1.0}), plr_member(grid, m, R, {1: 1.0}), plr_member(grid, m, R, None, {0: 1.0})):
        assert abs(h_inner(resid, s)) < 1e-10 * s.h_norm()


def test_project_pR_recovers_coefficients():
    g = Grid(2048, 32.0)
    m = ModeIndex(3, 0)
    R = 1.0
    s = plr_member(g, m, R, {0: 2.0}) + compact_state(g, m, R)
    e = project_pR(s, R)
    assert e.field_coeffs[m][0] == pytest.approx(2.0, rel=1e-3)
    d = e.to_dict()
    assert d["R"] == 1.0


def test_nonradiative_membership(grid):
    R = 1.0
    m = ModeIndex(3, 0)
    assert is_nonradiative_linear(compact_state(grid, m, R), R)
    assert is_nonradiative_linear(plr_member(grid, m, R, {0: 1.0}), R)
    rep = is_nonradiative_linear(bump_state(grid, m, center=4.0), R)
    assert not rep
    assert rep.to_dict()["exterior_energy"] > 0
