import numpy as np
import pytest

from lightcone import Grid, ModeIndex, free_trajectory, radiation_field
from lightcone.container import (
    load_any,
    load_radiation,
    load_state,
    read_container,
    save_radiation,
    save_state,
    save_trajectory,
)
from lightcone.suites import bump_state


@pytest.fixture
def state():
    g = Grid(128, 8.0)
    return bump_state(g, ModeIndex(3, 0), center=2.0) + bump_state(g, ModeIndex(3, 1), center=2.5)


def test_state_round_trip(tmp_path, state):
    p = save_state(tmp_path / "s.lcf", state, provenance={"seed": 3})
    back = load_state(p)
    assert back.grid == state.grid
    assert set(back.modes) == set(state.modes)
    for m in state.modes:
        assert np.array_equal(back.field[m], state.field[m])
        assert np.array_equal(back.velocity[m], state.velocity[m])
    header, _, _ = read_container(p)
    assert header["provenance"] == {"seed": 3}
    assert header["dimension"] == 3


def test_radiation_round_trip_keeps_parity(tmp_path, state):
    F = radiation_field(state)
    back = load_any(save_radiation(tmp_path / "F.lcf", F))
    assert back.parity == F.parity
    for m in F.modes:
        assert np.array_equal(back.samples[m], F.samples[m])


def test_trajectory_round_trip(tmp_path, state):
    tr = free_trajectory(state, np.linspace(0, 1, 5))
    back = load_any(save_trajectory(tmp_path / "t.lcf", tr))
    assert np.array_equal(back.times, tr.times)
    assert np.max((back - tr).h_norms()) == 0.0


def test_kind_mismatch(tmp_path, state):
    p = save_state(tmp_path / "s.lcf", state)
    with pytest.raises(ValueError, match="radiation"):
        load_radiation(p)


def test_rejects_foreign_and_damaged_files(tmp_path, state):
    bad = tmp_path / "bad.lcf"
    bad.write_bytes(b"abc")
    with pytest.raises(ValueError, match="truncated"):
        read_container(bad)
    p = save_state(tmp_path / "s.lcf", state)
    raw = p.read_bytes()
    cut = tmp_path / "cut.lcf"
    cut.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="size"):
        read_container(cut)
    other = tmp_path / "other.lcf"
    body = b'{"format":"npz"}'
    other.write_bytes(len(body).to_bytes(8, "little") + body)
    with pytest.raises(ValueError, match="not a lightcone"):
        read_container(other)
