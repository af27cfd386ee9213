import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrenewal.bloch import BlochVector, amplitude_damping, compose, identity, pauli_x
from qrenewal.dephasing import DephasingGenerator, propagate
from qrenewal.errors import ParameterError
from qrenewal.trajectory import (
    JumpTimes,
    affine_maps,
    draw_jump_times,
    draw_jump_times_batch,
    evolve,
    jump_counts_on_grid,
    make_grid,
    write_trajectory_csv,
)
from qrenewal.wtd import WtdSequence, WtdSpec

import oracles

EXP1 = WtdSequence(WtdSpec.exponential(1.0))


def test_make_grid():
    g = make_grid(3.0, 0.01)
    assert g.size == 301 and g[0] == 0.0 and g[-1] == 3.0
    assert make_grid(2.0).size == 1001
    with pytest.raises(ParameterError):
        make_grid(1.0, 0.3)
    with pytest.raises(ParameterError):
        make_grid(0.0)


def test_first_draw_beyond_horizon_gives_no_jumps():
    seq = WtdSequence(WtdSpec.exponential(1e-9))
    jt = draw_jump_times(seq, 1.0, 100, np.random.default_rng(0))
    assert len(jt) == 0 and not jt.truncated


def test_poisson_count_mean():
    mu, T, n = 2.0, 1.5, 100_000
    _, counts, trunc = draw_jump_times_batch(WtdSequence(WtdSpec.exponential(mu)), T, n, 1000, np.random.default_rng(1))
    assert not trunc.any()
    assert abs(counts.mean() - mu * T) < 3 * np.sqrt(mu * T / n)


def test_first_waiting_time_uses_modified_rate():
    seq = WtdSequence(WtdSpec.exponential(1.0), (WtdSpec.exponential(40.0),))
    times, counts, _ = draw_jump_times_batch(seq, 10.0, 100_000, 1000, np.random.default_rng(2))
    t1 = times[:, 0]
    assert np.all(counts > 0)
    assert abs(t1.mean() - 1 / 40) < 3 * t1.std() / np.sqrt(t1.size)


def test_truncation_flag():
    seq = WtdSequence(WtdSpec.exponential(100.0))
    jt = draw_jump_times(seq, 10.0, 5, np.random.default_rng(0))
    assert jt.truncated and len(jt) == 5
    _, counts, trunc = draw_jump_times_batch(seq, 10.0, 50, 5, np.random.default_rng(0))
    assert trunc.all() and np.all(counts == 5)


def test_jump_times_validation():
    with pytest.raises(ParameterError):
        JumpTimes((0.5, 0.5))
    with pytest.raises(ParameterError):
        JumpTimes((0.0, 1.0))


def test_no_jumps_constant_without_dephasing():
    grid = make_grid(2.0, 0.1)
    v = BlochVector(0.2, -0.3, 0.5)
    c = evolve(v, JumpTimes(()), DephasingGenerator(0, 0, 0), pauli_x(), grid)
    assert np.all(c.states == v.as_array())


def test_no_jumps_is_pure_dephasing():
    grid = make_grid(2.0, 0.1)
    g = DephasingGenerator(0.1, 0.3, 0.2)
    v = BlochVector(0.2, -0.3, 0.5)
    c = evolve(v, JumpTimes(()), g, pauli_x(), grid)
    for t, s in zip(grid, c.states):
        assert s == pytest.approx(propagate(g, v, t).as_array(), abs=1e-15)


def test_two_x_flips_restore_state():
    grid = make_grid(1.0, 0.1)
    v = BlochVector(0.1, 0.6, -0.4)
    c = evolve(v, JumpTimes((0.23, 0.61)), DephasingGenerator(0, 0, 0), pauli_x(), grid)
    assert np.all(c.states[grid > 0.61] == v.as_array())
    assert c.states[0] == pytest.approx(v.as_array())


def test_jump_on_grid_point_is_applied_first():
    grid = make_grid(1.0, 0.25)
    c = evolve(BlochVector(0, 1, 0), JumpTimes((0.5,)), DephasingGenerator(0, 0, 0), pauli_x(), grid)
    assert c.states[2, 1] == -1.0 and c.states[1, 1] == 1.0
    counts = jump_counts_on_grid(np.array([[0.5, np.inf]]), grid)
    assert counts.tolist() == [[0, 0, 1, 1, 1]]


def test_y_sign_flips_at_every_jump():
    jumps = draw_jump_times(EXP1, 5.0, 100, np.random.default_rng(4))
    grid = make_grid(5.0, 0.001)
    ch = compose(pauli_x(), amplitude_damping(0.3))
    c = evolve(BlochVector(0, 1, 0), jumps, DephasingGenerator.from_lambdas([0.9, 0.9, 0.9]), ch, grid)
    n = np.searchsorted(jumps.times, grid, side="right")
    assert np.all(np.sign(c.states[:, 1]) == (-1.0) ** n)


def test_matches_density_matrix_oracle():
    gammas = (0.2, 0.35, 0.1)
    gen = DephasingGenerator(*gammas)
    jumps = JumpTimes((0.3, 0.45, 1.2, 1.9))
    grid = make_grid(2.5, 0.05)
    r0 = np.array([0.3, 0.7, -0.4])
    kraus = oracles.kraus_compose(oracles.x_kraus(), oracles.ad_kraus(0.4))
    c = evolve(BlochVector.from_array(r0), jumps, gen, compose(pauli_x(), amplitude_damping(0.4)), grid)
    for t, s in zip(grid, c.states):
        ref = oracles.bloch_from_rho(oracles.trajectory_rho(r0, jumps.times, gammas, kraus, t))
        assert np.max(np.abs(s - ref)) < 1e-12


@given(st.floats(0.05, 0.5), st.sampled_from([1, 2, 5]))
def test_grid_refinement_keeps_shared_points(dt, factor):
    T = 2.0
    n = max(1, round(T / dt))
    coarse = make_grid(T, T / n)
    fine = make_grid(T, T / (n * factor))
    jumps = draw_jump_times(EXP1, T, 100, np.random.default_rng(n))
    args = (BlochVector(0, 1, 0), jumps, DephasingGenerator(0.1, 0.2, 0.3), compose(pauli_x(), amplitude_damping(0.3)))
    a = evolve(*args, coarse).states
    b = evolve(*args, fine).states[::factor]
    assert np.max(np.abs(a - b)) < 1e-14


CHANNELS = [pauli_x(), amplitude_damping(0.3), compose(pauli_x(), amplitude_damping(0.3)),
            compose(amplitude_damping(0.5), pauli_x()), identity()]
GENERATORS = [DephasingGenerator(0, 0, 0), DephasingGenerator(0.45, 0.45, 0.45), DephasingGenerator(0.1, 0.0, 0.7)]


@given(st.integers(0, 10_000), st.sampled_from(range(len(CHANNELS))), st.sampled_from(range(len(GENERATORS))))
def test_batch_agrees_with_reference(seed, ci, gi):
    ch, gen = CHANNELS[ci], GENERATORS[gi]
    seq = WtdSequence(WtdSpec.exponential(2.0), (WtdSpec.exponential(8.0), WtdSpec.erlang(3.0, 2)))
    grid = make_grid(2.0, 0.02)
    times, counts, _ = draw_jump_times_batch(seq, 2.0, 8, 1000, np.random.default_rng(seed))
    A, b = affine_maps(times, gen, ch, grid)
    r0 = np.array([0.1, 0.8, -0.5])
    batch = np.einsum("bgij,j->bgi", A, r0) + b
    for i in range(times.shape[0]):
        jt = JumpTimes(times[i, : counts[i]])
        ref = evolve(BlochVector.from_array(r0), jt, gen, ch, grid).states
        assert np.max(np.abs(batch[i] - ref)) < 1e-12


def test_trajectory_csv(tmp_path):
    grid = make_grid(1.0, 0.5)
    c = evolve(BlochVector(0, 1, 0), JumpTimes((0.2,)), DephasingGenerator(0, 0, 0), pauli_x(), grid)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, c, ("tool=qrenewal",))
    lines = path.read_text().splitlines()
    assert lines[0] == "# tool=qrenewal"
    assert lines[1] == "t,x,y,z"
    assert len(lines) == 2 + grid.size
