import math

import numpy as np
import pytest

from superrad.dfs import dfs_state
from superrad.dynamics import basis_state, evolve, uniform_state
from superrad.errors import DomainError
from superrad.qubit_channel import (
    ChannelRates,
    channel_rates,
    gate_error,
    is_valid_density_matrix,
    reduce,
    reduce_trajectory,
    write_channel_report,
)
from superrad.statespace import DecayParams, build_generator


def brute_force_reduce(psi, a):
    """Partial trace of the full outer product by explicit index loops."""
    L = int(math.log2(psi.size))
    rho = np.outer(psi, psi.conj())
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(1 << (L - 1)):
                low, high = k & ((1 << a) - 1), k >> a
                qi = (high << (a + 1)) | (i << a) | low
                qj = (high << (a + 1)) | (j << a) | low
                out[i, j] += rho[qi, qj]
    return out


def test_reduce_all_ground():
    rho = reduce(basis_state(3, 0), 1)
    assert np.allclose(rho, [[1, 0], [0, 0]])


def test_reduce_singlet():
    rho = reduce(dfs_state(2), 0)
    assert np.allclose(rho, np.eye(2) / 2)
    assert rho[0, 1] == 0


def test_reduce_product_plus_state():
    plus = np.array([1, 1]) / math.sqrt(2)
    psi = np.kron(np.kron(plus, plus), plus)
    rho = reduce(psi, 1)
    assert np.allclose(rho, np.full((2, 2), 0.5))
    assert np.allclose(rho, brute_force_reduce(psi, 1))


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_reduce_matches_brute_force(L):
    rng = np.random.default_rng(L)
    psi = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
    psi /= np.linalg.norm(psi)
    for a in range(L):
        assert np.max(np.abs(reduce(psi, a) - brute_force_reduce(psi, a))) < 1e-14


def test_reduce_index_error():
    with pytest.raises(DomainError):
        reduce(basis_state(2, 0), 2)


def test_reduce_trajectory_matches_pointwise():
    traj = evolve(uniform_state(3), build_generator(3), DecayParams(), 0.2, steps=10)
    stack = reduce_trajectory(traj, 2)
    for k in (0, 5, 10):
        assert np.allclose(stack[k], reduce(traj.states[k], 2), atol=1e-15)


def test_is_valid_density_matrix():
    assert is_valid_density_matrix(np.eye(2) / 2)
    assert not is_valid_density_matrix(np.array([[1, 1], [1, 0]]))
    assert not is_valid_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


def single_atom_traj(t_end=0.5, steps=200):
    psi = np.array([1, 1], dtype=complex) / math.sqrt(2)
    return evolve(psi, build_generator(1), DecayParams(), t_end, steps=steps)


def test_single_atom_raw_rates():
    # zero-photon entries of one atom: rho_ee = e^{-t}/2, |rho_ge| = e^{-t/2}/2
    rates = channel_rates(single_atom_traj(), 0, normalize=False)
    assert rates.longitudinal == pytest.approx(1.0, rel=0.01)
    assert rates.transverse == pytest.approx(0.5, rel=0.01)


def test_single_atom_normalized_rates():
    traj = single_atom_traj(0.01, 20)
    t = traj.times
    # independent closed forms of the trace-normalised entries
    pop = np.exp(-t) / (1 + np.exp(-t))
    coh = np.exp(-t / 2) / (1 + np.exp(-t))
    ref_long = -np.polyfit(t, np.log(pop), 1)[0]
    ref_trans = -np.polyfit(t, np.log(coh), 1)[0]
    rates = channel_rates(traj, 0)
    assert rates.longitudinal == pytest.approx(ref_long, rel=1e-6)
    assert rates.transverse == pytest.approx(ref_trans, abs=1e-6)


def test_dfs_channel_is_stationary():
    traj = evolve(dfs_state(4), build_generator(4), DecayParams(), 0.5, steps=50)
    rates = channel_rates(traj, 0)
    assert abs(rates.longitudinal) < 1e-9
    assert rates.transverse == 0.0 and rates.trans_vanishing


def test_partially_vanishing_component_is_undefined():
    # coherence zero at t=0, nonzero later: log-fit undefined
    psi = basis_state(2, 0b11)
    traj = evolve(psi, build_generator(2), DecayParams(), 0.1, steps=10)
    traj.states[5:, 0b10] = 0.1
    rates = channel_rates(traj, 0, normalize=False)
    assert math.isnan(rates.transverse) and rates.trans_vanishing


def test_window_outside_span():
    with pytest.raises(DomainError):
        channel_rates(single_atom_traj(), 0, window=(0.0, 5.0))


@pytest.mark.parametrize(
    "L, gamma, dt, expected", [(0, 3.0, 2.0, 0.0), (10, 1e-6, 1.0, 5e-6), (4, 0.01, 0.1, 2e-3)]
)
def test_gate_error(L, gamma, dt, expected):
    assert gate_error(L, gamma, dt) == pytest.approx(expected, rel=1e-12, abs=0)


def test_gate_error_warns_outside_small_regime():
    with pytest.warns(UserWarning):
        gate_error(10, 1.0, 1.0)


def test_channel_report(tmp_path):
    path = tmp_path / "c.csv"
    write_channel_report(path, [(4, ChannelRates(0.5, 0.25, 1e-9, 2e-9))])
    assert path.read_text() == (
        "L,longitudinal_rate,transverse_rate,fit_residual_long,fit_residual_trans\n"
        "4,0.5,0.25,1e-09,2e-09\n"
    )
