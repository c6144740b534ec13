import math

import numpy as np
import pytest

from superrad.dynamics import (
    Trajectory,
    basis_state,
    default_fit_window,
    default_steps,
    dicke_rate,
    evolve,
    evolve_exact,
    fit_decay_rate,
    inversion_weights,
    symmetric_state,
)
from superrad.errors import DimensionError, DomainError, NumericError, SizeError
from superrad.statespace import DecayParams, build_generator, oracle_generator


def test_symmetric_state_examples():
    psi = symmetric_state(2, 2)
    assert np.allclose(psi, [0, 0, 0, 1])
    psi = symmetric_state(2, 0)
    assert np.allclose(psi, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    psi = symmetric_state(4, 0)
    support = np.flatnonzero(psi)
    assert list(support) == [3, 5, 6, 9, 10, 12]
    assert np.allclose(psi[support], 1 / math.sqrt(6))


@pytest.mark.parametrize("L, twice_m", [(4, 1), (2, 4), (3, 0), (1, -3)])
def test_symmetric_state_domain(L, twice_m):
    with pytest.raises(DomainError):
        symmetric_state(L, twice_m)


@pytest.mark.parametrize("L, twice_m, expected", [(2, 2, 2.0), (4, 0, 6.0), (6, -4, 6.0)])
def test_dicke_rate_examples(L, twice_m, expected):
    assert dicke_rate(L, twice_m, 1.0) == expected


def test_dicke_rate_special_cases():
    for L in (2, 4, 6, 8, 10):
        assert dicke_rate(L, L) == L
        assert dicke_rate(L, 0) == (L / 2) * (L / 2 + 1)
        assert dicke_rate(L, -L + 2) == L


@pytest.mark.parametrize("L", range(1, 9))
def test_symmetric_state_is_exact_eigenvector(L):
    A = oracle_generator(L)
    for twice_m in range(-L, L + 1, 2):
        n_e = (L + twice_m) // 2
        v = np.array([bin(q).count("1") == n_e for q in range(1 << L)], dtype=np.int64)
        rate = dicke_rate(L, twice_m)
        assert np.array_equal(A @ v, int(rate) * v)


def test_single_atom_decay():
    params = DecayParams(gamma=1.0)
    traj = evolve(basis_state(1, 1), build_generator(1), params, 1.0, steps=1000)
    assert traj.norms()[-1] == pytest.approx(math.exp(-1.0), rel=1e-8)


def test_two_atom_fully_excited():
    params = DecayParams(gamma=1.0)
    traj = evolve(basis_state(2, 3), build_generator(2), params, 1.0, steps=1000)
    expected = np.exp(-2 * traj.times)
    assert np.allclose(traj.norms(), expected, rtol=1e-8, atol=0)


def test_singlet_is_constant():
    psi = np.array([0, -1, 1, 0], dtype=complex) / math.sqrt(2)
    traj = evolve(psi, build_generator(2), DecayParams(delta_omega=0.7), 3.0)
    assert np.max(np.abs(traj.states - psi)) < 1e-12


def test_exact_single_atom_amplitude():
    params = DecayParams(gamma=1.3, delta_omega=0.4)
    times = np.linspace(0, 2, 5)
    traj = evolve_exact(basis_state(1, 1), build_generator(1), params, times)
    assert np.allclose(traj.states[:, 1], np.exp(-params.kappa * times), atol=1e-15)


def test_L2_spectrum():
    evals = np.linalg.eigvalsh(build_generator(2).to_dense().astype(float))
    assert np.allclose(sorted(evals), [0, 0, 2, 2], atol=1e-12)


def test_rk4_agrees_with_exact():
    rng = np.random.default_rng(7)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    gen = build_generator(4)
    params = DecayParams(gamma=1.0, delta_omega=0.3)
    rk = evolve(psi, gen, params, 2.0, steps=2000)
    ex = evolve_exact(psi, gen, params, rk.times)
    assert np.max(np.abs(rk.states - ex.states)) < 1e-7


def test_rk4_fourth_order():
    psi = symmetric_state(3, 1) + basis_state(3, 0b111)
    psi /= np.linalg.norm(psi)
    gen = build_generator(3)
    params = DecayParams(gamma=1.0, delta_omega=0.2)
    exact = evolve_exact(psi, gen, params, [0.0, 1.0]).states[-1]
    errs = [np.max(np.abs(evolve(psi, gen, params, 1.0, steps=n).states[-1] - exact)) for n in (20, 40)]
    assert 12 < errs[0] / errs[1] < 20


def test_evolve_errors():
    gen = build_generator(2)
    with pytest.raises(DimensionError):
        evolve(np.ones(8), gen, DecayParams(), 1.0)
    with pytest.raises(DomainError):
        evolve(np.ones(4), gen, DecayParams(), 0.0)
    with pytest.raises(NumericError, match="steps"):
        evolve(np.ones(256), build_generator(8), DecayParams(gamma=1e30), 10.0, steps=5)
    with pytest.raises(SizeError):
        evolve_exact(np.ones(512), build_generator(9), DecayParams(), [0, 1])


def test_default_steps_respects_bound():
    params = DecayParams(gamma=2.0, delta_omega=1.0)
    for L in (1, 4, 10):
        n = default_steps(L, params, 1.5)
        assert L * (L / 2 + 1) * abs(params.kappa) * 1.5 / n < 0.1


def test_trajectory_invariants():
    traj = evolve(symmetric_state(3, 1), build_generator(3), DecayParams(), 0.5, save_every=3)
    assert traj.times[0] == 0 and np.all(np.diff(traj.times) > 0)
    assert traj.times[-1] == pytest.approx(0.5)
    assert np.array_equal(traj.states[0], symmetric_state(3, 1))
    with pytest.raises(DomainError):
        Trajectory([0, 0], np.zeros((2, 4)), DecayParams())


def test_fit_exact_exponential():
    t = np.linspace(0, 0.1, 10)
    fit = fit_decay_rate(t, np.exp(-3 * t))
    assert fit.rate == pytest.approx(3.0, abs=1e-9)
    assert fit.residual_rms < 1e-12


def test_fit_constant():
    fit = fit_decay_rate(np.linspace(0, 1, 5), np.full(5, 0.4))
    assert fit.rate == pytest.approx(0.0, abs=1e-14)


def test_fit_window_and_errors():
    t = np.linspace(0, 1, 11)
    p = np.where(t <= 0.5, np.exp(-2 * t), np.exp(-5 * t))
    assert fit_decay_rate(t, p, (0.0, 0.5)).rate == pytest.approx(2.0)
    with pytest.raises(DomainError):
        fit_decay_rate(t[:2], p[:2])
    with pytest.raises(DomainError):
        fit_decay_rate(t, np.where(t > 0.5, 0.0, p))


def test_fit_drops_underflowing_samples():
    t = np.arange(5.0)
    p = np.array([1.0, 0.5, 0.25, 0.125, 1e-320])
    with pytest.warns(UserWarning, match="excluding 1"):
        fit = fit_decay_rate(t, p)
    assert fit.rate == pytest.approx(math.log(2))


def test_dicke_short_window_fit_L4():
    params = DecayParams()
    rate = dicke_rate(4, 0)
    window = default_fit_window(rate)
    traj = evolve(symmetric_state(4, 0), build_generator(4), params, window[1], steps=40)
    fit = fit_decay_rate(traj.times, traj.norms(), window)
    assert fit.rate == pytest.approx(6.0, rel=0.01)


def test_default_window_from_trajectory():
    traj = evolve(basis_state(2, 3), build_generator(2), DecayParams(), 0.05, steps=50)
    lo, hi = default_fit_window(traj=traj)
    assert lo == 0
    # first sample with 1% probability lost: exp(-2t) <= 0.99
    assert hi == pytest.approx(np.ceil(-np.log(0.99) / 2 / 0.001) * 0.001)


def test_inversion_weights():
    w = inversion_weights(symmetric_state(4, 2))
    assert w[2] == pytest.approx(1.0)
    assert sum(w.values()) == pytest.approx(1.0)


def test_trajectory_csv(tmp_path):
    traj = evolve(basis_state(2, 3), build_generator(2), DecayParams(), 0.1, steps=2)
    traj.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,norm2,p_q0,p_q1,p_q2,p_q3"
    assert len(lines) == 4
    traj.to_csv(tmp_path / "k.csv", top_k=1)
    assert (tmp_path / "k.csv").read_text().splitlines()[0] == "t,norm2,p_q3"


@pytest.mark.parametrize("L", range(1, 9))
def test_spectral_rates_match_eigvalsh(L):
    from superrad.dynamics import spectral_rates

    rates, counts = spectral_rates(L)
    assert counts.sum() == 1 << L
    evals = np.linalg.eigvalsh(build_generator(L).to_dense().astype(float))
    assert np.allclose(np.sort(evals), np.repeat(rates, counts), atol=1e-9)
    assert rates.max() == max(dicke_rate(L, tm) for tm in range(-L, L + 1, 2))


def test_coefficient_rates_symmetric_state():
    from superrad.dynamics import coefficient_rates

    psi = symmetric_state(4, 0)
    r = coefficient_rates(psi, build_generator(4))
    assert np.allclose(r[np.isfinite(r)], 6.0, rtol=1e-6)
    assert np.isnan(r[0])


def test_rate_histogram_counts():
    from superrad.dynamics import rate_histogram

    counts, edges = rate_histogram(6, build_generator(6), n_states=3, bins=10)
    assert counts.sum() == 3 * 64 and edges.size == 11
