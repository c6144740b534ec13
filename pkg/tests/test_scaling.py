import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superrad.dynamics import dicke_rate
from superrad.errors import DomainError
from superrad.scaling import (
    LARGE_SAMPLE_CAVEAT,
    GeometryParams,
    coherence_decay,
    collective_fraction,
    large_sample_budget,
    large_sample_rate,
    polynomial_gate_count,
    small_sample_budget,
    success_probability,
)


def test_small_sample_budget_by_hand():
    b = small_sample_budget(10, 1.0, 1.0, 1.0)
    assert b.value == pytest.approx(25.0)
    assert b.dt == 1.0 and not b.feasible
    b = small_sample_budget(2, 1e-3, 1.0, 250.0)
    assert b.value == pytest.approx(0.25)


def test_success_probability_and_coherence():
    assert success_probability(1, 1.0, 1.0, 0.1) == pytest.approx(math.exp(-0.025))
    assert success_probability(0, 5.0, 10.0, 1.0) == 1.0
    assert coherence_decay(0.5, 2, 1.0, 1.0) == pytest.approx(0.5 * math.exp(-1.0))
    with pytest.raises(DomainError):
        coherence_decay(0.5, 2, 1.0, -1.0)


def test_collective_fraction():
    assert collective_fraction(1.0, 1.0) == pytest.approx(3 / (8 * math.pi**2))
    assert collective_fraction(1.0, 0.5) == pytest.approx(4 * collective_fraction(1.0, 1.0))
    with pytest.raises(DomainError):
        collective_fraction(0.0, 1.0)


def test_geometry():
    g = GeometryParams(d=1.0, lambda_a=2.0, L=8)
    assert g.w == pytest.approx(2.0)
    assert g.mu == pytest.approx(3 / (8 * math.pi**2))


@pytest.mark.parametrize("L", [2, 8, 64, 1000, 10**6])
def test_exact_over_asymptotic(L):
    g = GeometryParams(d=0.3, lambda_a=1.7, L=L)
    ratio = large_sample_rate(L, 1.0, g, "exact") / large_sample_rate(L, 1.0, g, "asymptotic")
    assert ratio == pytest.approx(1 + 2 / L, rel=1e-12)


def test_exact_rate_with_unit_mu_is_dicke_rate():
    for L in (2, 4, 8):
        # choose lambda_a so that mu == 1
        d = 1.0
        w = L ** (1 / 3) * d
        lam = w * math.sqrt(8 * math.pi**2 / 3)
        g = GeometryParams(d, lam, L)
        assert large_sample_rate(L, 1.0, g) == pytest.approx(dicke_rate(L, 0), rel=1e-12)


def test_large_sample_rate_errors():
    g = GeometryParams(1.0, 1.0, 4)
    with pytest.raises(DomainError):
        large_sample_rate(5, 1.0, g)
    with pytest.raises(DomainError):
        large_sample_rate(4, 1.0, g, "bogus")


def test_large_sample_budget_by_hand():
    # default dt collapses the budget to 3/(16 pi) (lambda/d) L^(4/3) R gamma / omega_a
    b = large_sample_budget(8, 1e-3, 1.0, 1.0, lambda_over_d=1.0)
    assert b.value == pytest.approx(3 / (16 * math.pi) * 16 * 1e-3)
    assert b.value == pytest.approx(9.549e-4, rel=1e-3)
    assert b.dt == pytest.approx(2 * math.pi)
    assert b.extra["caveat"] == LARGE_SAMPLE_CAVEAT
    with pytest.warns(UserWarning):
        large_sample_budget(8, 1e-3, 1.0, 1.0, 1.0, warn=True)


def test_budget_dict_and_threshold():
    b = small_sample_budget(2, 1.0, 1.0, 0.01, threshold=0.5)
    d = b.as_dict()
    assert d["feasible"] and d["threshold"] == 0.5 and d["kind"] == "small_sample"


def test_polynomial_gate_count():
    assert polynomial_gate_count(10, 2.0, 3.0) == pytest.approx(2000.0)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 200),
    st.floats(1e-6, 1.0),
    st.floats(1.0, 1e4),
    st.floats(1e-3, 10.0),
)
def test_monotone_in_L(L, gamma, R, dt):
    assert success_probability(L + 1, gamma, R, dt) <= success_probability(L, gamma, R, dt)
    s = small_sample_budget(L, gamma, 1 / dt, R)
    s2 = small_sample_budget(L + 1, gamma, 1 / dt, R)
    assert s2.value >= s.value
    lg = large_sample_budget(L, gamma, 1.0, R, 2.0)
    lg2 = large_sample_budget(L + 1, gamma, 1.0, R, 2.0)
    assert lg2.value >= lg.value
