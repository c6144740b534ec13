"""Time evolution of zero-photon amplitudes and decay-rate extraction."""

from __future__ import annotations

import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from superrad.errors import DimensionError, DomainError, NumericError, SizeError
from superrad.io import write_csv
from superrad.statespace import (
    ORACLE_L_MAX,
    CollectiveGenerator,
    DecayParams,
    popcount,
    sector_indices,
)

__all__ = [
    "Trajectory",
    "FitResult",
    "num_atoms",
    "basis_state",
    "uniform_state",
    "symmetric_state",
    "dicke_rate",
    "stiffness_bound",
    "default_steps",
    "evolve",
    "evolve_exact",
    "fit_decay_rate",
    "default_fit_window",
    "inversion_weights",
    "sector_dimension",
    "spectral_rates",
    "coefficient_rates",
    "rate_histogram",
]

log = logging.getLogger(__name__)

#: step-size heuristic: spectral bound times |kappa| times h stays below this
STEP_SAFETY = 0.1
#: probabilities below this are dropped from log-linear fits
FIT_FLOOR = 1e-300


def num_atoms(psi: np.ndarray) -> int:
    """Register size implied by a state vector of length ``2**L``."""
    n = np.shape(psi)[-1]
    L = n.bit_length() - 1
    if n < 2 or (1 << L) != n:
        raise DimensionError(f"state length {n} is not a power of two >= 2")
    return L


def _check_twice_m(L: int, twice_m: int) -> None:
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L}")
    if abs(twice_m) > L:
        raise DomainError(f"|twice_m| = {abs(twice_m)} exceeds L = {L}")
    if (twice_m - L) % 2:
        raise DomainError(
            f"parity rule violated: twice_m={twice_m} must have the same parity as L={L}"
        )


def basis_state(L: int, q: int) -> np.ndarray:
    psi = np.zeros(1 << L, dtype=np.complex128)
    psi[q] = 1.0
    return psi


def uniform_state(L: int) -> np.ndarray:
    """Equal-weight superposition of all ``2**L`` basis states."""
    return np.full(1 << L, 1 / math.sqrt(1 << L), dtype=np.complex128)


def symmetric_state(L: int, twice_m: int) -> np.ndarray:
    """Dicke state: uniform positive amplitude on every state with inversion ``twice_m``."""
    _check_twice_m(L, twice_m)
    idx = sector_indices(L, twice_m)
    psi = np.zeros(1 << L, dtype=np.complex128)
    psi[idx] = 1 / math.sqrt(idx.size)
    return psi


def dicke_rate(L: int, twice_m: int, gamma: float = 1.0) -> float:
    """Probability decay rate ``(L/2 + M)(L/2 - M + 1) * gamma`` of a symmetric state."""
    _check_twice_m(L, twice_m)
    # (L/2 + M) = n_excited, (L/2 - M + 1) = n_ground + 1, both integers
    n_e = (L + twice_m) // 2
    return n_e * (L - n_e + 1) * gamma


def inversion_weights(psi: np.ndarray) -> dict[int, float]:
    """Probability carried by each inversion sector, keyed by ``twice_m``."""
    L = num_atoms(psi)
    n_e = popcount(np.arange(psi.size), L)
    prob = np.abs(psi) ** 2
    return {2 * k - L: float(prob[n_e == k].sum()) for k in range(L + 1)}


@dataclass
class Trajectory:
    """Sampled solution of the amplitude equations.

    ``states[k]`` holds the amplitudes at ``times[k]``; ``states[0]`` is the
    initial state exactly as supplied.
    """

    times: np.ndarray
    states: np.ndarray
    params: DecayParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=np.complex128)
        if self.states.ndim != 2 or self.states.shape[0] != self.times.size:
            raise DimensionError("states must be (len(times), 2**L)")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("trajectory times must be strictly increasing")

    @property
    def L(self) -> int:
        return num_atoms(self.states[0])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    def norms(self) -> np.ndarray:
        """Zero-photon probability ``sum_q |c_q(t)|**2`` at every sample."""
        return self.probabilities().sum(axis=1)

    def to_csv(self, path: str | os.PathLike, top_k: int | None = None) -> None:
        """Write ``t,norm2,p_q...`` rows.

        With ``top_k`` only the ``k`` basis states of largest initial
        probability are written (ties broken by index), in index order.
        """
        prob = self.probabilities()
        cols = np.arange(prob.shape[1])
        if top_k is not None and top_k < cols.size:
            order = np.lexsort((cols, -prob[0]))
            cols = np.sort(order[:top_k])
        header = ["t", "norm2"] + [f"p_q{q}" for q in cols]
        norms = prob.sum(axis=1)
        rows = (
            [t, n, *p[cols]] for t, n, p in zip(self.times, norms, prob)
        )
        write_csv(path, header, rows)


def _check_dims(psi0: np.ndarray, gen: CollectiveGenerator) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.ndim != 1 or psi0.size != gen.dim:
        raise DimensionError(
            f"state has shape {psi0.shape}, generator acts on dimension {gen.dim} (L={gen.L})"
        )
    return psi0


def stiffness_bound(L: int) -> float:
    """Upper bound ``L*(L/2 + 1)`` on the spectrum of the generator."""
    return L * (L / 2 + 1)


def default_steps(L: int, params: DecayParams, t_end: float) -> int:
    """Smallest RK4 step count with ``stiffness_bound * |kappa| * h < STEP_SAFETY``."""
    h_max = STEP_SAFETY / (stiffness_bound(L) * abs(params.kappa))
    return max(1, math.ceil(t_end / h_max * (1 + 1e-12)))


def evolve(
    psi0: np.ndarray,
    gen: CollectiveGenerator,
    params: DecayParams,
    t_end: float,
    steps: int | None = None,
    save_every: int = 1,
) -> Trajectory:
    """Integrate ``dc/dt = -kappa * A c`` with classical fixed-step RK4.

    Parameters
    ----------
    psi0 : ndarray
        Initial amplitudes, length ``gen.dim``.
    t_end : float
        Final time, same unit as ``1/params.gamma``.
    steps : int, optional
        Number of RK4 steps. Defaults to :func:`default_steps`.
    save_every : int
        Record every ``save_every``-th step; the final step is always kept.
    """
    psi0 = _check_dims(psi0, gen)
    if not t_end > 0:
        raise DomainError(f"t_end must be > 0, got {t_end}")
    if steps is None:
        steps = default_steps(gen.L, params, t_end)
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    h = t_end / steps
    if stiffness_bound(gen.L) * abs(params.kappa) * h > 2.5:
        log.warning(
            "RK4 step %.3g is beyond the stability region for L=%d; use >= %d steps",
            h, gen.L, default_steps(gen.L, params, t_end),
        )
    A = gen.as_float()
    neg_kappa = -params.kappa

    def rhs(c):
        return neg_kappa * (A @ c)

    times = [0.0]
    states = [psi0.copy()]
    c = psi0.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            k1 = rhs(c)
            k2 = rhs(c + (h / 2) * k1)
            k3 = rhs(c + (h / 2) * k2)
            k4 = rhs(c + h * k3)
            c = c + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            if k % save_every == 0 or k == steps:
                if not np.all(np.isfinite(c)):
                    raise NumericError(
                        f"non-finite amplitudes at t={k * h:.6g}; step h={h:.3g} is too large, "
                        f"use at least {default_steps(gen.L, params, t_end)} steps"
                    )
                times.append(k * h)
                states.append(c.copy())
    return Trajectory(np.array(times), np.array(states), params, {"method": "rk4", "steps": steps})


def evolve_exact(
    psi0: np.ndarray,
    gen: CollectiveGenerator,
    params: DecayParams,
    times,
) -> Trajectory:
    """Reference solution ``V exp(-kappa Lambda t) V^T c(0)`` from a dense eigensolve."""
    if gen.L > ORACLE_L_MAX:
        raise SizeError(f"evolve_exact supports L <= {ORACLE_L_MAX}, got L={gen.L}")
    psi0 = _check_dims(psi0, gen)
    times = np.asarray(times, dtype=float)
    evals, V = np.linalg.eigh(gen.to_dense().astype(np.float64))
    coeffs = V.T @ psi0
    phases = np.exp(-params.kappa * np.outer(times, evals))
    states = (phases * coeffs) @ V.T
    if times.size and times[0] == 0:
        states[0] = psi0
    return Trajectory(times, states, params, {"method": "eigh"})


@dataclass(frozen=True)
class FitResult:
    """Log-linear decay fit ``-ln p = rate * t + offset``."""

    rate: float
    offset: float
    residual_rms: float
    n_samples: int


def fit_decay_rate(times, probs, window: tuple[float, float] | None = None) -> FitResult:
    """Least-squares slope of ``-ln p`` against ``t`` within ``window``.

    Samples with ``p < FIT_FLOOR`` are excluded with a warning.

    Raises
    ------
    DomainError
        For non-positive probabilities or fewer than three usable samples.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(probs, dtype=float)
    if t.shape != p.shape:
        raise DimensionError("times and probabilities differ in length")
    if window is not None:
        lo, hi = window
        span = max(abs(lo), abs(hi), 1.0)
        sel = (t >= lo - 1e-12 * span) & (t <= hi + 1e-12 * span)
        t, p = t[sel], p[sel]
    if np.any(~(p > 0)):
        raise DomainError("fit_decay_rate requires strictly positive probabilities")
    tiny = p < FIT_FLOOR
    if tiny.any():
        warnings.warn(f"excluding {int(tiny.sum())} samples below {FIT_FLOOR:g} from fit")
        t, p = t[~tiny], p[~tiny]
    if t.size < 3:
        raise DomainError(f"need at least 3 samples in window, have {t.size}")
    y = -np.log(p)
    design = np.column_stack([t, np.ones_like(t)])
    (rate, offset), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (rate * t + offset)
    return FitResult(float(rate), float(offset), float(np.sqrt(np.mean(resid**2))), int(t.size))


def default_fit_window(
    rate: float | None = None,
    traj: Trajectory | None = None,
    fraction: float = 0.01,
) -> tuple[float, float]:
    """``[0, fraction/rate]`` when an analytic rate is known, else ``[0, t at 1% norm loss]``."""
    if rate is not None and rate > 0:
        return (0.0, fraction / rate)
    if traj is None:
        raise DomainError("need a positive analytic rate or a trajectory to choose a fit window")
    norms = traj.norms()
    lost = np.flatnonzero(norms <= norms[0] * (1 - fraction))
    end = traj.times[lost[0]] if lost.size else traj.times[-1]
    if np.count_nonzero(traj.times <= end) < 3:
        end = traj.times[min(2, traj.times.size - 1)]
    return (0.0, float(end))


def sector_dimension(L: int, twice_m: int) -> int:
    _check_twice_m(L, twice_m)
    return comb(L, (L + twice_m) // 2)


def spectral_rates(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues of the generator and their multiplicities.

    A multiplet of total spin ``S`` contributes ``(S + M)(S - M + 1)`` for each
    ``M``; there are ``C(L, L/2 - S) - C(L, L/2 - S - 1)`` such multiplets.

    Returns
    -------
    rates, counts : ndarray
        Rates in units of gamma (sorted) and the number of basis dimensions at each.
    """
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L}")
    acc: dict[int, int] = {}
    for k in range(L // 2 + 1):  # k = L/2 - S
        mult = comb(L, k) - (comb(L, k - 1) if k else 0)
        two_s = L - 2 * k
        for two_m in range(-two_s, two_s + 1, 2):
            rate = (two_s + two_m) * (two_s - two_m + 2) // 4
            acc[rate] = acc.get(rate, 0) + mult
    rates = np.array(sorted(acc), dtype=float)
    counts = np.array([acc[int(r)] for r in rates], dtype=np.int64)
    return rates, counts


def coefficient_rates(
    psi0: np.ndarray, gen: CollectiveGenerator, window: float = 0.01, steps: int = 20
) -> np.ndarray:
    """Short-time decay rate of every ``|c_q|^2`` (units of gamma, gamma = 1).

    Each column is fitted by ``-ln p`` regression on ``[0, window]``; zero
    amplitudes give ``nan``.
    """
    traj = evolve(psi0, gen, DecayParams(), window, steps=steps)
    p = traj.probabilities()
    ok = np.all(p > FIT_FLOOR, axis=0)
    rates = np.full(p.shape[1], np.nan)
    if ok.any():
        X = np.column_stack([traj.times, np.ones_like(traj.times)])
        coef, *_ = np.linalg.lstsq(X, -np.log(p[:, ok]), rcond=None)
        rates[ok] = coef[0]
    return rates


def rate_histogram(
    L: int, gen: CollectiveGenerator, n_states: int = 20, bins: int = 20, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of per-coefficient rates over random initial states, in units of L^2/4.

    This is an empirical look at how many coefficients decay near the
    collective rate; nothing is asserted about the shape.
    """
    if gen.L != L:
        raise DimensionError(f"generator is for L={gen.L}, requested L={L}")
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_states):
        psi = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
        r = coefficient_rates(psi / np.linalg.norm(psi), gen)
        samples.append(r[np.isfinite(r)])
    scaled = np.concatenate(samples) / (L * L / 4)
    return np.histogram(scaled, bins=bins)
