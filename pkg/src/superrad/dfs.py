"""Singlet-product states, stationarity checks and perturbation leakage.

The decoherence-free states used here are products of two-atom singlets
``(|ge> - |eg>)/sqrt(2)`` on the atom pairs ``(0, 1), (2, 3), ...``. With
the package bit convention ``|ge>`` on pair ``(2j, 2j+1)`` means atom
``2j`` in ground and atom ``2j+1`` excited, so for ``L = 2`` the state is
``(|0b10> - |0b01>)/sqrt(2)``.

Leakage metrics
---------------
The perturbed state ``psi`` is split into its kernel part (stationary
under the dynamics) and the remainder ``psi_perp``.

``"M1"``
    ``gamma * <psi_perp|A|psi_perp> / |psi_perp|^2``, the instantaneous
    decay rate of the non-stationary probability.
``"M2"``
    ``gamma * sum_q |(A psi)_q| / |psi_perp|``, total rate of amplitude
    change across the register per unit error amplitude.
``"M3"``
    Log-linear fit of ``|psi_perp(t)|^2`` over a short window of an RK4
    trajectory.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse.linalg import expm_multiply

from superrad.dynamics import evolve, fit_decay_rate
from superrad.errors import DimensionError, DomainError, NumericError
from superrad.io import write_csv, write_json
from superrad.statespace import (
    BasisState,
    CollectiveGenerator,
    DecayParams,
    build_generator,
    popcount,
)

__all__ = [
    "METRICS",
    "LeakageResult",
    "LeakageSweep",
    "dfs_state",
    "dfs_support",
    "stationarity_residual",
    "perturb",
    "perturbation_target",
    "kernel_projection",
    "sector_kernel_dimension",
    "leakage_rate",
    "quadratic_fit",
    "leakage_sweep",
    "write_sweep_csv",
    "write_sweep_summary",
]

METRICS = ("M1", "M2", "M3")

#: dense eigensolves are used for sectors up to this dimension
DENSE_SECTOR_MAX = 2000
#: kernel eigenvalues of the integer generator are 0; the rest are >= 1
KERNEL_TOL = 1e-8
#: |psi_perp| below this means the state is stationary
STATIONARY_TOL = 1e-13


def _check_even(L: int) -> None:
    if L < 2 or L % 2:
        raise DomainError(f"singlet-product states need even L >= 2, got L={L}")


def dfs_state(L: int) -> np.ndarray:
    _check_even(L)
    pair = np.zeros(4, dtype=np.complex128)
    # local index = bit(2j) + 2*bit(2j+1)
    pair[0b10] = 1 / math.sqrt(2)
    pair[0b01] = -1 / math.sqrt(2)
    psi = np.ones(1, dtype=np.complex128)
    for _ in range(L // 2):
        psi = np.kron(pair, psi)
    return psi


def dfs_support(L: int) -> np.ndarray:
    return np.flatnonzero(dfs_state(L))


def stationarity_residual(psi: np.ndarray, gen: CollectiveGenerator) -> float:
    """``||A psi||``; zero exactly on the kernel of the generator."""
    psi = np.asarray(psi)
    if psi.shape != (gen.dim,):
        raise DimensionError(f"state shape {psi.shape} does not match generator dim {gen.dim}")
    return float(np.linalg.norm(gen.matvec(psi)))


def perturb(psi: np.ndarray, q: int | BasisState, delta: complex) -> np.ndarray:
    """Add ``delta`` to amplitude ``q`` and renormalise."""
    index = q.index if isinstance(q, BasisState) else int(q)
    out = np.array(psi, dtype=np.complex128)
    out[index] += delta
    norm = np.linalg.norm(out)
    if norm == 0:
        raise NumericError("perturbation cancelled the state to zero norm")
    return out / norm


def perturbation_target(L: int, kind: str | int = "support") -> int:
    """Basis index to perturb.

    ``"support"`` picks the lowest-index amplitude of the singlet product
    (an existing amplitude changes). ``"excitation"`` picks the state
    reached from a supported configuration by exciting atom 0, i.e. a
    single spurious excitation; it has no kernel component. An integer is
    returned unchanged after a range check.
    """
    _check_even(L)
    if isinstance(kind, (int, np.integer)):
        if not 0 <= kind < (1 << L):
            raise DomainError(f"target {kind} outside [0, 2**{L})")
        return int(kind)
    if kind == "support":
        return int(dfs_support(L)[0])
    if kind == "excitation":
        # pairs in |ge>: atom 2j+1 excited, atom 0 ground
        base = sum(1 << (2 * j + 1) for j in range(L // 2))
        return base | 1
    raise DomainError(f"unknown perturbation target {kind!r}")


@lru_cache(maxsize=64)
def _dense_sector_kernel(L: int, n_excited: int) -> tuple[np.ndarray, np.ndarray]:
    gen = _generator(L)
    idx, block = gen.sector_block(2 * n_excited - L)
    evals, vecs = np.linalg.eigh(block.astype(np.float64))
    if np.any((evals > KERNEL_TOL) & (evals < 0.5)):
        raise NumericError(f"ill-conditioned kernel split in sector n_e={n_excited}, L={L}")
    return idx, vecs[:, evals <= KERNEL_TOL]


@lru_cache(maxsize=8)
def _generator(L: int) -> CollectiveGenerator:
    return build_generator(L)


def sector_kernel_dimension(L: int, twice_m: int) -> int:
    """Multiplicity of eigenvalue 0 of the generator inside one inversion sector."""
    _, K = _dense_sector_kernel(L, (L + twice_m) // 2)
    return K.shape[1]


def _late_time_kernel(gen: CollectiveGenerator, psi_sector: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # non-kernel eigenvalues are >= 1, so exp(-A T) leaves the kernel part only
    block = gen.as_float()[idx][:, idx]
    return expm_multiply(-80.0 * block, psi_sector)


def kernel_projection(psi: np.ndarray, gen: CollectiveGenerator) -> np.ndarray:
    """Orthogonal projection of ``psi`` onto the kernel of the generator.

    The generator conserves inversion, so the projection is done sector by
    sector: a dense eigensolve for small sectors, otherwise relaxation of the
    sector amplitudes to late times.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (gen.dim,):
        raise DimensionError(f"state shape {psi.shape} does not match generator dim {gen.dim}")
    L = gen.L
    n_e = popcount(np.arange(gen.dim), L)
    out = np.zeros_like(psi)
    for k in np.unique(n_e[psi != 0]):
        idx = np.flatnonzero(n_e == k)
        if idx.size <= DENSE_SECTOR_MAX:
            idx, K = _dense_sector_kernel(L, int(k))
            out[idx] = K @ (K.T @ psi[idx])
        else:
            out[idx] = _late_time_kernel(gen, psi[idx], idx)
    if not np.all(np.isfinite(out)):
        raise NumericError("kernel projection produced non-finite amplitudes")
    return out


@dataclass(frozen=True)
class LeakageResult:
    L: int
    delta: complex
    metric: str
    rate: float
    fit_residual: float
    target: int

    @property
    def rate_over_gamma(self) -> float:
        return self.rate

    def as_row(self) -> list:
        d = self.delta
        delta = d.real if isinstance(d, complex) and d.imag == 0 else d
        return [self.L, delta, self.metric, self.rate, self.fit_residual]


def leakage_rate(
    L: int,
    q: int | str = "support",
    delta: complex = 0.01,
    metric: str = "M1",
    gen: CollectiveGenerator | None = None,
    params: DecayParams | None = None,
    window_fraction: float = 0.01,
    fit_points: int = 20,
) -> LeakageResult:
    """Leakage rate of a singlet product with one amplitude shifted by ``delta``.

    Rates are reported in units of ``params.gamma``. See the module
    docstring for the metric definitions.
    """
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {METRICS}, got {metric!r}")
    _check_even(L)
    params = params or DecayParams()
    gen = gen or _generator(L)
    if gen.L != L:
        raise DimensionError(f"generator is for L={gen.L}, requested L={L}")
    target = perturbation_target(L, q)
    if delta == 0:
        return LeakageResult(L, complex(delta), metric, 0.0, 0.0, target)
    psi = perturb(dfs_state(L), target, delta)
    psi_ker = kernel_projection(psi, gen)
    psi_perp = psi - psi_ker
    perp_norm = float(np.linalg.norm(psi_perp))
    if perp_norm <= STATIONARY_TOL:
        return LeakageResult(L, complex(delta), metric, 0.0, 0.0, target)

    g = params.gamma
    A_perp = gen.matvec(psi_perp)
    m1 = g * np.vdot(psi_perp, A_perp).real / perp_norm**2
    if metric == "M1":
        return LeakageResult(L, complex(delta), metric, float(m1) / g, 0.0, target)
    if metric == "M2":
        m2 = g * np.abs(gen.matvec(psi)).sum() / perp_norm
        return LeakageResult(L, complex(delta), metric, float(m2) / g, 0.0, target)

    t_window = window_fraction / m1
    traj = evolve(psi, gen, params, t_window, steps=fit_points)
    perp_t = np.linalg.norm(traj.states - psi_ker, axis=1) ** 2
    fit = fit_decay_rate(traj.times, perp_t)
    return LeakageResult(L, complex(delta), metric, fit.rate / g, fit.residual_rms, target)


def quadratic_fit(L_values, rates) -> tuple[float, float]:
    """Least-squares ``c`` in ``rate = c * L**2`` and the coefficient of determination."""
    L = np.asarray(L_values, dtype=float)
    r = np.asarray(rates, dtype=float)
    x = L**2
    c = float(x @ r / (x @ x))
    ss_res = float(np.sum((r - c * x) ** 2))
    ss_tot = float(np.sum((r - r.mean()) ** 2))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else 0.0
    else:
        r2 = 1 - ss_res / ss_tot
    return c, r2


@dataclass
class LeakageSweep:
    results: list[LeakageResult]
    c_quadratic: float
    r_squared: float
    metric: str
    target: str | int

    @property
    def label(self) -> str:
        return self.metric if self.target == "support" else f"{self.metric}:{self.target}"

    def summary(self) -> dict:
        return {
            "metric": self.metric,
            "target": self.target,
            "c_quadratic": self.c_quadratic,
            "r_squared": self.r_squared,
            "L": [r.L for r in self.results],
            "rate_over_gamma": [r.rate for r in self.results],
        }


def leakage_sweep(
    L_values,
    delta: complex = 0.01,
    metric: str = "M1",
    params: DecayParams | None = None,
    target: str | int = "support",
    workers: int = 1,
) -> LeakageSweep:
    """Run :func:`leakage_rate` for every ``L`` and fit ``rate = c L^2``."""
    L_values = [int(L) for L in L_values]
    if not L_values:
        raise DomainError("L_values is empty")
    for L in L_values:
        _check_even(L)
    if any(b <= a for a, b in zip(L_values, L_values[1:])):
        raise DomainError("L_values must be strictly ascending")
    params = params or DecayParams()

    def one(L):
        return leakage_rate(L, target, delta, metric, _generator(L), params)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, L_values))
    else:
        results = [one(L) for L in L_values]
    c, r2 = quadratic_fit(L_values, [r.rate for r in results])
    return LeakageSweep(results, c, r2, metric, target)


def write_sweep_csv(path: str | os.PathLike, sweeps) -> None:
    rows = [r.as_row() for sweep in sweeps for r in sweep.results]
    write_csv(path, ["L", "delta", "metric", "rate_over_gamma", "fit_residual"], rows)


def write_sweep_summary(path: str | os.PathLike, sweeps, extra: dict | None = None) -> None:
    doc = {"metrics": {s.label: {"c_quadratic": s.c_quadratic, "r_squared": s.r_squared,
                                  "target": s.target} for s in sweeps}}
    if extra:
        doc.update(extra)
    write_json(path, doc)
