"""Single-qubit view of collective decay.

Reduced density matrices are plain ``(2, 2)`` complex arrays in the basis
``(|g>, |e>)``::

    [[rho_gg, rho_ge],
     [rho_eg, rho_ee]]

They are built from the zero-photon amplitudes only, so the trace equals
the surviving zero-photon probability and drops below one as photons are
emitted.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from superrad.dynamics import Trajectory, fit_decay_rate, num_atoms
from superrad.errors import DomainError
from superrad.io import write_csv

__all__ = [
    "ChannelRates",
    "reduce",
    "reduce_trajectory",
    "is_valid_density_matrix",
    "channel_rates",
    "gate_error",
    "write_channel_report",
]

#: relative magnitude below which a density-matrix entry counts as zero
VANISHING = 1e-14


def reduce(psi: np.ndarray, a: int) -> np.ndarray:
    """Reduced density matrix of atom ``a`` after tracing out the others.

    The amplitudes are split by atom ``a``'s bit into ``c_k`` (ground) and
    ``d_k`` (excited), ``k`` labelling the remaining atoms; then
    ``rho_gg = sum |c_k|^2``, ``rho_ee = sum |d_k|^2`` and
    ``rho_ge = sum c_k conj(d_k)``.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    L = num_atoms(psi)
    if not 0 <= a < L:
        raise DomainError(f"qubit index {a} outside [0, {L})")
    split = psi.reshape(1 << (L - 1 - a), 2, 1 << a)
    c = split[:, 0, :].ravel()
    d = split[:, 1, :].ravel()
    rho_ge = np.vdot(d, c)
    return np.array(
        [[np.vdot(c, c).real, rho_ge], [np.conj(rho_ge), np.vdot(d, d).real]],
        dtype=np.complex128,
    )


def reduce_trajectory(traj: Trajectory, a: int) -> np.ndarray:
    """Stack of reduced matrices, shape ``(len(traj.times), 2, 2)``."""
    L = traj.L
    if not 0 <= a < L:
        raise DomainError(f"qubit index {a} outside [0, {L})")
    split = traj.states.reshape(-1, 1 << (L - 1 - a), 2, 1 << a)
    c = split[:, :, 0, :].reshape(len(traj.times), -1)
    d = split[:, :, 1, :].reshape(len(traj.times), -1)
    rho = np.empty((len(traj.times), 2, 2), dtype=np.complex128)
    rho[:, 0, 0] = np.sum(np.abs(c) ** 2, axis=1)
    rho[:, 1, 1] = np.sum(np.abs(d) ** 2, axis=1)
    rho[:, 0, 1] = np.sum(c * d.conj(), axis=1)
    rho[:, 1, 0] = rho[:, 0, 1].conj()
    return rho


def is_valid_density_matrix(rho: np.ndarray, atol: float = 1e-12) -> bool:
    """Hermitian, positive semidefinite, and ``0 < trace <= 1``."""
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=atol):
        return False
    tr = rho.trace().real
    if not 0 < tr <= 1 + atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -atol)


@dataclass(frozen=True)
class ChannelRates:
    """Fitted relaxation rates of one qubit.

    A rate is ``nan`` when its entry vanishes in only part of the window
    (log-fit undefined). An entry that is zero throughout is stationary and
    gets rate ``0.0``; the ``*_vanishing`` flags record both cases.
    """

    longitudinal: float
    transverse: float
    residual_long: float
    residual_trans: float
    long_vanishing: bool = False
    trans_vanishing: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _fit_component(times, values, scale, window):
    tiny = np.abs(values) <= VANISHING * scale
    if window is not None:
        lo, hi = window
        sel = (times >= lo) & (times <= hi)
        times, values, tiny = times[sel], values[sel], tiny[sel]
    if tiny.all():
        return 0.0, 0.0, True
    if tiny.any():
        return math.nan, math.nan, True
    fit = fit_decay_rate(times, values)
    return fit.rate, fit.residual_rms, False


def channel_rates(
    traj: Trajectory,
    a: int,
    window: tuple[float, float] | None = None,
    normalize: bool = True,
) -> ChannelRates:
    """Longitudinal and transverse decay rates of qubit ``a``.

    Parameters
    ----------
    window : (float, float), optional
        Time interval used for the fit; whole trajectory if omitted.
    normalize : bool
        Fit ``rho_ee/tr`` and ``|rho_ge|/tr`` (default). With ``False`` the
        raw zero-photon entries are fitted, which for a single atom are the
        physical populations and coherences.
    """
    if window is not None:
        lo, hi = window
        if lo < traj.times[0] - 1e-12 or hi > traj.times[-1] * (1 + 1e-12) or hi <= lo:
            raise DomainError(f"window {window} not inside trajectory span")
    rho = reduce_trajectory(traj, a)
    trace = (rho[:, 0, 0] + rho[:, 1, 1]).real
    pop = rho[:, 1, 1].real
    coh = np.abs(rho[:, 0, 1])
    if normalize:
        pop, coh = pop / trace, coh / trace
        scale = 1.0
    else:
        scale = float(trace[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lg, lr, lv = _fit_component(traj.times, pop, scale, window)
        tg, tr_, tv = _fit_component(traj.times, coh, scale, window)
    return ChannelRates(lg, tg, lr, tr_, lv, tv)


def gate_error(L: int, gamma: float, dt: float) -> float:
    """Per-gate error probability ``L * gamma * dt / 2`` on one qubit."""
    eps = L * gamma * dt / 2
    if eps >= 0.5:
        warnings.warn(f"gate error {eps:.3g} is outside the small-error regime (< 0.5)")
    return eps


def write_channel_report(path: str | os.PathLike, entries) -> None:
    """``entries`` is an iterable of ``(L, ChannelRates)``."""
    write_csv(
        path,
        ["L", "longitudinal_rate", "transverse_rate", "fit_residual_long", "fit_residual_trans"],
        ([L, r.longitudinal, r.transverse, r.residual_long, r.residual_trans] for L, r in entries),
    )
