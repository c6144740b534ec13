"""Closed-form decay, success-probability and run-budget estimates.

Small samples (register much smaller than the wavelength) decay with the
collective rate ``L**2 * gamma / 4``. Large samples on a cubic grid of
spacing ``d`` replace ``gamma`` by ``mu * gamma`` where
``mu = 3/(8 pi^2) * (lambda_a / w)**2`` and ``w = L**(1/3) * d``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

from superrad.errors import DomainError

__all__ = [
    "FEASIBILITY_THRESHOLD",
    "LARGE_SAMPLE_CAVEAT",
    "GeometryParams",
    "RunBudget",
    "coherence_decay",
    "success_probability",
    "small_sample_budget",
    "collective_fraction",
    "large_sample_rate",
    "large_sample_budget",
    "polynomial_gate_count",
]

FEASIBILITY_THRESHOLD = 0.1

LARGE_SAMPLE_CAVEAT = (
    "large-sample budget is a lower bound: it assumes nearest-neighbour gates "
    "with light-propagation gate time and ignores routing and long-range gate overhead"
)


@dataclass(frozen=True)
class GeometryParams:
    """Cubic register of ``L`` atoms with spacing ``d`` at wavelength ``lambda_a``."""

    d: float
    lambda_a: float
    L: int

    def __post_init__(self):
        if not (self.d > 0 and self.lambda_a > 0):
            raise DomainError("d and lambda_a must be positive")
        if self.L < 1:
            raise DomainError(f"L must be >= 1, got {self.L}")

    @property
    def w(self) -> float:
        return self.L ** (1 / 3) * self.d

    @property
    def mu(self) -> float:
        return collective_fraction(self.lambda_a, self.w)


@dataclass(frozen=True)
class RunBudget:
    """Dimensionless decoherence budget of a full computation.

    The run is feasible when ``value < threshold``.
    """

    L: int
    gamma: float
    omega_a: float
    gate_count: float
    dt: float
    value: float
    threshold: float = FEASIBILITY_THRESHOLD
    kind: str = "small_sample"
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.value < self.threshold

    def as_dict(self) -> dict:
        d = asdict(self)
        d["feasible"] = self.feasible
        return d


def coherence_decay(rho0_offdiag: complex, L: int, gamma: float, t: float) -> complex:
    """Typical off-diagonal element ``rho(0) * exp(-L^2 gamma t / 4)``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return rho0_offdiag * math.exp(-(L**2) * gamma * t / 4)


def success_probability(L: int, gamma: float, R: float, dt: float) -> float:
    """``exp(-L^2 gamma R dt / 4)`` for ``R`` gates of duration ``dt``."""
    if min(L, gamma, R, dt) < 0:
        raise DomainError("success_probability inputs must be nonnegative")
    return math.exp(-(L**2) * gamma * R * dt / 4)


def small_sample_budget(
    L: int,
    gamma: float,
    omega_a: float,
    R: float,
    dt: float | None = None,
    threshold: float = FEASIBILITY_THRESHOLD,
) -> RunBudget:
    """Budget ``L^2 R gamma dt / 4``; ``dt`` defaults to ``1/omega_a``."""
    if min(gamma, omega_a) <= 0 or min(L, R) < 0:
        raise DomainError("small_sample_budget needs gamma, omega_a > 0 and L, R >= 0")
    if dt is None:
        dt = 1 / omega_a
    value = L**2 * R * gamma * dt / 4
    return RunBudget(L, gamma, omega_a, R, dt, value, threshold, "small_sample")


def collective_fraction(lambda_a: float, w: float) -> float:
    """Fraction ``3/(8 pi^2) * (lambda_a/w)**2`` of modes that couple to every atom."""
    if not (lambda_a > 0 and w > 0):
        raise DomainError("lambda_a and w must be positive")
    return 3 / (8 * math.pi**2) * (lambda_a / w) ** 2


def large_sample_rate(
    L: int, gamma: float, geom: GeometryParams, form: str = "exact"
) -> float:
    """Collective emission rate of a large cubic sample.

    ``form="exact"`` gives ``(L/2)(L/2 + 1) mu gamma``; ``form="asymptotic"``
    gives ``3/(32 pi^2) (lambda_a/d)^2 L^(4/3) gamma``. Their ratio is
    ``1 + 2/L``.
    """
    if geom.L != L:
        raise DomainError(f"geometry is for L={geom.L}, requested L={L}")
    if form == "exact":
        return (L / 2) * (L / 2 + 1) * geom.mu * gamma
    if form == "asymptotic":
        return 3 / (32 * math.pi**2) * (geom.lambda_a / geom.d) ** 2 * L ** (4 / 3) * gamma
    raise DomainError(f"form must be 'exact' or 'asymptotic', got {form!r}")


def large_sample_budget(
    L: int,
    gamma: float,
    omega_a: float,
    R: float,
    lambda_over_d: float,
    dt: float | None = None,
    threshold: float = FEASIBILITY_THRESHOLD,
    warn: bool = False,
) -> RunBudget:
    """Budget ``3/(32 pi^2) (lambda_a/d)^2 L^(4/3) R gamma dt``.

    ``dt`` defaults to the light travel time between neighbours,
    ``(2 pi / omega_a) / lambda_over_d``, which reduces the budget to
    ``3/(16 pi) (lambda_a/d) L^(4/3) R gamma / omega_a``.
    """
    if min(gamma, omega_a, lambda_over_d) <= 0 or min(L, R) < 0:
        raise DomainError("large_sample_budget needs positive gamma, omega_a, lambda_over_d")
    if dt is None:
        dt = 2 * math.pi / (omega_a * lambda_over_d)
    value = 3 / (32 * math.pi**2) * lambda_over_d**2 * L ** (4 / 3) * R * gamma * dt
    if warn:
        warnings.warn(LARGE_SAMPLE_CAVEAT, stacklevel=2)
    return RunBudget(
        L, gamma, omega_a, R, dt, value, threshold, "large_sample",
        {"lambda_over_d": lambda_over_d, "caveat": LARGE_SAMPLE_CAVEAT},
    )


def polynomial_gate_count(L: int, a: float, b: float) -> float:
    """Gate-count model ``R(L) = a * L**b``."""
    return a * L**b
