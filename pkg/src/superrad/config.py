"""Experiment configuration: parsing, validation and canonical serialisation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

from superrad.errors import SuperradError
from superrad.statespace import L_MAX

__all__ = ["KINDS", "INITIAL_STATES", "ConfigError", "ExperimentConfig", "parse_config"]

KINDS = ("dicke", "evolve", "channel", "dfs-leakage", "scaling", "budget")
INITIAL_STATES = ("symmetric", "uniform", "dfs", "basis", "random", "file")


class ConfigError(SuperradError, ValueError):
    """One or more configuration fields are invalid."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


@dataclass
class ExperimentConfig:
    """All knobs of one experiment run.

    Times (``t_end``, ``fit_window``, ``dt``) are in units of ``1/gamma``;
    reported rates are in units of ``gamma``.
    """

    kind: str = "dicke"
    L: int | None = None
    L_list: list[int] | None = None
    twice_m: int | None = None
    gamma: float = 1.0
    delta_omega: float = 0.0
    omega_a: float = 1.0
    initial: str | None = None
    basis_index: int | None = None
    amplitude_file: str | None = None
    qubit: int = 0
    t_end: float | None = None
    steps: int | None = None
    fit_window: list[float] | None = None
    normalize: bool = True
    metric: str = "all"
    delta: float = 0.01
    target: str | int = "support"
    gate_count: float | None = None
    dt: float | None = None
    d: float | None = None
    lambda_a: float | None = None
    lambda_over_d: float | None = None
    threshold: float = 0.1
    top_k: int | None = None
    dump_generator: bool = False
    out_dir: str = "out"
    seed: int = 0
    workers: int = 1
    L_max: int = L_MAX
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown field {k!r}" for k in unknown])
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def L_values(self) -> list[int]:
        if self.L_list:
            return list(self.L_list)
        return [self.L] if self.L is not None else []

    def validate(self) -> ExperimentConfig:
        """Check every field and raise one :class:`ConfigError` listing all problems."""
        p: list[str] = []

        def is_int(x):
            return isinstance(x, int) and not isinstance(x, bool)

        def positive(name):
            v = getattr(self, name)
            if v is not None and not (isinstance(v, (int, float)) and v > 0):
                p.append(f"{name} must be > 0, got {v!r}")

        if self.kind not in KINDS:
            p.append(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("gamma", "omega_a", "t_end", "d", "lambda_a", "lambda_over_d", "threshold", "dt"):
            positive(name)
        if self.L is not None and not is_int(self.L):
            p.append(f"L must be an integer, got {self.L!r}")
        if self.L_list is not None and not (
            isinstance(self.L_list, list) and all(is_int(x) for x in self.L_list)
        ):
            p.append(f"L_list must be a list of integers, got {self.L_list!r}")
        Ls = [x for x in self.L_values() if is_int(x)]
        simulated = self.kind in ("dicke", "evolve", "channel", "dfs-leakage")
        if self.kind in KINDS and not Ls:
            p.append(f"{self.kind} needs L or L_list")
        for L in Ls:
            if L < 1:
                p.append(f"L must be >= 1, got {L}")
            elif simulated and L > self.L_max:
                p.append(f"L={L} exceeds L_max={self.L_max}")
        if self.L_list and any(b <= a for a, b in zip(self.L_list, self.L_list[1:])):
            p.append("L_list must be strictly ascending")
        if self.twice_m is not None:
            if not is_int(self.twice_m):
                p.append(f"twice_m must be an integer, got {self.twice_m!r}")
            else:
                for L in Ls:
                    if abs(self.twice_m) > L:
                        p.append(f"|twice_m|={abs(self.twice_m)} exceeds L={L}")
                    elif (self.twice_m - L) % 2:
                        p.append(
                            f"parity rule: twice_m={self.twice_m} must have the same parity as L={L}"
                        )
        if self.initial is not None and self.initial not in INITIAL_STATES:
            p.append(f"initial must be one of {INITIAL_STATES}, got {self.initial!r}")
        if self.initial == "symmetric" and self.twice_m is None:
            p.append("initial='symmetric' needs twice_m")
        if self.initial == "basis" and self.basis_index is None:
            p.append("initial='basis' needs basis_index")
        if self.initial == "file" and not self.amplitude_file:
            p.append("initial='file' needs amplitude_file")
        if self.initial == "dfs" or self.kind == "dfs-leakage":
            for L in Ls:
                if L % 2:
                    p.append(f"singlet-product states need even L, got L={L}")
        if self.basis_index is not None:
            for L in Ls:
                if not (is_int(self.basis_index) and 0 <= self.basis_index < (1 << min(L, 62))):
                    p.append(f"basis_index {self.basis_index!r} outside [0, 2**{L})")
        if not is_int(self.qubit) or any(not 0 <= self.qubit < L for L in Ls):
            p.append(f"qubit index {self.qubit!r} outside [0, L)")
        if self.steps is not None and not (is_int(self.steps) and self.steps >= 1):
            p.append(f"steps must be an integer >= 1, got {self.steps!r}")
        if self.fit_window is not None and not (
            isinstance(self.fit_window, list)
            and len(self.fit_window) == 2
            and 0 <= self.fit_window[0] < self.fit_window[1]
        ):
            p.append(f"fit_window must be [lo, hi] with 0 <= lo < hi, got {self.fit_window!r}")
        if self.metric not in ("M1", "M2", "M3", "all"):
            p.append(f"metric must be M1, M2, M3 or all, got {self.metric!r}")
        if not isinstance(self.delta, (int, float)) or self.delta < 0:
            p.append(f"delta must be a nonnegative real, got {self.delta!r}")
        if not (self.target in ("support", "excitation") or is_int(self.target)):
            p.append(f"target must be 'support', 'excitation' or an index, got {self.target!r}")
        if self.kind in ("scaling", "budget") and self.gate_count is None:
            p.append(f"{self.kind} needs gate_count")
        if self.gate_count is not None and not (
            isinstance(self.gate_count, (int, float)) and self.gate_count >= 0
        ):
            p.append(f"gate_count must be >= 0, got {self.gate_count!r}")
        if self.top_k is not None and not (is_int(self.top_k) and self.top_k >= 1):
            p.append(f"top_k must be an integer >= 1, got {self.top_k!r}")
        if not (is_int(self.workers) and self.workers >= 1):
            p.append(f"workers must be an integer >= 1, got {self.workers!r}")
        if not is_int(self.seed):
            p.append(f"seed must be an integer, got {self.seed!r}")
        if p:
            raise ConfigError(p)
        return self


def parse_config(text: str) -> ExperimentConfig:
    """Build a config from JSON text (no validation)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from None
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    return ExperimentConfig.from_dict(data)
