"""Experiment runners behind the ``superrad`` command.

Each runner takes a validated :class:`ExperimentConfig`, writes its data
files into ``config.out_dir`` and returns the list of paths written. Data
files never contain timestamps, so identical configs give identical bytes.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from superrad import dfs, dynamics, qubit_channel, scaling
from superrad.config import ExperimentConfig
from superrad.errors import DomainError
from superrad.io import write_csv, write_json
from superrad.statespace import DecayParams, build_generator

__all__ = ["RUNNERS", "initial_state", "emit_plot_data"]


def _params(cfg: ExperimentConfig) -> DecayParams:
    return DecayParams(cfg.gamma, cfg.delta_omega, cfg.omega_a)


def _load_amplitudes(path: str, L: int) -> np.ndarray:
    p = Path(path)
    if p.suffix == ".npy":
        psi = np.load(p).astype(np.complex128)
    else:
        data = np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2)
        psi = data[:, 0] + 1j * (data[:, 1] if data.shape[1] > 1 else 0.0)
    if psi.shape != (1 << L,):
        raise DomainError(f"{path}: expected {1 << L} amplitudes, found {psi.shape}")
    return psi


def initial_state(cfg: ExperimentConfig, L: int, default: str = "uniform") -> np.ndarray:
    """State named by ``cfg.initial`` (``default`` when unset)."""
    kind = cfg.initial or default
    if kind == "symmetric":
        return dynamics.symmetric_state(L, cfg.twice_m)
    if kind == "uniform":
        return dynamics.uniform_state(L)
    if kind == "dfs":
        return dfs.dfs_state(L)
    if kind == "basis":
        return dynamics.basis_state(L, cfg.basis_index)
    if kind == "random":
        rng = np.random.default_rng(cfg.seed)
        psi = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
        return psi / np.linalg.norm(psi)
    if kind == "file":
        return _load_amplitudes(cfg.amplitude_file, L)
    raise DomainError(f"unknown initial state {kind!r}")


def emit_plot_data(
    results: Sequence[tuple[float, float]],
    path: str | os.PathLike,
    x_name: str = "L",
    y_name: str = "rate_over_gamma",
    reference: tuple[str, Callable[[float], float]] | None = None,
) -> Path:
    """Write ``x,y[,reference]`` columns for external plotting."""
    if not results:
        raise DomainError("emit_plot_data needs at least one result")
    header = [x_name, y_name]
    if reference is not None:
        header.append(reference[0])
    rows = []
    for x, y in results:
        row = [x, y]
        if reference is not None:
            row.append(reference[1](x))
        rows.append(row)
    return write_csv(path, header, rows)


def run_dicke(cfg: ExperimentConfig) -> list[Path]:
    params = _params(cfg)
    out = Path(cfg.out_dir)
    rows = []
    for L in cfg.L_values():
        gen = build_generator(L, cfg.L_max)
        sectors = [cfg.twice_m] if cfg.twice_m is not None else list(range(-L, L + 1, 2))
        for twice_m in sectors:
            analytic = dynamics.dicke_rate(L, twice_m, params.gamma)
            if cfg.fit_window is not None:
                window = (cfg.fit_window[0] / params.gamma, cfg.fit_window[1] / params.gamma)
            else:
                window = dynamics.default_fit_window(analytic if analytic > 0 else params.gamma)
            steps = cfg.steps or 50
            traj = dynamics.evolve(
                dynamics.symmetric_state(L, twice_m), gen, params, window[1], steps=steps
            )
            fit = dynamics.fit_decay_rate(traj.times, traj.norms(), window)
            fitted = fit.rate / params.gamma
            ref = analytic / params.gamma
            rel = abs(fitted - ref) / ref if ref else abs(fitted)
            rows.append([L, twice_m, ref, fitted, rel, fit.residual_rms])
    path = write_csv(
        out / "dicke.csv",
        ["L", "twice_m", "analytic_rate_over_gamma", "fitted_rate_over_gamma",
         "relative_error", "fit_residual"],
        rows,
    )
    return [path]


def run_evolve(cfg: ExperimentConfig) -> list[Path]:
    params = _params(cfg)
    out = Path(cfg.out_dir)
    written = []
    for L in cfg.L_values():
        gen = build_generator(L, cfg.L_max)
        psi0 = initial_state(cfg, L)
        t_end = (cfg.t_end or 1.0) / params.gamma
        traj = dynamics.evolve(psi0, gen, params, t_end, steps=cfg.steps)
        suffix = f"_L{L}" if len(cfg.L_values()) > 1 else ""
        path = out / f"trajectory{suffix}.csv"
        traj.to_csv(path, top_k=cfg.top_k)
        written.append(path)
        if cfg.dump_generator:
            gpath = out / f"generator{suffix}.csv"
            gen.to_csv(gpath)
            written.append(gpath)
    return written


def run_channel(cfg: ExperimentConfig) -> list[Path]:
    params = _params(cfg)
    out = Path(cfg.out_dir)
    entries = []
    for L in cfg.L_values():
        gen = build_generator(L, cfg.L_max)
        psi0 = initial_state(cfg, L)
        t_end = (cfg.t_end or 0.01) / params.gamma
        traj = dynamics.evolve(psi0, gen, params, t_end, steps=cfg.steps or 50)
        window = None
        if cfg.fit_window is not None:
            window = (cfg.fit_window[0] / params.gamma, cfg.fit_window[1] / params.gamma)
        rates = qubit_channel.channel_rates(traj, cfg.qubit, window, normalize=cfg.normalize)
        g = params.gamma
        entries.append((L, qubit_channel.ChannelRates(
            rates.longitudinal / g, rates.transverse / g,
            rates.residual_long, rates.residual_trans,
            rates.long_vanishing, rates.trans_vanishing,
        )))
    path = out / "channel.csv"
    qubit_channel.write_channel_report(path, entries)
    return [path]


def run_dfs_leakage(cfg: ExperimentConfig) -> list[Path]:
    params = _params(cfg)
    out = Path(cfg.out_dir)
    metrics = dfs.METRICS if cfg.metric == "all" else (cfg.metric,)
    sweeps = [
        dfs.leakage_sweep(cfg.L_values(), cfg.delta, m, params, cfg.target, cfg.workers)
        for m in metrics
    ]
    written = [out / "leakage.csv", out / "leakage_summary.json"]
    dfs.write_sweep_csv(written[0], sweeps)
    dfs.write_sweep_summary(written[1], sweeps, {"delta": cfg.delta, "target": cfg.target})
    for s in sweeps:
        path = out / f"leakage_plot_{s.metric}.csv"
        emit_plot_data(
            [(r.L, r.rate) for r in s.results], path,
            reference=("ref_Lsq_over_4", lambda L: L * L / 4),
        )
        written.append(path)
    return written


def run_scaling(cfg: ExperimentConfig) -> list[Path]:
    out = Path(cfg.out_dir)
    dt = cfg.dt if cfg.dt is not None else 1.0
    rows, plot = [], []
    has_geom = cfg.d is not None and cfg.lambda_a is not None
    for L in cfg.L_values():
        p = scaling.success_probability(L, 1.0, cfg.gate_count, dt)
        row = [L, p, (L / 2) * (L / 2 + 1)]
        if has_geom:
            geom = scaling.GeometryParams(cfg.d, cfg.lambda_a, L)
            row += [
                geom.mu,
                scaling.large_sample_rate(L, 1.0, geom, "exact"),
                scaling.large_sample_rate(L, 1.0, geom, "asymptotic"),
            ]
        rows.append(row)
        plot.append((L, p))
    header = ["L", "success_probability", "small_sample_rate_over_gamma"]
    if has_geom:
        header += ["mu", "large_sample_rate_exact", "large_sample_rate_asymptotic"]
    written = [write_csv(out / "scaling.csv", header, rows)]
    written.append(emit_plot_data(plot, out / "scaling_plot.csv", "L", "success_probability"))
    return written


def run_budget(cfg: ExperimentConfig) -> list[Path]:
    out = Path(cfg.out_dir)
    reports = []
    dt_abs = None if cfg.dt is None else cfg.dt / cfg.gamma
    for L in cfg.L_values():
        small = scaling.small_sample_budget(
            L, cfg.gamma, cfg.omega_a, cfg.gate_count, dt_abs, cfg.threshold
        )
        entry = {"L": L, "small_sample": small.as_dict()}
        if cfg.lambda_over_d is not None:
            large = scaling.large_sample_budget(
                L, cfg.gamma, cfg.omega_a, cfg.gate_count, cfg.lambda_over_d, None, cfg.threshold
            )
            entry["large_sample"] = large.as_dict()
        reports.append(entry)
    doc = {
        "inputs": {
            "gamma": cfg.gamma, "omega_a": cfg.omega_a, "gate_count": cfg.gate_count,
            "dt_over_gamma_inverse": cfg.dt, "lambda_over_d": cfg.lambda_over_d,
        },
        "threshold": cfg.threshold,
        "budgets": reports,
    }
    if cfg.lambda_over_d is not None:
        doc["caveat"] = scaling.LARGE_SAMPLE_CAVEAT
    return [write_json(out / "budget.json", doc)]


RUNNERS: dict[str, Callable[[ExperimentConfig], list[Path]]] = {
    "dicke": run_dicke,
    "evolve": run_evolve,
    "channel": run_channel,
    "dfs-leakage": run_dfs_leakage,
    "scaling": run_scaling,
    "budget": run_budget,
}
