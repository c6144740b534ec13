"""
Dicke superradiance in a small register
=======================================

A symmetric state with ``n_e`` excited atoms out of ``L`` decays with the
rate ``n_e (n_g + 1) gamma``. We build the collective generator, evolve each
symmetric state for a short window and fit the decay rate.
"""

import numpy as np

from superrad import DecayParams, build_generator, dicke_rate, evolve, fit_decay_rate, symmetric_state
from superrad.dynamics import default_fit_window

L = 6
gen = build_generator(L)
params = DecayParams(gamma=1.0)
print(f"L={L}: {gen.dim} basis states, {gen.nnz} nonzeros")

# sweep every inversion sector, 2M = -L ... L
for twice_m in range(-L, L + 1, 2):
    rate = dicke_rate(L, twice_m)
    lo, hi = default_fit_window(rate if rate > 0 else 1.0)
    traj = evolve(symmetric_state(L, twice_m), gen, params, hi, steps=50)
    fit = fit_decay_rate(traj.times, traj.norms(), (lo, hi))
    print(f"2M={twice_m:+d}  analytic {rate:5.1f}  fitted {fit.rate:8.4f}")

# the half-excited state is the fastest: (L/2)(L/2 + 1)
print("peak rate / L^2:", dicke_rate(L, 0) / L**2)

# how much of the Hilbert space decays near L^2/4? exact spectrum, then an empirical look
from superrad.dynamics import rate_histogram, spectral_rates

rates, counts = spectral_rates(L)
near = counts[rates >= 0.5 * L**2 / 4].sum() / counts.sum()
print(f"fraction of dimensions with rate >= L^2/8: {near:.3f}")
hist, edges = rate_histogram(L, gen, n_states=10, bins=8)
print("per-coefficient rates / (L^2/4):", hist, np.round(edges, 2))
