"""
Single-qubit view of collective decay
=====================================

Trace out every atom but one and watch the populations and the coherence of
the remaining qubit. Rates come from a log-linear fit over a short window.
"""

import numpy as np

from superrad import DecayParams, build_generator, channel_rates, evolve, uniform_state
from superrad.qubit_channel import reduce

for L in (4, 6, 8, 10):
    traj = evolve(uniform_state(L), build_generator(L), DecayParams(), 0.01, steps=50)
    r = channel_rates(traj, 0)
    print(f"L={L:2d}  longitudinal {r.longitudinal:.4f}  transverse {r.transverse:.4f}")

# the zero-photon state is unnormalised; the raw single-atom entries decay at gamma and gamma/2
psi = np.array([1, 1], dtype=complex) / np.sqrt(2)
traj = evolve(psi, build_generator(1), DecayParams(), 0.5, steps=200)
raw = channel_rates(traj, 0, normalize=False)
print("L=1 raw rates:", raw.longitudinal, raw.transverse)
print("rho(t_end) =\n", np.round(reduce(traj.states[-1], 0), 4))
