"""Collective radiative decay (superradiance) of small qubit registers.

Submodules
----------
statespace     basis conventions and the sparse collective generator
dynamics       RK4 / eigen-solution time evolution, Dicke rates, decay fits
qubit_channel  single-qubit reduced density matrices and channel rates
dfs            singlet-product states and perturbation leakage
scaling        closed-form success probability and run budgets
"""

__version__ = "0.1.0"

from superrad.errors import (  # noqa: E402
    DimensionError,
    DomainError,
    NumericError,
    SizeError,
    SuperradError,
)
from superrad.statespace import (  # noqa: E402
    BasisState,
    CollectiveGenerator,
    DecayParams,
    build_generator,
    lower_set,
    oracle_generator,
    raise_set,
    twice_inversion,
)
from superrad.dynamics import (  # noqa: E402
    Trajectory,
    dicke_rate,
    evolve,
    evolve_exact,
    fit_decay_rate,
    symmetric_state,
    uniform_state,
)
from superrad.qubit_channel import channel_rates, gate_error, reduce  # noqa: E402
from superrad.dfs import (  # noqa: E402
    dfs_state,
    leakage_rate,
    leakage_sweep,
    perturb,
    stationarity_residual,
)
from superrad.scaling import (  # noqa: E402
    GeometryParams,
    RunBudget,
    coherence_decay,
    collective_fraction,
    large_sample_budget,
    large_sample_rate,
    small_sample_budget,
    success_probability,
)
