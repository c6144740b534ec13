"""
How many gates before collective decay wins
===========================================

Closed-form success probability and feasibility budgets for small samples
(all atoms within a wavelength) and large cubic samples.
"""

from superrad import GeometryParams, large_sample_budget, large_sample_rate, small_sample_budget, success_probability

# small sample: gate time ~ 1/omega_a
for L in (10, 100, 1000):
    b = small_sample_budget(L, gamma=1e-8, omega_a=1.0, R=L**3)
    print(f"L={L:5d}  R=L^3  budget {b.value:.3g}  feasible {b.feasible}")

print("P_success(L=10, R=1000):", success_probability(10, 1e-6, 1000, 1.0))

# large sample: only a fraction mu of modes couples collectively
for L in (8, 64, 512):
    g = GeometryParams(d=1.0, lambda_a=1.0, L=L)
    ex, asym = large_sample_rate(L, 1.0, g), large_sample_rate(L, 1.0, g, "asymptotic")
    print(f"L={L:4d}  mu={g.mu:.2e}  exact/asymptotic = {ex / asym:.4f}")

b = large_sample_budget(8, 1e-6, 1.0, 1e3, lambda_over_d=1.0, warn=False)
print("large-sample budget:", b.value, b.extra["caveat"])
