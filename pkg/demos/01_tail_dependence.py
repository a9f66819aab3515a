"""Estimating tail dependence between heavy-tailed channels.

Builds the three-channel benchmark (P4 and T6 share extremes through a
lag-one moving average; T3 is independent) and shows that the empirical
tail correlation recovers the analytic value for the dependent pair
while the independent pairs sit at the estimation floor.
"""

import numpy as np

from exco import absolute_amplitude, chi_matrix, empirical_pareto_transform, make_fig3_triplet
from exco.simulate import TRIPLET_ALPHA, TRIPLET_MA3

# --- generate the benchmark -------------------------------------------------
# 10^6 samples keeps the Monte Carlo error on chi below ~0.02 at q = 0.998.
triplet = make_fig3_triplet(10**6, seed=0)
print(f"channels: {triplet.channels}, shape: {triplet.samples.shape}")

# --- transform to unit-Pareto margins and estimate chi ----------------------
pareto = empirical_pareto_transform(absolute_amplitude(triplet))
chi = chi_matrix(pareto, q=0.998)

print("\npairwise tail correlation at the 0.998 marginal quantile:")
header = "      " + "".join(f"{c:>8}" for c in chi.channels)
print(header)
for label, row in zip(chi.channels, chi.values):
    print(f"{label:>6}" + "".join(f"{v:8.3f}" for v in row))

# --- compare the dependent pair against the analytic value ------------------
# For a moving average of alpha-stable noise and its lag-one copy, the
# linear-process formula gives
#   chi = sum_j min(|c_j|^a, |c_{j+1}|^a) / sum_j |c_j|^a
c = np.abs(TRIPLET_MA3) ** TRIPLET_ALPHA
analytic = np.minimum(c[:-1], c[1:]).sum() / c.sum()
measured = chi.values[chi.channels.index("P4"), chi.channels.index("T6")]
print(f"\nchi(P4, T6): measured {measured:.3f}, analytic limit {analytic:.3f}")
print("chi(T3, *) stays near 1 - q = 0.002: asymptotic independence.")
