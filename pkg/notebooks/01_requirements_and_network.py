"""
Cancellation requirements and the balance network
==================================================

How much self-interference has to go, and whether the two-stage capacitor
network can reach the balance points that deliver it.
"""

# %%
import numpy as np

from sicancel.coupler import CouplerSpec, balanced_target
from sicancel.network import CapCodes, NetworkSpec, balance_gamma, coverage_enumeration, fine_cloud, stage1_neighbors
from sicancel.receiver import (
    carrier_cancellation_requirement,
    offset_cancellation_needed,
    reciprocal_mixing_limit,
)

# %% [markdown]
# A 30 dBm carrier, a receiver with -137 dBm sensitivity and 94 dB blocker
# tolerance, and a source with -153 dBc/Hz phase noise at the subcarrier
# offset.

# %%
print("carrier:", carrier_cancellation_requirement(30, -137, 94), "dB")
print("offset: ", round(offset_cancellation_needed(30, 4.5, -153), 2), "dB")
blocker, recip = reciprocal_mixing_limit(-128, 4.5, 6, 30, noise_floor_dbm_hz=-170)
print("reciprocal mixing: blocker <=", blocker, "dBm, so", recip, "dB")

# %% [markdown]
# Coarse coverage: stage 1 swept at stride 6, stage 2 parked mid-range.

# %%
net = NetworkSpec()
codes, gammas = coverage_enumeration(net, 915e6, stride=6)
print(len(codes), "states, |gamma| up to", round(np.abs(gammas).max(), 3))

# balance points needed by antennas on the |gamma| = 0.4 circle
coupler = CouplerSpec()
ring = 0.4 * np.exp(1j * np.linspace(0, 2 * np.pi, 8, endpoint=False))
print(np.round([balanced_target(g, coupler) for g in ring], 3))

# %% [markdown]
# The fine cloud: stage 2 swept around a stage-1 state and its neighbours.
# Its spread should cover one stage-1 LSB.

# %%
start = CapCodes.midpoint()
cloud_codes, cloud, parents = fine_cloud(start, net, 915e6, stride2=10)
g0 = balance_gamma(start, net, 915e6)
own = cloud[parents == 0]
print("cloud points:", len(cloud))
print("spread around the start:", round(np.ptp(own.real) + np.ptp(own.imag), 4))
steps = [abs(balance_gamma(n, net, 915e6) - g0) for n in stage1_neighbors(start, 32)]
print("largest stage-1 LSB step:", round(max(steps), 4))
