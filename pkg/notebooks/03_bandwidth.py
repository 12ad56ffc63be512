"""
Cancellation across the band
============================

A null tuned at 915 MHz is narrow. The subcarrier sits a few MHz away, so the
choice among states that all meet 78 dB at the carrier matters.
"""

# %%
import numpy as np

from sicancel.coupler import AntennaModel
from sicancel.experiments import montecarlo_cdf, offset_sweep, sample_disk

# %% [markdown]
# Noiseless search over 200 antennas: the spread of carrier nulls.

# %%
rep = montecarlo_cdf(n=200, seed=11)
print({k: round(v, 1) for k, v in rep.percentiles.items()})

# %% [markdown]
# Deepest null versus flattest state for a handful of antennas.

# %%
rng = np.random.default_rng(12)
for g in sample_disk(6, 0.4, rng):
    line = [f"|g|={abs(g):.2f}"]
    for sel in ("deepest", "flattest"):
        sw = offset_sweep(AntennaModel(complex(g)), selection=sel)
        worst = min(sw.at(912e6), sw.at(918e6))
        line.append(f"{sel}: f0 {sw.at(915e6):5.1f} dB, +-3 MHz {worst:5.1f} dB")
    print("  ".join(line))

# %% [markdown]
# The shape of one sweep.

# %%
sw = offset_sweep(AntennaModel(0.25 * np.exp(0.7j)))
for f in np.arange(905e6, 925.1e6, 2.5e6):
    print(f"{f / 1e6:6.1f} MHz  {sw.at(f):5.1f} dB")
