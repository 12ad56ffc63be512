"""
Tuning with RSSI feedback
=========================

The annealer only sees quantized, noisy RSSI readings. Here it tunes a few
antennas, and we compare it with the noiseless search and with the timing
cost of a stricter threshold.
"""

# %%
import numpy as np

from sicancel.coupler import AntennaModel, ChannelScenario
from sicancel.experiments import sample_disk, trial_rng, tuning_overhead
from sicancel.receiver import ReceiverSpec
from sicancel.search import ideal_tune
from sicancel.tuner import tune

# %% [markdown]
# One run, stage by stage. Stage 1 chases 50 dB, stage 2 the full 78 dB.

# %%
g_ant = 0.2 * np.exp(1j * np.pi / 6)
res = tune(ChannelScenario(AntennaModel(g_ant)), rng=np.random.default_rng(1))
print(res.converged, round(res.achieved_db, 1), "dB in", res.steps_taken, "steps")
for stage in (1, 2):
    rows = [r for r in res.trace if r.stage == stage]
    if rows:
        print(f"stage {stage}: {len(rows)} readings, best {min(r.measured_dbm for r in rows):.1f} dBm")

# %% [markdown]
# Twenty antennas, noisy receiver. The annealer stops once a reading clears
# the threshold. The noiseless search keeps going and finds much deeper nulls.

# %%
rows = []
for i in range(20):
    rng = trial_rng(3, i)
    g = complex(sample_disk(1, 0.4, rng)[0])
    r = tune(ChannelScenario(AntennaModel(g)), rx=ReceiverSpec(), rng=rng)
    rows.append((abs(g), r.converged, r.achieved_db, ideal_tune(g).cancellation_db, r.steps_taken))
for mag, ok, got, best, steps in rows:
    print(f"|g|={mag:.2f}  converged={ok!s:5}  sa={got:6.1f} dB  ideal={best:6.1f} dB  steps={steps}")

# %% [markdown]
# A stricter threshold costs steps.

# %%
rep = tuning_overhead(thresholds=(70, 78, 85), trials=20, seed=5)
for thr, v in rep.by_threshold().items():
    print(f"{thr:g} dB: median {v['median_steps']:g} steps, success {v['success_rate']:.0%}")
