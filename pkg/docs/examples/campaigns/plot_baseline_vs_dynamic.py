"""
Baseline vs dynamic sharing
======================================================

In this tutorial we compare the fixed 200 MHz chunks of the baseline policy with the
load-proportional dynamic policy, first for one gNB density and then over a small density sweep.

Key Features:

- Running a campaign with :func:`~mmshare.harness.run_campaign`.
- Plotting the typical-UE throughput CDFs with :class:`~mmshare.eval.ThroughputCDFPlot`.
- Sweeping the gNB density with :func:`~mmshare.harness.density_sweep` and plotting it with
  :class:`~mmshare.eval.FairnessComparison`.
"""

import matplotlib.pyplot as plt

from mmshare.eval import FairnessComparison, ThroughputCDFPlot, get_performance_dataframe
from mmshare.harness import density_sweep, run_campaign
from mmshare.scenario import ScenarioConfig, validate_config

# sphinx_gallery_thumbnail_number = -1

# %%
# 1. Set up the scenario
# ----------------------
# The default scenario has five operators with one 200 MHz chunk each out of 1 GHz, 75 gNBs and
# 100 UEs per km^2 per operator, and 8x8 gNB and 4x4 UE arrays. We only shorten the campaign so
# that the example runs quickly; the full campaign uses 10 000 trials.

scenario = validate_config(ScenarioConfig(num_trials=500, master_seed=2026))

# %%
# 2. Run a campaign
# -----------------
# Every trial scores the typical UE under the four configurations on the same random draws.

campaign = run_campaign(scenario, num_workers=2)
print(get_performance_dataframe(campaign))

# %%
# 3. Throughput CDFs
# ------------------
# Dashed lines ignore the interference, so they always lie at or to the right of the solid ones.

ThroughputCDFPlot.from_campaign(campaign)
plt.show()

# %%
# 4. Density sweep
# ----------------
# Jain's index and the mean throughput of both policies for 50, 75 and 100 gNBs/km^2.

sweep = density_sweep(scenario, [50, 75, 100], num_workers=2)
print(sweep)

FairnessComparison.from_sweep(sweep)
plt.show()
