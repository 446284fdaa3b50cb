"""
Budget sweep as plot-ready CSV
==============================

One row per budget with the uniform, optimal and discrete plans.  The
default grid is 200 log-spaced budgets from 1 to ``B/delta``; a coarser grid
keeps this script quick.
"""

import numpy as np

from refreshalloc import DeviceParams, default_paper_model, run_sweep
from refreshalloc.sweep import sweep_to_csv

model = default_paper_model()
params = DeviceParams(bits=8, delta=0.064)

budgets = np.geomspace(1.0, 125.0, 9)
rows = run_sweep(model, params, budgets, gammas=(1, 15))
print(sweep_to_csv(rows, params.bits, (1, 15)))

# %%
# Same thing from the shell:
#
#   refreshalloc sweep --budgets 1:125:200 --gamma 1 --gamma 15 --format csv --output sweep.csv
