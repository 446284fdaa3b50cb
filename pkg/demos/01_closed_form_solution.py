"""
Optimal refresh intervals for a power budget
============================================

Solve for the per-bit refresh intervals of an 8-bit word that minimize the
word MSE at a few refresh power budgets, and certify each answer with its
KKT residuals.
"""

import numpy as np

from refreshalloc import DeviceParams, default_paper_model, max_power, min_mse, solve

model = default_paper_model()
params = DeviceParams(bits=8, delta=0.064)

print(f"max power (every bit at delta): {max_power(params):g}")
print(f"MSE at max power:               {min_mse(model, params):.4e}")

# %%
# Intervals shrink toward delta as the budget grows.  The MSB (last column)
# is the first to hit delta.

np.set_printoptions(precision=3, suppress=True)
for budget in [1.0, 2.4, 10.0, 36.0, 100.0, 125.0]:
    rep = solve(model, params, budget)
    print(f"P={budget:6.1f}  PSNR={rep.psnr_db:6.2f} dB  nu={rep.nu:.3e}  t={rep.intervals}")

# %%
# The KKT block is recomputed from the plan and nu, independent of how the
# solver got there.

rep = solve(model, params, 2.4)
print("max scaled KKT residual at P=2.4:", rep.kkt.max_residual)
print("bound multipliers:", rep.kkt.lam)
