"""
Refresh intervals restricted to multiples of a step
===================================================

Real controllers can only skip whole refresh commands, so intervals are
integer multiples of ``gamma * delta``.  Branch-and-bound finds the best
integer plan; a fine step (gamma=1) costs little, a coarse one (gamma=15)
cannot use budgets above ``B / (15 * delta)``.
"""

from refreshalloc import DeviceParams, default_paper_model, solve, solve_discrete
from refreshalloc.sweep import sweep_z_cap

model = default_paper_model()
base = DeviceParams(bits=8, delta=0.064)

print(f"{'P':>6} {'continuous':>11} {'gamma=1':>11} {'gamma=15':>11}   z (gamma=1)")
for budget in [1.5, 3.0, 6.0, 8.0, 20.0, 60.0]:
    cont = solve(model, base, budget)
    cells = []
    for g in (1, 15):
        gp = DeviceParams(8, 0.064, g)
        rep = solve_discrete(model, gp, budget, sweep_z_cap(model, gp, cont))
        cells.append(rep)
    print(f"{budget:6.1f} {cont.mse:11.4e} {cells[0].mse:11.4e} {cells[1].mse:11.4e}   {cells[0].plan.z}")

# %%
# Every answer is proven optimal when the search tree closes.

rep = solve_discrete(model, base, 6.0)
print("nodes:", rep.nodes_explored, "proven optimal:", rep.proven_optimal, "gap to root:", rep.relaxation_gap)
