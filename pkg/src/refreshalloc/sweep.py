"""Budget sweeps comparing uniform, optimal and discrete refresh plans.

Also answers the inverse question used for power-savings figures: the
least power at which each method reaches a target word MSE.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import continuous, discrete
from .errors import DomainError, InfeasibleError, NumericError, UnreachableFidelityError
from .metrics import BerModel, DeviceParams, RefreshPlan, max_power, min_mse, mse_for_psnr, psnr, word_mse

MSE_RTOL = 1e-8
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class SweepRow:
    budget: float
    power_optimal: float
    mse_optimal: float
    psnr_optimal_db: float
    power_uniform: float
    mse_uniform: float
    psnr_uniform_db: float
    nu: float
    intervals: np.ndarray
    # keyed by gamma; None where the discrete instance was infeasible
    mse_discrete: Dict[int, Optional[float]] = field(default_factory=dict)
    discrete_notes: Dict[int, str] = field(default_factory=dict)


def default_budget_grid(params: DeviceParams, count: int = 200, low: float = 1.0) -> np.ndarray:
    return np.geomspace(low, max_power(params), count)


def uniform_plan_for_budget(params: DeviceParams, budget: float) -> RefreshPlan:
    """Equal intervals spending the whole budget, never shorter than delta."""
    if not budget > 0:
        raise DomainError(f"power budget must be > 0, got {budget!r}")
    return RefreshPlan.uniform(params.bits, max(params.delta, params.bits / budget))


def sweep_z_cap(model: BerModel, params: DeviceParams, relaxed: continuous.SolveReport) -> int:
    """Step cap for sweep rows: large enough never to truncate the continuous LSB interval."""
    return max(discrete.default_z_cap(model, params), 2 * math.ceil(relaxed.intervals[0] / params.step))


def _row(model, params, budget, gammas, z_cap):
    opt = continuous.solve(model, params, budget)
    uni = uniform_plan_for_budget(params, budget)
    p_uni = float(np.sum(1.0 / uni.intervals))
    m_uni = word_mse(model, uni)
    mse_d, notes = {}, {}
    for g in gammas:
        gp = DeviceParams(params.bits, params.delta, int(g))
        cap = z_cap if z_cap is not None else sweep_z_cap(model, gp, opt)
        try:
            mse_d[int(g)] = discrete.solve_discrete(model, gp, budget, cap).mse
        except InfeasibleError as exc:
            mse_d[int(g)] = None
            notes[int(g)] = str(exc)
    return SweepRow(
        budget=float(budget),
        power_optimal=opt.power,
        mse_optimal=opt.mse,
        psnr_optimal_db=opt.psnr_db,
        power_uniform=p_uni,
        mse_uniform=m_uni,
        psnr_uniform_db=psnr(m_uni, params.bits),
        nu=opt.nu,
        intervals=opt.intervals,
        mse_discrete=mse_d,
        discrete_notes=notes,
    )


def run_sweep(
    model: BerModel,
    params: DeviceParams,
    budgets: Iterable[float],
    gammas: Sequence[int] = (),
    z_cap: Optional[int] = None,
) -> List[SweepRow]:
    budgets = [float(b) for b in budgets]
    if any(not b > 0 for b in budgets):
        raise DomainError("sweep budgets must be positive")
    if any(b2 < b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise DomainError("sweep budgets must be sorted ascending")
    return [_row(model, params, b, gammas, z_cap) for b in budgets]


def sweep_header(bits: int, gammas: Sequence[int]) -> List[str]:
    cols = [
        "budget",
        "power_optimal",
        "mse_optimal",
        "psnr_optimal_db",
        "power_uniform",
        "mse_uniform",
        "psnr_uniform_db",
        "nu",
    ]
    cols += [f"t_{b}" for b in range(bits)]
    cols += [f"mse_discrete_g{int(g)}" for g in gammas]
    return cols


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def sweep_to_csv(rows: Sequence[SweepRow], bits: int, gammas: Sequence[int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(sweep_header(bits, gammas))
    for r in rows:
        vals = [
            r.budget,
            r.power_optimal,
            r.mse_optimal,
            r.psnr_optimal_db,
            r.power_uniform,
            r.mse_uniform,
            r.psnr_uniform_db,
            r.nu,
            *r.intervals,
        ]
        vals += [r.mse_discrete.get(int(g)) for g in gammas]
        w.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


def _check_target(model, params, target_mse):
    floor = min_mse(model, params)
    if not target_mse >= floor * (1.0 - 1e-12):
        raise UnreachableFidelityError(
            f"target MSE {target_mse!r} is below the minimum achievable MSE {floor!r}", min_mse=floor
        )
    return floor


def min_power_for_mse(model: BerModel, params: DeviceParams, target_mse: float, method: str = "optimal") -> float:
    """Least refresh power whose plan (``optimal`` or ``uniform``) meets ``target_mse``."""
    _check_target(model, params, target_mse)
    pmax = max_power(params)
    if method == "uniform":
        t = math.log(3.0 * target_mse / (model.alpha * (4.0**params.bits - 1.0))) / model.beta
        return params.bits / max(params.delta, t)
    if method != "optimal":
        raise DomainError(f"method must be 'optimal' or 'uniform', got {method!r}")

    def mse_at(p):
        return continuous.solve(model, params, p).mse

    if mse_at(pmax) >= target_mse:
        return pmax
    hi, m_hi = pmax, mse_at(pmax)
    lo = pmax
    for _ in range(MAX_BISECTIONS):
        lo *= 0.5
        if mse_at(lo) > target_mse:
            break
        hi = lo
    else:
        raise NumericError("could not bracket the budget for the target MSE")
    m_hi = mse_at(hi)
    for _ in range(MAX_BISECTIONS):
        if target_mse - m_hi <= MSE_RTOL * target_mse:
            return hi
        mid = math.sqrt(lo * hi)
        m_mid = mse_at(mid)
        if m_mid <= target_mse:
            hi, m_hi = mid, m_mid
        else:
            lo = mid
    raise NumericError("budget bisection for the target MSE did not converge")


def power_savings(model: BerModel, params: DeviceParams, target_mse: float) -> float:
    """Fraction of uniform-plan power saved by the optimal plan at equal MSE."""
    p_opt = min_power_for_mse(model, params, target_mse, "optimal")
    p_uni = min_power_for_mse(model, params, target_mse, "uniform")
    return 1.0 - p_opt / p_uni


def power_savings_at_psnr(model: BerModel, params: DeviceParams, target_psnr_db: float) -> float:
    return power_savings(model, params, mse_for_psnr(target_psnr_db, params.bits))
