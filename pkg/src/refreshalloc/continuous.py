"""Closed-form (Lambert W) solver for the continuous refresh allocation problem.

For a dual level ``nu`` on the power constraint the stationarity condition
``nu / 4**b = alpha*beta*t**2*exp(beta*t)`` inverts to

    t_b = (2/beta) * W0((beta/2) * sqrt(nu / (4**b * alpha * beta)))

clamped below at ``delta``.  Total power is nonincreasing in ``nu``, so the
``nu`` that makes the budget tight is found by bisection.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InfeasibleError, NumericError
from .lambert import w0
from .metrics import BerModel, DeviceParams, RefreshPlan, max_power, psnr, word_mse

POWER_RTOL = 1e-10
NU_RTOL = 1e-14
MAX_BISECTIONS = 200
MAX_BRACKET_STEPS = 2100


@dataclass(frozen=True)
class KktReport:
    """Scaled KKT residuals of a candidate solution.

    Stationarity and bound slackness are divided by the per-bit gradient
    scale ``4**b*alpha*beta*exp(beta*t_b)``; power slackness is divided by
    ``nu * budget``.
    """

    stationarity_residuals: np.ndarray
    lam: np.ndarray
    complementary_slackness_power: float
    complementary_slackness_bounds: np.ndarray
    primal_violation: float
    dual_violation: float

    @property
    def max_residual(self) -> float:
        return float(
            max(
                np.max(self.stationarity_residuals, initial=0.0),
                np.max(self.complementary_slackness_bounds, initial=0.0),
                self.complementary_slackness_power,
                self.primal_violation,
                self.dual_violation,
            )
        )


@dataclass(frozen=True)
class SolveReport:
    plan: RefreshPlan
    nu: float
    power: float
    mse: float
    psnr_db: float
    bisection_iterations: int
    budget: float
    kkt: Optional[KktReport] = None
    note: str = ""

    @property
    def intervals(self) -> np.ndarray:
        return self.plan.intervals


def _check_dual(nu):
    if not (nu >= 0 and math.isfinite(nu)):
        raise DomainError(f"dual variable nu must be finite and >= 0, got {nu!r}")


class _Allocator:
    """Per-bit ``t_b(nu)`` evaluation with box clamping, in plain floats.

    The solvers call this thousands of times on vectors of a handful of
    entries, where scalar ``math`` beats numpy's per-call overhead.
    """

    def __init__(self, model: BerModel, bits: int, lower: Sequence[float], upper: Sequence[float]):
        a, be = model.alpha, model.beta
        # W argument is sqrt(nu) * scale_b
        self.scale = [(be / 2.0) / math.sqrt(4.0**b * a * be) for b in range(bits)]
        self.two_over_beta = 2.0 / be
        self.lower = [float(v) for v in lower]
        self.upper = [float(v) for v in upper]
        # stationarity level alpha*beta*t^2*exp(beta*t) at each bound, times 4^b:
        # nu below the first pins t_b to lower, nu above the second pins it to upper
        self.nu_lower = [4.0**b * a * be * lo * lo * math.exp(be * lo) for b, lo in enumerate(self.lower)]
        self.nu_upper = [
            4.0**b * a * be * hi * hi * math.exp(be * hi) if hi < 300.0 / be else math.inf
            for b, hi in enumerate(self.upper)
        ]

    def intervals(self, nu: float) -> list:
        r = math.sqrt(nu)
        k = self.two_over_beta
        out = []
        for s, lo, hi, nlo, nhi in zip(self.scale, self.lower, self.upper, self.nu_lower, self.nu_upper):
            if nu < nlo:
                out.append(lo)
            elif nu > nhi:
                out.append(hi)
            else:
                t = k * w0(r * s)
                out.append(lo if t < lo else (hi if t > hi else t))
        return out

    def power(self, nu: float) -> float:
        return math.fsum(1.0 / t for t in self.intervals(nu))


def _bisect_dual(alloc: _Allocator, budget: float, nu_hint: Optional[float] = None):
    """Return ``(nu, intervals, iterations)`` with the budget tight.

    Bisection runs on ``log(nu)``: the bracket is grown geometrically from
    ``nu_hint`` (default 1) and the feasible (upper) end is returned, so the
    returned plan never exceeds the budget.
    """
    start = nu_hint if nu_hint and nu_hint > 0 and math.isfinite(nu_hint) else 1.0
    p = alloc.power(start)
    if p <= budget:
        hi, p_hi = start, p
        lo = 0.5 * start
        for _ in range(MAX_BRACKET_STEPS):
            p_lo = alloc.power(lo)
            if p_lo > budget:
                break
            hi, p_hi = lo, p_lo
            lo *= 0.5
            if lo == 0.0:
                raise NumericError("dual bracket collapsed to zero")
        else:
            raise NumericError("could not bracket the dual variable from below")
    else:
        lo, hi = start, start
        for _ in range(MAX_BRACKET_STEPS):
            hi *= 2.0
            if not math.isfinite(hi):
                break
            p_hi = alloc.power(hi)
            if p_hi <= budget:
                break
            lo = hi
        else:
            raise NumericError("could not bracket the dual variable from above")
        if not math.isfinite(hi):
            raise InfeasibleError(
                f"budget {budget} is below the power reachable at any dual level",
                min_power=p_hi,
            )

    its = 0
    while budget - p_hi > POWER_RTOL * budget and hi / lo - 1.0 > NU_RTOL:
        if its >= MAX_BISECTIONS:
            raise NumericError(f"dual bisection did not converge in {MAX_BISECTIONS} steps")
        its += 1
        mid = math.sqrt(lo * hi)
        p_mid = alloc.power(mid)
        if p_mid <= budget:
            hi, p_hi = mid, p_mid
        else:
            lo = mid
    return hi, alloc.intervals(hi), its


def intervals_for_dual(model: BerModel, params: DeviceParams, nu: float) -> RefreshPlan:
    """Per-bit optimal intervals at a fixed dual level ``nu``."""
    _check_dual(nu)
    alloc = _Allocator(model, params.bits, [params.delta] * params.bits, [math.inf] * params.bits)
    return RefreshPlan(alloc.intervals(nu))


def _report(model, params, budget, t, nu, its, note="") -> SolveReport:
    plan = RefreshPlan(t)
    mse = word_mse(model, plan)
    return SolveReport(
        plan=plan,
        nu=nu,
        power=math.fsum(1.0 / v for v in plan.intervals),
        mse=mse,
        psnr_db=psnr(mse, params.bits),
        bisection_iterations=its,
        budget=budget,
        note=note,
    )


def solve(model: BerModel, params: DeviceParams, budget: float) -> SolveReport:
    """Minimum-MSE intervals with ``sum(1/t_b) <= budget`` and ``t_b >= delta``."""
    if not (budget > 0 and math.isfinite(budget)):
        raise DomainError(f"power budget must be finite and > 0, got {budget!r}")
    B, d = params.bits, params.delta
    if budget >= max_power(params):
        rep = _report(model, params, budget, [d] * B, 0.0, 0, note="trivial: budget >= B/delta")
    else:
        alloc = _Allocator(model, B, [d] * B, [math.inf] * B)
        nu, t, its = _bisect_dual(alloc, budget)
        rep = _report(model, params, budget, t, nu, its)
    return _with_kkt(model, params, budget, rep)


def _with_kkt(model, params, budget, rep):
    return dataclasses.replace(rep, kkt=verify_kkt(model, params, budget, rep))


def solve_boxed(
    model: BerModel,
    params: DeviceParams,
    budget: float,
    lower: Sequence[float],
    upper: Sequence[float],
    nu_hint: Optional[float] = None,
) -> SolveReport:
    """Minimum-MSE intervals inside per-bit boxes ``lower <= t <= upper``.

    ``nu_hint`` seeds the dual bracket (branch-and-bound passes the parent
    node's dual level).  The returned report carries no KKT block.
    """
    B = params.bits
    lower = [float(v) for v in lower]
    upper = [float(v) for v in upper]
    if len(lower) != B or len(upper) != B:
        raise DomainError(f"box bounds need {B} entries each")
    if not (budget > 0 and math.isfinite(budget)):
        raise DomainError(f"power budget must be finite and > 0, got {budget!r}")
    for lo, hi in zip(lower, upper):
        if not (params.delta <= lo <= hi):
            raise DomainError(f"malformed box [{lo}, {hi}] (need delta <= lower <= upper)")
    min_p = math.fsum(1.0 / hi for hi in upper)
    if min_p > budget:
        raise InfeasibleError(
            f"box is infeasible: its least power {min_p} exceeds budget {budget}",
            min_power=min_p,
        )
    if math.fsum(1.0 / lo for lo in lower) <= budget:
        return _report(model, params, budget, lower, 0.0, 0, note="lower corner meets budget")
    alloc = _Allocator(model, B, lower, upper)
    nu, t, its = _bisect_dual(alloc, budget, nu_hint)
    return _report(model, params, budget, t, nu, its)


def verify_kkt(model: BerModel, params: DeviceParams, budget: float, report: SolveReport) -> KktReport:
    """Recompute the KKT conditions of ``report`` from its plan and ``nu``.

    Never raises on bad residuals; callers compare ``max_residual``.
    """
    t = np.asarray(report.plan.intervals, dtype=float)
    nu = float(report.nu)
    d = params.delta
    grad = params.weights() * model.alpha * model.beta * np.exp(model.beta * t)
    raw = grad - nu / t**2
    lam = np.maximum(raw, 0.0)
    stationarity = np.abs(grad - nu / t**2 - lam) / grad
    slack_bounds = lam / grad * np.abs(t - d) / t
    power = math.fsum(1.0 / t)
    slack_power = abs(power - budget) / budget if nu > 0 else 0.0
    primal = max(0.0, (power - budget) / budget, float(np.max((d - t) / d, initial=0.0)))
    dual = 0.0 if nu >= 0 else -nu
    return KktReport(
        stationarity_residuals=stationarity,
        lam=lam,
        complementary_slackness_power=slack_power,
        complementary_slackness_bounds=slack_bounds,
        primal_violation=primal,
        dual_violation=dual,
    )
