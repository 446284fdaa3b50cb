"""Integer refresh intervals ``t_b = step * z_b`` by branch-and-bound.

Every node is a box ``lo <= z <= hi``.  Its bound comes from the continuous
box relaxation (``solve_boxed``), evaluated as the Lagrangian dual value
``mse + nu * (power - budget)`` which is a valid lower bound even when the
dual bisection stops slightly inside the budget.  Nodes are expanded
best-first; an incumbent is seeded at every node by rounding the relaxed
intervals up (longer intervals never raise power).

Objective and power of an integer point are always evaluated through
``_Tables`` so that the branch-and-bound and the brute-force oracle produce
bit-identical numbers and therefore identical tie-breaks.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .continuous import SolveReport, solve_boxed
from .errors import DomainError, InfeasibleError, SizeError
from .metrics import BerModel, DeviceParams, psnr

# a point whose power exceeds the budget by at most this relative amount is feasible
FEAS_RTOL = 1e-12
PRUNE_RTOL = 1e-12
INT_TOL = 1e-9
NODE_CAP = 10**6
BRUTE_MAX_BITS = 4
BRUTE_MAX_ZCAP = 40


@dataclass(frozen=True)
class DiscretePlan:
    z: tuple
    step: float
    z_cap: int

    def __post_init__(self):
        if any(v < 1 or v > self.z_cap for v in self.z):
            raise DomainError(f"step counts must lie in [1, {self.z_cap}], got {self.z}")

    @property
    def intervals(self) -> np.ndarray:
        return self.step * np.asarray(self.z, dtype=float)


@dataclass(frozen=True)
class DiscreteSolveReport:
    plan: DiscretePlan
    power: float
    mse: float
    psnr_db: float
    nodes_explored: int
    relaxation_gap: float
    proven_optimal: bool
    root_mse: float = math.nan
    # (lo, hi, bound) per evaluated node; filled only when requested
    nodes: list = field(default_factory=list, repr=False)


def default_z_cap(model: BerModel, params: DeviceParams) -> int:
    """Step count beyond which the LSB BER alone passes ~3 (model meaningless)."""
    return max(1, math.ceil(math.log(3.0 / model.alpha) / (model.beta * params.step)))


class _Tables:
    def __init__(self, model: BerModel, params: DeviceParams, z_cap: int):
        self.B = params.bits
        self.step = params.step
        z = np.arange(z_cap + 1, dtype=float)
        # index 0 unused; keeps table[z] aligned with the step count.  Huge caps
        # overflow to inf, which simply never wins.
        with np.errstate(over="ignore"):
            self.terms = [
                (4.0**b * model.alpha * np.exp(model.beta * self.step * z)).tolist() for b in range(self.B)
            ]
        inv = np.zeros(z_cap + 1)
        inv[1:] = 1.0 / z[1:]
        self.inv = inv.tolist()

    def mse(self, z) -> float:
        acc = 0.0
        for b, zb in enumerate(z):
            acc += self.terms[b][zb]
        return acc

    def power(self, z) -> float:
        acc = 0.0
        for zb in z:
            acc += self.inv[zb]
        return acc / self.step


def _validate(budget, z_cap, params, model):
    if not (budget > 0 and math.isfinite(budget)):
        raise DomainError(f"power budget must be finite and > 0, got {budget!r}")
    if int(z_cap) != z_cap or z_cap < 1:
        raise DomainError(f"z_cap must be an integer >= 1, got {z_cap!r}")
    tables = _Tables(model, params, int(z_cap))
    least = tables.power([int(z_cap)] * params.bits)
    if least > budget * (1.0 + FEAS_RTOL):
        raise InfeasibleError(
            f"budget {budget} is infeasible with z_cap={z_cap}: least achievable power is {least}",
            min_power=least,
        )
    return tables


def _better(mse, z, best_mse, best_z):
    return best_z is None or mse < best_mse or (mse == best_mse and tuple(z) < tuple(best_z))


def _finish(tables, z, z_cap, bits, nodes, root_mse, proven, trace):
    mse = tables.mse(z)
    return DiscreteSolveReport(
        plan=DiscretePlan(tuple(int(v) for v in z), tables.step, int(z_cap)),
        power=tables.power(z),
        mse=mse,
        psnr_db=psnr(mse, bits),
        nodes_explored=nodes,
        relaxation_gap=mse - root_mse if math.isfinite(root_mse) else math.nan,
        proven_optimal=proven,
        root_mse=root_mse,
        nodes=trace,
    )


def root_relaxation(model: BerModel, params: DeviceParams, budget: float, z_cap: Optional[int] = None) -> SolveReport:
    """Continuous optimum over ``step <= t_b <= step * z_cap``."""
    if z_cap is None:
        z_cap = default_z_cap(model, params)
    _validate(budget, z_cap, params, model)
    B, step = params.bits, params.step
    return solve_boxed(model, params, budget * (1.0 + FEAS_RTOL), [step] * B, [step * z_cap] * B)


def solve_discrete(
    model: BerModel,
    params: DeviceParams,
    budget: float,
    z_cap: Optional[int] = None,
    *,
    node_cap: int = NODE_CAP,
    record_nodes: bool = False,
) -> DiscreteSolveReport:
    """Minimize word MSE over integer step counts ``z_b in [1, z_cap]``.

    Ties in MSE go to the lexicographically smallest ``z``.
    """
    if z_cap is None:
        z_cap = default_z_cap(model, params)
    tables = _validate(budget, z_cap, params, model)
    B, step = params.bits, params.step
    cap_budget = budget * (1.0 + FEAS_RTOL)
    trace = [] if record_nodes else None

    best_mse, best_z = math.inf, None
    counter = itertools.count()
    heap = []
    n_nodes = 0

    def consider(z):
        nonlocal best_mse, best_z
        if tables.power(z) <= cap_budget:
            m = tables.mse(z)
            if _better(m, z, best_mse, best_z):
                best_mse, best_z = m, tuple(z)

    def evaluate(lo, hi, nu_hint):
        """Solve the node relaxation and push it; pinned boxes are leaves."""
        nonlocal n_nodes
        n_nodes += 1
        if lo == hi:
            consider(lo)
            if trace is not None:
                trace.append((lo, hi, tables.mse(lo) if tables.power(lo) <= cap_budget else math.inf))
            return None
        try:
            rel = solve_boxed(
                model, params, cap_budget, [step * v for v in lo], [step * v for v in hi], nu_hint=nu_hint
            )
        except InfeasibleError:
            if trace is not None:
                trace.append((lo, hi, math.inf))
            return None
        bound = rel.mse + rel.nu * (rel.power - cap_budget)
        if trace is not None:
            trace.append((lo, hi, bound))
        v = [t / step for t in rel.intervals]
        consider([min(h, max(l, math.ceil(x))) for x, l, h in zip(v, lo, hi)])
        heapq.heappush(heap, (bound, next(counter), lo, hi, v, rel.nu))
        return rel

    root = evaluate((1,) * B, (int(z_cap),) * B, None)
    root_mse = root.mse if root is not None else math.nan

    proven = True
    while heap:
        bound, _, lo, hi, v, nu = heapq.heappop(heap)
        if bound > best_mse * (1.0 + PRUNE_RTOL):
            break
        if n_nodes >= node_cap:
            proven = False
            break
        dist = [abs(x - round(x)) if l < h else -1.0 for x, l, h in zip(v, lo, hi)]
        b = max(range(B), key=lambda i: dist[i])
        if dist[b] <= INT_TOL:
            zr = [int(round(x)) for x in v]
            if tables.power(zr) <= cap_budget:
                consider(zr)
                continue
            # relaxed point is integral but rounding makes it infeasible: pin a bit three ways
            b = next(i for i in range(B) if lo[i] < hi[i])
            k = min(hi[b], max(lo[b], zr[b]))
            pieces = [(lo[b], k - 1), (k, k), (k + 1, hi[b])]
        else:
            f = math.floor(v[b])
            pieces = [(lo[b], f), (f + 1, hi[b])]
        for a, c in pieces:
            if a > c:
                continue
            clo = lo[:b] + (a,) + lo[b + 1 :]
            chi = hi[:b] + (c,) + hi[b + 1 :]
            evaluate(clo, chi, nu)

    if best_z is None:
        # unreachable when _validate passed: the all-z_cap corner is feasible
        raise InfeasibleError("no feasible integer point found")
    return _finish(tables, best_z, z_cap, B, n_nodes, root_mse, proven, trace or [])


def brute_force_discrete(
    model: BerModel, params: DeviceParams, budget: float, z_cap: Optional[int] = None
) -> DiscreteSolveReport:
    """Exhaustive enumeration of ``{1..z_cap}**B``; the oracle for small instances."""
    if z_cap is None:
        z_cap = default_z_cap(model, params)
    if params.bits > BRUTE_MAX_BITS or z_cap > BRUTE_MAX_ZCAP:
        raise SizeError(
            f"enumeration limited to bits <= {BRUTE_MAX_BITS} and z_cap <= {BRUTE_MAX_ZCAP}"
        )
    tables = _validate(budget, z_cap, params, model)
    B = params.bits
    mse = np.zeros(())
    inv = np.zeros(())
    for b in range(B):
        shape = (1,) * b + (z_cap,) + (1,) * (B - 1 - b)
        mse = mse + np.asarray(tables.terms[b][1:]).reshape(shape)
        inv = inv + np.asarray(tables.inv[1:]).reshape(shape)
    power = inv / tables.step
    mse = np.where(power <= budget * (1.0 + FEAS_RTOL), mse, np.inf)
    # argmin returns the first minimum in C order, i.e. the lexicographically smallest z
    idx = np.unravel_index(int(np.argmin(mse)), mse.shape)
    z = tuple(int(i) + 1 for i in idx)
    return _finish(tables, z, z_cap, B, mse.size, math.nan, True, [])
