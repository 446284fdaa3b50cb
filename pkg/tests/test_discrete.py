import itertools
import math

import numpy as np
import pytest

from refreshalloc import (
    DeviceParams,
    DomainError,
    InfeasibleError,
    SizeError,
    brute_force_discrete,
    default_z_cap,
    root_relaxation,
    solve,
    solve_discrete,
)
from refreshalloc.discrete import DiscretePlan

from .oracles import grid_min_mse_2_box


def _p(bits, gamma=1):
    return DeviceParams(bits=bits, delta=0.064, gamma=gamma)


@pytest.mark.parametrize("solver", [solve_discrete, brute_force_discrete])
def test_single_bit_examples(model, solver):
    assert solver(model, _p(1), 1 / 0.064, 30).plan.z == (1,)
    assert solver(model, _p(1), 1 / (2 * 0.064), 30).plan.z == (2,)


def test_two_bits_max_power_point(model):
    rep = brute_force_discrete(model, _p(2), 2 / 0.064, 20)
    assert rep.plan.z == (1, 1)
    assert solve_discrete(model, _p(2), 2 / 0.064, 20).plan.z == (1, 1)


def test_three_bits_budget_20_matches_brute_force(model):
    a = solve_discrete(model, _p(3), 20.0, 30)
    b = brute_force_discrete(model, _p(3), 20.0, 30)
    assert a.plan == b.plan and a.mse == b.mse
    assert a.proven_optimal


def test_infeasible_names_min_power(model):
    with pytest.raises(InfeasibleError) as exc:
        solve_discrete(model, _p(2), 0.1, 30)
    assert exc.value.min_power == pytest.approx(2 / (30 * 0.064))
    assert "least achievable power" in str(exc.value)


@pytest.mark.parametrize("budget, z_cap", [(0.0, 10), (-1.0, 10), (10.0, 0), (10.0, 2.5)])
def test_bad_arguments(model, budget, z_cap):
    with pytest.raises(DomainError):
        solve_discrete(model, _p(2), budget, z_cap)


def test_brute_force_size_guard(model):
    with pytest.raises(SizeError):
        brute_force_discrete(model, _p(5), 10.0, 10)
    with pytest.raises(SizeError):
        brute_force_discrete(model, _p(2), 10.0, 41)


def test_tie_break_is_lexicographic(model):
    # a pure python enumeration with the same tables, first-minimum-wins
    from refreshalloc.discrete import _Tables

    p = _p(3, 5)
    tabs = _Tables(model, p, 12)
    budget = 4.0
    best = None
    for z in itertools.product(range(1, 13), repeat=3):
        if tabs.power(z) <= budget * (1 + 1e-12):
            m = tabs.mse(z)
            if best is None or m < best[0]:
                best = (m, z)
    assert brute_force_discrete(model, p, budget, 12).plan.z == best[1]
    assert solve_discrete(model, p, budget, 12).plan.z == best[1]


def test_random_small_instances_match_oracle(model):
    rng = np.random.default_rng(2024)
    for _ in range(60):
        B = int(rng.integers(1, 4))
        g = int(rng.choice([1, 5, 15]))
        zc = int(rng.integers(1, 31))
        p = _p(B, g)
        lo, hi = B / (p.step * zc), B / p.step
        budget = float(np.exp(rng.uniform(np.log(lo), np.log(hi * 1.2))))
        a = solve_discrete(model, p, budget, zc)
        b = brute_force_discrete(model, p, budget, zc)
        assert a.plan.z == b.plan.z and a.mse == b.mse


def test_relaxation_bounds_and_dominance(model):
    p = _p(8)
    for budget in [1.5, 4.0, 12.0, 40.0, 110.0]:
        rep = solve_discrete(model, p, budget, 200)
        root = root_relaxation(model, p, budget, 200)
        cont = solve(model, p, budget)
        assert root.mse <= rep.mse * (1 + 1e-12)
        assert rep.relaxation_gap >= -1e-9 * rep.mse
        assert rep.mse >= cont.mse * (1 - 1e-12)
        assert rep.power <= budget * (1 + 1e-9)
        assert rep.proven_optimal


def test_root_relaxation_large_cap_equals_continuous(model):
    p = _p(8)
    for budget in [1.0, 2.4, 30.0, 100.0]:
        root = root_relaxation(model, p, budget, 10_000)
        assert root.mse == pytest.approx(solve(model, p, budget).mse, rel=1e-8)


def test_root_relaxation_b2_grid(model):
    p = _p(2)
    z_cap, budget = 40, 9.0
    root = root_relaxation(model, p, budget, z_cap)
    grid = grid_min_mse_2_box(model.alpha, model.beta, budget, [0.064] * 2, [0.064 * z_cap] * 2, h=1e-4)
    assert root.mse <= grid * (1 + 1e-12)
    assert root.mse == pytest.approx(grid, rel=1e-3)


def test_node_bounds_never_exceed_descendant_optimum(model):
    p = _p(3, 5)
    budget, z_cap = 2.5, 12
    rep = solve_discrete(model, p, budget, z_cap, record_nodes=True)
    assert rep.nodes
    brute = brute_force_discrete(model, p, budget, z_cap)
    from refreshalloc.discrete import _Tables

    tabs = _Tables(model, p, z_cap)
    for lo, hi, bound in rep.nodes:
        best = math.inf
        for z in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
            if tabs.power(z) <= budget * (1 + 1e-12):
                best = min(best, tabs.mse(z))
        assert bound <= best * (1 + 1e-12) or best == math.inf
    assert rep.mse == brute.mse


def test_node_cap_reports_unproven(model):
    rep = solve_discrete(model, _p(8), 2.4, 200, node_cap=3)
    assert not rep.proven_optimal
    assert rep.power <= 2.4 * (1 + 1e-9)


def test_default_z_cap(model):
    # ceil(ln(3/alpha) / (beta*step)), evaluated at 40 digits
    assert default_z_cap(model, _p(8, 1)) == 130
    assert default_z_cap(model, _p(8, 15)) == 9


def test_discrete_plan_invariants():
    with pytest.raises(DomainError):
        DiscretePlan((0, 1), 0.064, 5)
    with pytest.raises(DomainError):
        DiscretePlan((6, 1), 0.064, 5)
    np.testing.assert_allclose(DiscretePlan((3, 1), 0.064, 5).intervals, [0.192, 0.064])


def test_step_fifteen_is_visibly_worse_near_its_max_power(model):
    p = _p(8, 15)
    rep = solve_discrete(model, p, 7.0)
    assert rep.mse > 1.05 * solve(model, _p(8), 7.0).mse


def test_b8_optimum_beats_its_whole_neighbourhood(model):
    # the gamma=1 point with the largest gap to the continuous optimum on the default grid
    budget = float(np.geomspace(1.0, 125.0, 200)[136])
    rep = solve_discrete(model, _p(8), budget, 200)
    from refreshalloc.discrete import _Tables

    tabs = _Tables(model, _p(8), 205)
    z0 = np.array(rep.plan.z)
    off = np.array(list(itertools.product(range(-2, 3), repeat=8)))
    Z = np.clip(z0 + off, 1, 205)
    power = (1.0 / Z).sum(axis=1) / 0.064
    terms = np.array(tabs.terms)
    mse = terms[np.arange(8), Z].sum(axis=1)
    assert mse[power <= budget * (1 + 1e-12)].min() >= rep.mse * (1 - 1e-14)
    assert rep.mse > 1.03 * solve(model, _p(8), budget).mse
