"""Property-based checks of the model and solver invariants."""

import math

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from energy_source_game import (GameInstance, PriceSchedule, aggregate_demand, allocation_pa,
                                classify, optimal_profile, social_cost, solve)
from energy_source_game.equilibrium import MIXED_REGIMES, derive_epsilons
from energy_source_game.errors import DomainError
from energy_source_game.oracle import meanfield_cost_res
from energy_source_game.model import cost_nonres


@st.composite
def instances(draw, derived=False):
    m = draw(st.integers(1, 4))
    n = draw(st.integers(max(2, m), 5000))
    beta = draw(st.floats(1.05, 4))
    gamma = beta * draw(st.floats(1.05, 3))
    prices = PriceSchedule(draw(st.floats(0.05, 5)), beta, gamma)
    e = sorted(draw(st.lists(st.floats(0.1, 50), min_size=m, max_size=m)))
    raw = draw(st.lists(st.floats(0.05, 1), min_size=m, max_size=m))
    r = [x / math.fsum(raw) for x in raw]
    er = n * float(np.dot(r, e)) * draw(st.floats(0.005, 1.5))
    if derived:
        try:
            eps = derive_epsilons(e, draw(st.floats(1, prices.dominance_ratio * 0.999)), er, prices)
        except DomainError:
            assume(False)
    else:
        eps = draw(st.lists(st.floats(1, 1.3 * prices.dominance_ratio), min_size=m, max_size=m))
    return GameInstance.from_arrays(n, er, prices, e, eps, r)


probabilities = st.lists(st.floats(0, 1), min_size=4, max_size=4)


@settings(max_examples=200, deadline=None)
@given(instances(), probabilities)
def test_allocation_conserves_capacity(inst, p):
    p = np.array(p[:inst.n_types])
    granted = inst.n_consumers * math.fsum(
        inst.weights * p * np.array([allocation_pa(i, p, inst) for i in range(inst.n_types)]))
    used = min(inst.res_capacity, aggregate_demand(p, inst))
    assert math.isclose(granted, used, rel_tol=1e-9, abs_tol=1e-12)


@settings(max_examples=200, deadline=None)
@given(instances(), probabilities)
def test_optimum_not_beaten(inst, p):
    p = np.array(p[:inst.n_types])
    _, opt = optimal_profile(inst)
    assert opt.total <= social_cost(p, inst).total * (1 + 1e-9)


@settings(max_examples=200, deadline=None)
@given(instances(derived=True))
def test_equilibrium_properties(inst):
    report = solve(inst)
    assert report.ne_exists
    _, opt = optimal_profile(inst)
    for prof in (report.worst_profile, report.best_profile):
        assert math.isclose(aggregate_demand(prof, inst), report.ne_demand, rel_tol=1e-9, abs_tol=1e-9)
        assert social_cost(prof, inst).total >= opt.total * (1 - 1e-9)
    worst = social_cost(report.worst_profile, inst).total
    best = social_cost(report.best_profile, inst).total
    assert worst >= best * (1 - 1e-9)
    if classify(inst).variant in MIXED_REGIMES and not report.worst_profile.saturated:
        for i in range(inst.n_types):
            p = report.worst_profile.p_res[i]
            if 0 < p < 1:
                day = meanfield_cost_res(i, report.worst_profile, inst)
                assert math.isclose(day, cost_nonres(i, inst), rel_tol=1e-6)
