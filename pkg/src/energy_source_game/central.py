"""Centralized dispatch and the price of anarchy.

The social cost is linear in the per-type day energy x_l = r_l p_l E_l
apart from one convex kink at the capacity, so the optimum is a two-tier
fractional knapsack: below capacity every unit moved to the day saves
(epsilon_l beta - 1) c_res, above it only types with epsilon_l beta >= gamma
still save anything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import REL_TOL, always_competes, solve
from .errors import StateError
from .model import GameInstance, SocialCostBreakdown, StrategyProfile, social_cost


@dataclass(frozen=True)
class PoAReport:
    worst_ne_cost: float
    optimal_cost: float
    optimal_profile: StrategyProfile
    worst_profile: StrategyProfile

    @property
    def ratio(self) -> float:
        return self.worst_ne_cost / self.optimal_cost


def optimal_profile(instance: GameInstance) -> tuple[StrategyProfile, SocialCostBreakdown]:
    """Socially optimal competing probabilities and their cost."""
    n = instance.n_consumers
    r, e, eps = instance.weights, instance.demands, instance.epsilons
    p = np.zeros(instance.n_types)
    for t in instance.types:
        if always_competes(t.inv_risk_aversion, instance.prices):
            p[t.index] = 1.0
    # capacity left per consumer, in units of sum r E p
    budget = instance.res_capacity / n - float(np.sum(r * e * p))
    # larger epsilon saves more night energy per day unit; ties go to big players
    floor = 1e-12 * float(np.sum(r * e))
    for i in sorted(range(instance.n_types), key=lambda i: (-eps[i], -e[i])):
        unit = r[i] * e[i]
        if p[i] == 1.0 or unit <= 0:
            continue
        if budget <= floor:
            break
        take = min(1.0, budget / unit)
        p[i] = take
        budget -= take * unit
    profile = StrategyProfile(tuple(np.clip(p, 0.0, 1.0)))
    return profile, social_cost(profile, instance)


def worst_ne_cost(instance: GameInstance) -> tuple[float, StrategyProfile]:
    report = solve(instance)
    if not report.ne_exists:
        raise StateError(f"{report.case}: no NE; PoA undefined")
    return social_cost(report.worst_profile, instance).total, report.worst_profile


def price_of_anarchy(instance: GameInstance) -> PoAReport:
    worst, worst_p = worst_ne_cost(instance)
    opt_p, opt = optimal_profile(instance)
    report = PoAReport(worst, opt.total, opt_p, worst_p)
    return report
