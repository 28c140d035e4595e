"""Closed-form equilibrium analysis under proportional allocation.

Instances fall into four regimes depending on capacity, risk attitudes and
day demands.  Dominant-strategy regimes have a unique outcome; in the
mixed regimes every equilibrium lies on a linear slice

    (N - 1) * sum_l r_l E_l p_l = Q

where Q, the common slack, is the opponent demand at which each competing
type is exactly indifferent between day and night.  All profiles on the
slice share the same aggregate demand and differ only in night cost.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InvalidArgument, StateError
from .model import GameInstance, PriceSchedule, StrategyProfile, d_total

REL_TOL = 1e-9


class Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2A = "Case2a"
    CASE2B = "Case2b"
    CASE2C = "Case2c"
    CASE3 = "Case3"
    CASE4 = "Case4"

    def __str__(self):
        return self.value


class StrategyKind(str, enum.Enum):
    DOMINANT_RES = "DominantRES"
    DOMINANT_NONRES = "DominantNonRES"
    MIXED = "Mixed"

    def __str__(self):
        return self.value


MIXED_REGIMES = (Case.CASE2A, Case.CASE2C, Case.CASE4)


@dataclass(frozen=True)
class CaseLabel:
    """Regime of an instance.

    For Case2c ``sigma1`` holds the types priced out of the day zone and
    ``sigma2`` the rest; for Case4 ``sigma1`` holds the types that always
    compete.  Both sets are empty for the other regimes.
    """

    variant: Case
    sigma1: frozenset = frozenset()
    sigma2: frozenset = frozenset()

    def __str__(self):
        if self.variant in (Case.CASE2C, Case.CASE4):
            return f"{self.variant}(sigma1={sorted(self.sigma1)}, sigma2={sorted(self.sigma2)})"
        return str(self.variant)


@dataclass(frozen=True)
class EquilibriumReport:
    case: CaseLabel
    kind_per_type: tuple[StrategyKind, ...]
    ne_exists: bool
    common_slack: Optional[float]
    ne_demand: Optional[float]
    worst_profile: Optional[StrategyProfile]
    best_profile: Optional[StrategyProfile]


def always_competes(epsilon: float, prices: PriceSchedule) -> bool:
    """True when the night bill never beats the full day-peak bill (epsilon >= gamma/beta)."""
    return epsilon * prices.beta >= prices.gamma * (1.0 - REL_TOL)


def indifference_capacity(epsilon: float, res_capacity: float, prices: PriceSchedule) -> float:
    """ER (gamma - 1) / (gamma - epsilon beta), the conditional demand at which a type is indifferent.

    Infinite for types that always compete.
    """
    gap = prices.gamma - epsilon * prices.beta
    if gap <= 0 or always_competes(epsilon, prices):
        return np.inf
    return res_capacity * (prices.gamma - 1.0) / gap


def ne_target_allocation(type_index: int, instance: GameInstance) -> float:
    """RES share that leaves the type indifferent between competing and waiting for night."""
    prices = instance.prices
    t = instance.types[type_index]
    gap = prices.gamma - t.inv_risk_aversion * prices.beta
    if gap < -REL_TOL * prices.gamma:
        raise DomainError(
            f"type {type_index} has dominant RES strategy (Case 3 regime): "
            f"epsilon={t.inv_risk_aversion} > gamma/beta={prices.dominance_ratio}")
    return max(gap, 0.0) / (prices.gamma - 1.0) * t.day_demand


def _priced_out(demand: float, epsilon: float, capacity: float, prices: PriceSchedule) -> bool:
    if capacity <= 0:
        return True
    return demand > indifference_capacity(epsilon, capacity, prices) * (1.0 + REL_TOL)


def classify(instance: GameInstance) -> CaseLabel:
    prices = instance.prices
    everyone = frozenset(range(instance.n_types))
    if instance.res_capacity >= d_total(instance):
        return CaseLabel(Case.CASE1)
    competing = frozenset(t.index for t in instance.types
                          if always_competes(t.inv_risk_aversion, prices))
    if competing == everyone:
        return CaseLabel(Case.CASE3)
    if competing:
        return CaseLabel(Case.CASE4, competing, everyone - competing)
    priced_out = frozenset(
        t.index for t in instance.types
        if _priced_out(t.day_demand, t.inv_risk_aversion, instance.res_capacity, prices))
    if not priced_out:
        return CaseLabel(Case.CASE2A)
    if priced_out == everyone:
        return CaseLabel(Case.CASE2B)
    return CaseLabel(Case.CASE2C, priced_out, everyone - priced_out)


@dataclass(frozen=True)
class _Subgame:
    """Mixed part of an instance: which types randomize and against what capacity."""

    kinds: tuple[StrategyKind, ...]
    capacity: float
    demand_cap: float
    pinned_demand: float

    @property
    def mixed(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k is StrategyKind.MIXED]


def _subgame(instance: GameInstance, label: CaseLabel) -> _Subgame:
    n = instance.n_consumers
    r, e = instance.weights, instance.demands
    m = instance.n_types
    if label.variant in (Case.CASE1, Case.CASE3):
        return _Subgame((StrategyKind.DOMINANT_RES,) * m, instance.res_capacity, 0.0, d_total(instance))
    if label.variant is Case.CASE2B:
        return _Subgame((StrategyKind.DOMINANT_NONRES,) * m, instance.res_capacity, 0.0, 0.0)
    if label.variant is Case.CASE2A:
        return _Subgame((StrategyKind.MIXED,) * m, instance.res_capacity, d_total(instance), 0.0)

    if label.variant is Case.CASE2C:
        kinds = [StrategyKind.DOMINANT_NONRES if i in label.sigma1 else StrategyKind.MIXED
                 for i in range(m)]
        cap_idx = sorted(label.sigma2)
        return _Subgame(tuple(kinds), instance.res_capacity,
                        n * float(np.sum(r[cap_idx] * e[cap_idx])), 0.0)

    # Case 4: sigma1 always competes; sigma2 plays a Case-2 game on what is left.
    s1 = sorted(label.sigma1)
    pinned = n * float(np.sum(r[s1] * e[s1]))
    left = instance.res_capacity - pinned
    kinds = []
    for t in instance.types:
        if t.index in label.sigma1:
            kinds.append(StrategyKind.DOMINANT_RES)
        elif _priced_out(t.day_demand, t.inv_risk_aversion, left, instance.prices):
            kinds.append(StrategyKind.DOMINANT_NONRES)
        else:
            kinds.append(StrategyKind.MIXED)
    mixed = [i for i, k in enumerate(kinds) if k is StrategyKind.MIXED]
    return _Subgame(tuple(kinds), left, n * float(np.sum(r[mixed] * e[mixed])), pinned)


def _slacks(instance: GameInstance, sub: _Subgame):
    prices = instance.prices
    thresholds = np.array([
        indifference_capacity(instance.types[i].inv_risk_aversion, sub.capacity, prices)
        for i in sub.mixed])
    return thresholds, thresholds - instance.demands[sub.mixed]


def ne_exists(instance: GameInstance, label: Optional[CaseLabel] = None):
    """Check the equal-slack condition over the randomizing types.

    Returns ``(exists, Q)``; ``Q`` is None when the slacks disagree.
    Raises StateError outside the mixed regimes.
    """
    label = label or classify(instance)
    if label.variant not in MIXED_REGIMES:
        raise StateError(f"{label.variant} has no mixed-strategy types")
    sub = _subgame(instance, label)
    if not sub.mixed:
        raise StateError(f"{label}: every type has a dominant strategy")
    thresholds, slacks = _slacks(instance, sub)
    spread = float(np.max(slacks) - np.min(slacks))
    if spread > REL_TOL * float(np.max(thresholds)):
        return False, None
    return True, float(np.mean(slacks))


def derive_epsilons(demands: Sequence[float], epsilon_anchor: float, res_capacity: float,
                    prices: PriceSchedule, anchor: int = 0) -> tuple[float, ...]:
    """Inverse risk degrees that make every type share the anchor type's slack.

    ``demands`` must be sorted ascending.  The anchor defaults to the
    smallest-demand type; pass ``anchor=len(demands) - 1`` to pin the
    largest one instead.
    """
    demands = [float(x) for x in demands]
    if not demands:
        raise InvalidArgument("need at least one demand level")
    if not -len(demands) <= anchor < len(demands):
        raise InvalidArgument(f"anchor index {anchor} out of range")
    anchor %= len(demands)
    gap = prices.gamma - epsilon_anchor * prices.beta
    if gap <= 0:
        raise DomainError("anchor epsilon must satisfy epsilon * beta < gamma")
    scale = res_capacity * (prices.gamma - 1.0)
    slack = scale / gap - demands[anchor]
    out = []
    for i, e in enumerate(demands):
        if i == anchor or e == demands[anchor]:
            out.append(float(epsilon_anchor))
            continue
        reach = slack + e
        if reach <= 0:
            raise DomainError(f"type {i}: no admissible risk profile (slack + E = {reach} <= 0)")
        eps = (prices.gamma - scale / reach) / prices.beta
        if eps < 1.0 - REL_TOL:
            raise DomainError(f"type {i}: no admissible risk profile (epsilon = {eps} < 1)")
        out.append(max(eps, 1.0))
    return tuple(out)


def _demand_from_slack(instance: GameInstance, sub: _Subgame, slack: float) -> float:
    n = instance.n_consumers
    return sub.pinned_demand + min(sub.demand_cap, max(slack * n / (n - 1), 0.0))


def ne_demand(instance: GameInstance) -> float:
    """Aggregate RES demand at equilibrium, including any always-competing types."""
    return solve(instance).ne_demand


def _greedy_slice(instance: GameInstance, sub: _Subgame, slack: float, objective: str):
    n = instance.n_consumers
    r, e, eps = instance.weights, instance.demands, instance.epsilons
    p = np.array([1.0 if k is StrategyKind.DOMINANT_RES else 0.0 for k in sub.kinds])
    mixed = sub.mixed
    budget = max(slack, 0.0) / (n - 1)
    room = float(np.sum(r[mixed] * e[mixed]))
    if budget > room * (1.0 + REL_TOL):
        p[mixed] = 1.0
        return StrategyProfile(tuple(p), saturated=True)
    if objective == "worst":
        order = sorted(mixed, key=lambda i: (eps[i], -e[i], i))
    elif objective == "best":
        # full ties break the other way so the two selections are the slice's ends
        order = sorted(mixed, key=lambda i: (-eps[i], e[i], -i))
    else:
        raise InvalidArgument(f"objective must be 'worst' or 'best', got {objective!r}")
    floor = 1e-12 * room  # rounding residue, not a real allocation
    for i in order:
        unit = r[i] * e[i]
        if budget <= floor or unit <= 0:
            continue
        take = min(1.0, budget / unit)
        p[i] = take
        budget -= take * unit
    return StrategyProfile(tuple(np.clip(p, 0.0, 1.0)))


def select_ne(instance: GameInstance, objective: str = "worst") -> StrategyProfile:
    """Extreme point of the equilibrium slice.

    ``worst`` maximizes night cost by letting the least risk-averse types
    take the day slots; ``best`` does the opposite.
    """
    report = solve(instance)
    if not report.ne_exists:
        raise StateError(f"{report.case}: no equilibrium exists")
    if objective == "worst":
        return report.worst_profile
    if objective == "best":
        return report.best_profile
    raise InvalidArgument(f"objective must be 'worst' or 'best', got {objective!r}")


def solve(instance: GameInstance) -> EquilibriumReport:
    label = classify(instance)
    sub = _subgame(instance, label)
    if not sub.mixed:
        p = StrategyProfile(tuple(1.0 if k is StrategyKind.DOMINANT_RES else 0.0 for k in sub.kinds))
        demand = sub.pinned_demand
        return EquilibriumReport(label, sub.kinds, True, None, demand, p, p)
    exists, slack = ne_exists(instance, label)
    if not exists:
        return EquilibriumReport(label, sub.kinds, False, None, None, None, None)
    return EquilibriumReport(
        case=label,
        kind_per_type=sub.kinds,
        ne_exists=True,
        common_slack=slack,
        ne_demand=_demand_from_slack(instance, sub, slack),
        worst_profile=_greedy_slice(instance, sub, slack, "worst"),
        best_profile=_greedy_slice(instance, sub, slack, "best"),
    )
