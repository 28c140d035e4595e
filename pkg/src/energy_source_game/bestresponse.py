"""Distributed best-response dynamics over consumer types.

Types take turns in a fixed random order.  Each sees only the running
aggregate ``x_sigma`` (expected competing energy under PA, expected
competing headcount under ES), picks the competing probability that
minimizes its expected bill, shrinks it by a uniform random factor so the
first mover cannot grab everything, and adds the result to its cumulative
probability.  The run stops once no type moves or the iteration budget is
spent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .equilibrium import Case, classify
from .errors import InvalidArgument, StateError
from .model import GameInstance, StrategyProfile

COST_TIE = 1e-12


class Policy(str, enum.Enum):
    PA = "PA"
    ES = "ES"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AlgorithmConfig:
    policy: Policy = Policy.PA
    max_outer_iterations: int = 100
    rng_seed: int = 0
    convergence_tolerance: float = 1e-9
    play_order: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        if self.max_outer_iterations < 1:
            raise InvalidArgument("max_outer_iterations must be >= 1")
        if self.convergence_tolerance < 0:
            raise InvalidArgument("convergence_tolerance must be >= 0")
        if self.play_order is not None:
            object.__setattr__(self, "play_order", tuple(int(i) for i in self.play_order))


@dataclass
class AlgorithmTrace:
    seed: int
    policy: Policy
    order: tuple[int, ...]
    snapshots: list[np.ndarray] = field(default_factory=list)
    x_sigma_history: list[float] = field(default_factory=list)
    played_flags: list[np.ndarray] = field(default_factory=list)
    converged_at: Optional[int] = None
    final_profile: Optional[StrategyProfile] = None
    final_x_sigma: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.snapshots)


def _share_params(type_index, x_sigma, instance, policy):
    """Allocation is min(E, k / (a + b p)) for both policies."""
    t = instance.types[type_index]
    n = instance.n_consumers
    if policy is Policy.PA:
        k = t.day_demand * instance.res_capacity
        a = x_sigma + t.day_demand
        b = (n - 1) * t.weight * t.day_demand
    else:
        k = instance.res_capacity
        a = x_sigma + 1.0
        b = (n - 1) * t.weight
    return k, a, b


def allocation_estimate(type_index: int, p: float, x_sigma: float, instance: GameInstance,
                        policy: Policy = Policy.PA) -> float:
    """RES share a type expects if it competes with probability ``p`` on top of ``x_sigma``."""
    policy = Policy(policy)
    k, a, b = _share_params(type_index, x_sigma, instance, policy)
    e = instance.types[type_index].day_demand
    if policy is Policy.PA:
        # the max(ER, .) guard is the same as clamping at E
        return e * instance.res_capacity / max(instance.res_capacity, a + b * p)
    return min(e, k / (a + b * p))


def expected_personal_cost(type_index: int, p: float, x_sigma: float, instance: GameInstance,
                           policy: Policy = Policy.PA) -> float:
    t = instance.types[type_index]
    prices = instance.prices
    share = allocation_estimate(type_index, p, x_sigma, instance, policy)
    day = share * prices.c_res + (t.day_demand - share) * prices.day_price
    night = t.full_profile * prices.night_price
    return p * day + (1.0 - p) * night


def best_response(type_index: int, x_sigma: float, instance: GameInstance,
                  policy: Policy = Policy.PA) -> float:
    """Exact minimizer of the expected bill over p in [0, 1].

    The cost is linear while capacity is slack and convex once it binds, so
    the minimum sits at an endpoint, the kink, or the single stationary
    point of the convex piece.  Ties go to the smallest p.
    """
    policy = Policy(policy)
    t = instance.types[type_index]
    prices = instance.prices
    k, a, b = _share_params(type_index, x_sigma, instance, policy)
    candidates = [0.0, 1.0]
    if b > 0:
        kink = (k / t.day_demand - a) / b
        if 0.0 < kink < 1.0:
            candidates.append(kink)
        gap = prices.gamma - t.inv_risk_aversion * prices.beta
        if gap > 0:
            # stationary where (a + b p)^2 = (gamma - 1) k a / (E (gamma - eps beta))
            root = (math.sqrt((prices.gamma - 1.0) * k * a / (t.day_demand * gap)) - a) / b
            if 0.0 < root < 1.0:
                candidates.append(root)
    candidates.sort()
    costs = [expected_personal_cost(type_index, p, x_sigma, instance, policy) for p in candidates]
    low = min(costs)
    for p, c in zip(candidates, costs):
        if c <= low + COST_TIE:
            return p
    return candidates[0]


def cap(p_star: float, u: float) -> float:
    return u * p_star


def _initial_state(instance: GameInstance, policy: Policy):
    label = classify(instance)
    if label.variant not in (Case.CASE2A, Case.CASE2C, Case.CASE4):
        raise StateError(f"{label.variant} has dominant strategies; use solve() directly")
    n = instance.n_consumers
    everyone = list(range(instance.n_types))
    if label.variant is Case.CASE2A:
        return label, everyone, 0.0
    if label.variant is Case.CASE2C:
        return label, sorted(label.sigma2), 0.0
    s1 = sorted(label.sigma1)
    per_type = [instance.types[i] for i in s1]
    if policy is Policy.PA:
        x0 = math.fsum(t.weight * (n - 1) * t.day_demand for t in per_type)
    else:
        x0 = math.fsum(t.weight * (n - 1) for t in per_type)
    return label, sorted(label.sigma2), x0


def x_sigma_of(eqp: np.ndarray, playing: Sequence[int], instance: GameInstance,
               policy: Policy, offset: float = 0.0) -> float:
    """Aggregate implied by cumulative probabilities ``eqp`` of the playing types."""
    n = instance.n_consumers
    terms = [instance.types[i].weight * eqp[i] * (instance.types[i].day_demand if policy is Policy.PA else 1.0)
             for i in playing]
    return offset + (n - 1) * math.fsum(terms)


def run(instance: GameInstance, config: AlgorithmConfig = AlgorithmConfig()) -> AlgorithmTrace:
    policy = config.policy
    label, playing, x_sigma = _initial_state(instance, policy)
    rng = np.random.default_rng(config.rng_seed)
    if config.play_order is not None:
        order = tuple(config.play_order)
        if sorted(order) != playing:
            raise InvalidArgument(f"play_order {order} is not a permutation of types {playing}")
    else:
        order = tuple(int(i) for i in rng.permutation(playing))

    m = instance.n_types
    eqp = np.zeros(m)
    trace = AlgorithmTrace(seed=config.rng_seed, policy=policy, order=order)
    n = instance.n_consumers
    for it in range(1, config.max_outer_iterations + 1):
        played = np.zeros(m, dtype=int)
        old = eqp.copy()
        for i in order:
            t = instance.types[i]
            p_star = best_response(i, x_sigma, instance, policy)
            step = cap(p_star, rng.random())
            new = min(1.0, eqp[i] + step)
            added = new - eqp[i]
            eqp[i] = new
            played[i] = 1
            unit = t.day_demand if policy is Policy.PA else 1.0
            x_sigma += (n - 1) * t.weight * added * unit
        trace.snapshots.append(eqp.copy())
        trace.x_sigma_history.append(x_sigma)
        trace.played_flags.append(played)
        if np.max(np.abs(eqp - old)) <= config.convergence_tolerance:
            trace.converged_at = it
            break

    final = eqp.copy()
    if label.variant is Case.CASE4:
        final[sorted(label.sigma1)] = 1.0
    trace.final_profile = StrategyProfile(tuple(final))
    trace.final_x_sigma = x_sigma
    return trace


def deviation_gain(type_index: int, p: float, x_sigma: float, instance: GameInstance,
                   policy: Policy = Policy.PA) -> float:
    """Relative saving a type gets by switching from increment ``p`` to its best response."""
    current = expected_personal_cost(type_index, p, x_sigma, instance, policy)
    best = expected_personal_cost(
        type_index, best_response(type_index, x_sigma, instance, policy), x_sigma, instance, policy)
    return (current - best) / current
