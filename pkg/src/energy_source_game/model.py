"""Game data types and the mean-field cost model.

Consumers either compete for the day-time renewable capacity (RES) or push
their whole load to the night base-load tariff (nonRES).  Over-subscribed
capacity is shared by proportional allocation and the shortfall is billed
at the day peak price.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import InvalidArgument

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class PriceSchedule:
    """Unit prices: RES at ``c_res``, night at ``beta * c_res``, day peak at ``gamma * c_res``."""

    c_res: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.c_res > 0:
            raise InvalidArgument(f"c_res must be positive, got {self.c_res}")
        if not self.beta > 1:
            raise InvalidArgument(f"beta must exceed 1, got {self.beta}")
        if not self.gamma > self.beta:
            raise InvalidArgument(f"gamma must exceed beta, got gamma={self.gamma} beta={self.beta}")

    @property
    def day_price(self) -> float:
        return self.gamma * self.c_res

    @property
    def night_price(self) -> float:
        return self.beta * self.c_res

    @property
    def dominance_ratio(self) -> float:
        """gamma / beta: types with epsilon at or above this always compete."""
        return self.gamma / self.beta


@dataclass(frozen=True)
class ConsumerType:
    """One consumer class.

    ``day_demand`` is the load risked in the day zone, ``inv_risk_aversion``
    (epsilon >= 1) scales it up to the full load served at night, and
    ``weight`` is the probability that a consumer belongs to this class.
    """

    index: int
    day_demand: float
    inv_risk_aversion: float
    weight: float

    def __post_init__(self):
        if not self.day_demand > 0:
            raise InvalidArgument(f"day_demand must be positive, got {self.day_demand}")
        if not self.inv_risk_aversion >= 1:
            raise InvalidArgument(
                f"inv_risk_aversion must be >= 1, got {self.inv_risk_aversion}")
        if not 0 <= self.weight <= 1:
            raise InvalidArgument(f"weight must lie in [0, 1], got {self.weight}")

    @property
    def risk_aversion(self) -> float:
        return 1.0 / self.inv_risk_aversion

    @property
    def full_profile(self) -> float:
        return self.inv_risk_aversion * self.day_demand


@dataclass(frozen=True)
class GameInstance:
    """A community of ``n_consumers`` sharing ``res_capacity`` units of renewable energy.

    Types are canonicalized on construction: sorted by day demand, ties by
    epsilon, then re-indexed 0..M-1.  Weights summing to 1 within 1e-9 are
    renormalized; anything further off is rejected.
    """

    n_consumers: int
    res_capacity: float
    prices: PriceSchedule
    types: tuple[ConsumerType, ...]

    def __post_init__(self):
        if int(self.n_consumers) != self.n_consumers or self.n_consumers < 2:
            raise InvalidArgument(f"n_consumers must be an integer >= 2, got {self.n_consumers}")
        if not self.res_capacity > 0:
            raise InvalidArgument(f"res_capacity must be positive, got {self.res_capacity}")
        types = tuple(self.types)
        if not types:
            raise InvalidArgument("at least one consumer type is required")
        if len(types) > self.n_consumers:
            raise InvalidArgument("more consumer types than consumers")
        total = math.fsum(t.weight for t in types)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidArgument(f"type weights must sum to 1, got {total!r}")
        ordered = sorted(types, key=lambda t: (t.day_demand, t.inv_risk_aversion))
        canon = tuple(
            replace(t, index=i, weight=t.weight if total == 1.0 else t.weight / total)
            for i, t in enumerate(ordered))
        object.__setattr__(self, "n_consumers", int(self.n_consumers))
        object.__setattr__(self, "res_capacity", float(self.res_capacity))
        object.__setattr__(self, "types", canon)

    @classmethod
    def from_arrays(cls, n_consumers, res_capacity, prices, demands, epsilons, weights):
        if not len(demands) == len(epsilons) == len(weights):
            raise InvalidArgument("demands, epsilons and weights must have equal length")
        types = tuple(
            ConsumerType(i, float(e), float(eps), float(r))
            for i, (e, eps, r) in enumerate(zip(demands, epsilons, weights)))
        return cls(n_consumers, res_capacity, prices, types)

    @property
    def n_types(self) -> int:
        return len(self.types)

    @cached_property
    def demands(self) -> np.ndarray:
        return np.array([t.day_demand for t in self.types])

    @cached_property
    def epsilons(self) -> np.ndarray:
        return np.array([t.inv_risk_aversion for t in self.types])

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.types])

    def with_capacity(self, res_capacity: float) -> "GameInstance":
        return replace(self, res_capacity=res_capacity)

    def with_epsilons(self, epsilons: Sequence[float]) -> "GameInstance":
        if len(epsilons) != self.n_types:
            raise InvalidArgument("epsilon vector length does not match number of types")
        types = tuple(replace(t, inv_risk_aversion=float(e)) for t, e in zip(self.types, epsilons))
        return replace(self, types=types)

    def with_prices(self, prices: PriceSchedule) -> "GameInstance":
        return replace(self, prices=prices)


@dataclass(frozen=True)
class StrategyProfile:
    """Per-type probability of competing for RES."""

    p_res: tuple[float, ...]
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        p = tuple(float(x) for x in self.p_res)
        for x in p:
            if not 0.0 <= x <= 1.0:
                raise InvalidArgument(f"probabilities must lie in [0, 1], got {x}")
        object.__setattr__(self, "p_res", p)

    @classmethod
    def constant(cls, value: float, n_types: int) -> "StrategyProfile":
        return cls((value,) * n_types)

    @property
    def p_nonres(self) -> tuple[float, ...]:
        return tuple(1.0 - x for x in self.p_res)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.p_res, dtype=float)

    def __len__(self):
        return len(self.p_res)


@dataclass(frozen=True)
class SocialCostBreakdown:
    res_cost: float
    day_peak_cost: float
    night_cost: float

    @property
    def total(self) -> float:
        return self.res_cost + self.day_peak_cost + self.night_cost


ProfileLike = Union[StrategyProfile, Sequence[float], np.ndarray]


def as_probabilities(profile: ProfileLike, instance: GameInstance) -> np.ndarray:
    p = profile.as_array() if isinstance(profile, StrategyProfile) else np.asarray(profile, float)
    if p.shape != (instance.n_types,):
        raise InvalidArgument(
            f"profile has shape {p.shape}, instance has {instance.n_types} types")
    if np.any(p < 0) or np.any(p > 1):
        raise InvalidArgument("probabilities must lie in [0, 1]")
    return p


def _check_type(type_index: int, instance: GameInstance) -> int:
    if not 0 <= type_index < instance.n_types:
        raise InvalidArgument(f"type index {type_index} out of range")
    return type_index


def aggregate_demand(profile: ProfileLike, instance: GameInstance) -> float:
    """Expected aggregate RES demand N * sum_l r_l p_l E_l."""
    p = as_probabilities(profile, instance)
    return instance.n_consumers * math.fsum(instance.weights * p * instance.demands)


def d_total(instance: GameInstance) -> float:
    """Aggregate RES demand if every consumer competes."""
    return instance.n_consumers * math.fsum(instance.weights * instance.demands)


def proportional_share(demand: float, res_capacity: float, total_demand: float) -> float:
    return demand * res_capacity / max(res_capacity, total_demand)


def allocation_pa(type_index: int, profile: ProfileLike, instance: GameInstance) -> float:
    """RES energy granted to a competing consumer of the given type under proportional allocation."""
    _check_type(type_index, instance)
    return proportional_share(
        instance.types[type_index].day_demand,
        instance.res_capacity,
        aggregate_demand(profile, instance))


def res_cost_given_share(demand: float, share: float, prices: PriceSchedule) -> float:
    """Cost of competing when ``share`` of ``demand`` is served by RES and the rest at peak."""
    return share * prices.c_res + (demand - share) * prices.day_price


def cost_res(type_index: int, profile: ProfileLike, instance: GameInstance) -> float:
    demand = instance.types[_check_type(type_index, instance)].day_demand
    share = allocation_pa(type_index, profile, instance)
    return res_cost_given_share(demand, share, instance.prices)


def cost_nonres(type_index: int, instance: GameInstance) -> float:
    t = instance.types[_check_type(type_index, instance)]
    return t.full_profile * instance.prices.night_price


def social_cost(profile: ProfileLike, instance: GameInstance) -> SocialCostBreakdown:
    p = as_probabilities(profile, instance)
    prices = instance.prices
    demand = aggregate_demand(p, instance)
    er = instance.res_capacity
    night_energy = instance.n_consumers * math.fsum(
        instance.weights * (1.0 - p) * instance.epsilons * instance.demands)
    return SocialCostBreakdown(
        res_cost=min(er, demand) * prices.c_res,
        day_peak_cost=max(0.0, demand - er) * prices.day_price,
        night_cost=night_energy * prices.night_price,
    )
