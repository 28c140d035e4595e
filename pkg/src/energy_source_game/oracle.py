"""Exact finite-population expected costs.

The deciding consumer's type is known and it plays RES; each of the other
N - 1 consumers independently draws a type with probabilities r and then
competes with that type's probability.  Per outcome the allocation uses the
realized integer demand.  Two independent routes compute the expectation:
nested binomial sums over type counts and competitor counts, and brute-force
enumeration over every opponent's (type, action) pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.stats import binom, multinomial

from .errors import InvalidArgument, ResourceError
from .model import (GameInstance, ProfileLike, as_probabilities, cost_nonres,
                    proportional_share, res_cost_given_share)

BINOMIAL_LIMIT = 60
ENUMERATION_LIMIT = 10
MAX_TYPE_SPLITS = 200_000


@dataclass(frozen=True)
class OutcomeState:
    """Realized opponents: ``type_counts[k]`` of type k, ``competitor_counts[k]`` of them competing."""

    competitor_counts: tuple[int, ...]
    type_counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.competitor_counts) != len(self.type_counts):
            raise InvalidArgument("count vectors differ in length")
        for n, big_n in zip(self.competitor_counts, self.type_counts):
            if not 0 <= n <= big_n:
                raise InvalidArgument("competitor count outside [0, type count]")


def outcome_cost_res(type_index: int, competitor_counts, instance: GameInstance) -> float:
    """Bill of a competing consumer when opponents ``competitor_counts`` also compete."""
    e = instance.demands
    own = e[type_index]
    demand = own + float(np.dot(competitor_counts, e))
    share = proportional_share(own, instance.res_capacity, demand)
    return res_cost_given_share(own, share, instance.prices)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def exact_cost_res_binomial(type_index: int, profile: ProfileLike, instance: GameInstance,
                            limit: int = BINOMIAL_LIMIT) -> float:
    """Nested sums: multinomial type split of the opponents, binomial competitors per type."""
    p = as_probabilities(profile, instance)
    n_other = instance.n_consumers - 1
    m = instance.n_types
    if instance.n_consumers > limit or math.comb(n_other + m - 1, m - 1) > MAX_TYPE_SPLITS:
        raise ResourceError(
            f"binomial-sum oracle limited to N <= {limit} "
            f"and {MAX_TYPE_SPLITS} type splits (N={instance.n_consumers}, M={m})")
    r = instance.weights
    e = instance.demands
    total = 0.0
    for split in _compositions(n_other, m):
        w_split = multinomial.pmf(split, n_other, r) if m > 1 else 1.0
        if w_split == 0.0:
            continue
        # per-type competitor count pmfs, combined as an outer product
        axes = [np.arange(c + 1) for c in split]
        pmfs = [binom.pmf(ax, c, p[k]) for k, (ax, c) in enumerate(zip(axes, split))]
        grid = np.meshgrid(*axes, indexing="ij")
        demand = e[type_index] + sum(g * e[k] for k, g in enumerate(grid))
        weight = pmfs[0]
        for pm in pmfs[1:]:
            weight = np.multiply.outer(weight, pm)
        share = e[type_index] * instance.res_capacity / np.maximum(instance.res_capacity, demand)
        cost = share * instance.prices.c_res + (e[type_index] - share) * instance.prices.day_price
        total += w_split * float(np.sum(weight * cost))
    return total


def exact_cost_res_enumeration(type_index: int, profile: ProfileLike, instance: GameInstance,
                               limit: int = ENUMERATION_LIMIT) -> float:
    """Brute force over every opponent's (type, compete?) pair: (2M)^(N-1) outcomes."""
    p = as_probabilities(profile, instance)
    if instance.n_consumers > limit:
        raise ResourceError(f"joint enumeration limited to N <= {limit}, got {instance.n_consumers}")
    m = instance.n_types
    r, e = instance.weights, instance.demands
    # option 2k: type k competes; option 2k+1: type k stays out
    option_prob = np.empty(2 * m)
    option_load = np.zeros(2 * m)
    option_prob[0::2] = r * p
    option_prob[1::2] = r * (1.0 - p)
    option_load[0::2] = e
    n_other = instance.n_consumers - 1
    if n_other == 0:
        return outcome_cost_res(type_index, np.zeros(m), instance)
    choices = np.array(list(itertools.product(range(2 * m), repeat=n_other)), dtype=np.intp)
    prob = np.prod(option_prob[choices], axis=1)
    demand = e[type_index] + np.sum(option_load[choices], axis=1)
    own = e[type_index]
    share = own * instance.res_capacity / np.maximum(instance.res_capacity, demand)
    cost = share * instance.prices.c_res + (own - share) * instance.prices.day_price
    return float(np.sum(prob * cost))


def exact_cost_res(type_index: int, profile: ProfileLike, instance: GameInstance) -> float:
    return exact_cost_res_binomial(type_index, profile, instance)


def meanfield_cost_res(type_index: int, profile: ProfileLike, instance: GameInstance) -> float:
    """RES bill with opponents replaced by their expected demand (N - 1) sum r E p."""
    p = as_probabilities(profile, instance)
    own = instance.demands[type_index]
    demand = own + (instance.n_consumers - 1) * math.fsum(instance.weights * instance.demands * p)
    share = proportional_share(own, instance.res_capacity, demand)
    return res_cost_given_share(own, share, instance.prices)


def approximation_gap(type_index: int, profile: ProfileLike, instance: GameInstance) -> float:
    return float(abs(exact_cost_res(type_index, profile, instance)
                     - meanfield_cost_res(type_index, profile, instance)))


def is_ne_exact(profile: ProfileLike, instance: GameInstance, tol: float = 1e-9) -> bool:
    """Equilibrium check with exact finite-N costs.

    Interior types must be indifferent within ``tol`` relative; types at 1
    must weakly prefer RES and types at 0 must weakly prefer the night.
    """
    p = as_probabilities(profile, instance)
    for i in range(instance.n_types):
        if instance.weights[i] == 0.0:
            continue
        day = exact_cost_res(i, p, instance)
        night = cost_nonres(i, instance)
        if p[i] >= 1.0:
            ok = day <= night * (1.0 + tol)
        elif p[i] <= 0.0:
            ok = day >= night * (1.0 - tol)
        else:
            ok = abs(day - night) <= tol * night
        if not ok:
            return False
    return True


def opponent_outcomes(instance: GameInstance) -> Iterator[tuple[int, ...]]:
    """Every competitor count vector the other N - 1 consumers can realize."""
    for k in range(instance.n_consumers):
        yield from _compositions(k, instance.n_types)
