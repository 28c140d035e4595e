"""Scenario files and the experiment drivers behind the command line.

A scenario is one YAML document::

    n: 1000
    res_capacity: 2125
    c_res: 1
    beta: 2
    gamma: 3
    epsilon0: 1
    types:
      - {e: 2, r: 0.20, epsilon: derive}
      - {e: 3, r: 0.40, epsilon: derive}
    sweep: {param: ER, from: 0.05, to: 1.25, step: 0.05, scale: d_total}
    algorithm: {policy: PA, n_iter: 100, seed: 42, tolerance: 1.0e-9}
    oracle: {profiles: [[0.5, 0.5]], n_values: [10, 20, 40], scale_capacity: true}

Types marked ``derive`` get the inverse risk degree that puts them on the
same equilibrium slack as the anchor type: the smallest-demand type with
``epsilon0`` by default, or the largest-demand type when sweeping
``epsilon_last``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence

import numpy as np
import yaml

from . import bestresponse, central, equilibrium, oracle
from .bestresponse import AlgorithmConfig
from .errors import DomainError, GameError, InvalidArgument
from .model import (ConsumerType, GameInstance, PriceSchedule, StrategyProfile,
                    aggregate_demand, d_total)

SWEEP_PARAMS = ("ER", "epsilon_last", "beta", "gamma")
DERIVE = "derive"


class ConfigError(InvalidArgument):
    """Scenario document failed validation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class TypeSpec:
    e: float
    r: float
    epsilon: Optional[float]  # None means derive


@dataclass(frozen=True)
class Sweep:
    param: str
    start: float
    stop: float
    step: float
    scale: Optional[str] = None

    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding drops float noise such as 4.8999999999999995 from the axis
        return np.round(self.start + self.step * np.arange(count), 12)


@dataclass(frozen=True)
class OracleSpec:
    profiles: tuple[tuple[float, ...], ...] = ()
    n_values: tuple[int, ...] = ()
    scale_capacity: bool = True


@dataclass(frozen=True)
class Scenario:
    n: int
    res_capacity: float
    prices: PriceSchedule
    types: tuple[TypeSpec, ...]
    epsilon0: Optional[float] = None
    sweep: Optional[Sweep] = None
    algorithm: Optional[AlgorithmConfig] = None
    oracle: OracleSpec = field(default_factory=OracleSpec)
    outputs: dict = field(default_factory=dict)

    @property
    def derives(self) -> bool:
        return any(t.epsilon is None for t in self.types)

    def base_instance(self) -> GameInstance:
        """The unswept game; an epsilon_last sweep without a fixed value starts at its first point."""
        if (self.sweep is not None and self.sweep.param == "epsilon_last"
                and sorted(self.types, key=lambda t: t.e)[-1].epsilon is None):
            return self.instance_at(self.sweep.start)
        return self.instance_at()

    def instance_at(self, value: Optional[float] = None) -> GameInstance:
        """Concrete game, optionally with the sweep parameter set to ``value`` (already scaled)."""
        er, prices = self.res_capacity, self.prices
        specs = sorted(self.types, key=lambda t: t.e)
        eps = [t.epsilon for t in specs]
        param = self.sweep.param if (self.sweep and value is not None) else None
        if param == "ER":
            er = float(value)
        elif param == "beta":
            prices = PriceSchedule(prices.c_res, float(value), prices.gamma)
        elif param == "gamma":
            prices = PriceSchedule(prices.c_res, prices.beta, float(value))
        elif param == "epsilon_last":
            eps[-1] = float(value)

        if any(x is None for x in eps):
            demands = [t.e for t in specs]
            if param == "epsilon_last":
                derived = equilibrium.derive_epsilons(demands, eps[-1], er, prices, anchor=-1)
            else:
                derived = equilibrium.derive_epsilons(demands, self.epsilon0, er, prices, anchor=0)
            eps = [d if x is None else x for x, d in zip(eps, derived)]
        types = tuple(ConsumerType(i, t.e, e, t.r) for i, (t, e) in enumerate(zip(specs, eps)))
        return GameInstance(self.n, er, prices, types)

    def sweep_points(self) -> list[tuple[float, float]]:
        """(raw axis value, value applied to the instance) pairs in axis order."""
        if self.sweep is None:
            return []
        raw = self.sweep.values()
        factor = 1.0
        if self.sweep.scale == "d_total":
            factor = self.n * math.fsum(t.r * t.e for t in self.types)
        return [(float(v), float(v) * factor) for v in raw]


def _number(doc: dict, key: str, path: str, *, required=True, kind=float):
    if key not in doc:
        if required:
            raise ConfigError(path, "missing required field")
        return None
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(path, f"expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _parse_types(raw: Any) -> tuple[TypeSpec, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("types", "expected a non-empty list")
    out = []
    for i, t in enumerate(raw):
        path = f"types[{i}]"
        if not isinstance(t, dict):
            raise ConfigError(path, "expected a mapping with e, r, epsilon")
        unknown = set(t) - {"e", "r", "epsilon"}
        if unknown:
            raise ConfigError(path, f"unknown fields {sorted(unknown)}")
        e = _number(t, "e", f"{path}.e")
        r = _number(t, "r", f"{path}.r")
        eps_raw = t.get("epsilon", DERIVE)
        if eps_raw == DERIVE:
            eps = None
        else:
            eps = _number(t, "epsilon", f"{path}.epsilon")
            if eps < 1:
                raise ConfigError(f"{path}.epsilon", f"must be >= 1, got {eps}")
        if not e > 0:
            raise ConfigError(f"{path}.e", f"must be positive, got {e}")
        if not 0 <= r <= 1:
            raise ConfigError(f"{path}.r", f"must lie in [0, 1], got {r}")
        out.append(TypeSpec(e, r, eps))
    total = math.fsum(t.r for t in out)
    if abs(total - 1.0) > 1e-9:
        raise ConfigError("types[].r", f"weights must sum to 1, got {total!r}")
    return tuple(out)


def _parse_sweep(raw: Any) -> Optional[Sweep]:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("sweep", "expected a mapping")
    param = raw.get("param")
    if param not in SWEEP_PARAMS:
        raise ConfigError("sweep.param", f"must be one of {SWEEP_PARAMS}, got {param!r}")
    start = _number(raw, "from", "sweep.from")
    stop = _number(raw, "to", "sweep.to")
    step = _number(raw, "step", "sweep.step")
    if not step > 0:
        raise ConfigError("sweep.step", f"must be positive, got {step}")
    if stop < start:
        raise ConfigError("sweep.to", "empty range (to < from)")
    scale = raw.get("scale")
    if scale not in (None, "d_total"):
        raise ConfigError("sweep.scale", f"only 'd_total' is supported, got {scale!r}")
    if scale and param != "ER":
        raise ConfigError("sweep.scale", "scale applies to the ER axis only")
    return Sweep(param, start, stop, step, scale)


def _parse_algorithm(raw: Any) -> Optional[AlgorithmConfig]:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("algorithm", "expected a mapping")
    policy = raw.get("policy", "PA")
    if policy not in ("PA", "ES"):
        raise ConfigError("algorithm.policy", f"must be PA or ES, got {policy!r}")
    n_iter = _number(raw, "n_iter", "algorithm.n_iter", required=False, kind=int) or 100
    seed = _number(raw, "seed", "algorithm.seed", required=False, kind=int) or 0
    tol = _number(raw, "tolerance", "algorithm.tolerance", required=False)
    order = raw.get("play_order")
    try:
        return AlgorithmConfig(policy, n_iter, seed, 1e-9 if tol is None else tol,
                               None if order is None else tuple(order))
    except InvalidArgument as exc:
        raise ConfigError("algorithm", str(exc)) from exc


def _parse_oracle(raw: Any) -> OracleSpec:
    if raw is None:
        return OracleSpec()
    if not isinstance(raw, dict):
        raise ConfigError("oracle", "expected a mapping")
    profiles = tuple(tuple(float(x) for x in p) for p in raw.get("profiles", ()))
    n_values = tuple(int(x) for x in raw.get("n_values", ()))
    return OracleSpec(profiles, n_values, bool(raw.get("scale_capacity", True)))


def ingest_config(source) -> Scenario:
    """Parse and validate a scenario from a path, a YAML string, or an already-loaded mapping."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if not isinstance(source, str) or "\n" not in source and not source.lstrip().startswith("{"):
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError("<document>", f"not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "expected a mapping at top level")

    n = _number(doc, "n", "n", kind=int)
    if n < 2:
        raise ConfigError("n", f"need at least 2 consumers, got {n}")
    er = _number(doc, "res_capacity", "res_capacity")
    if not er > 0:
        raise ConfigError("res_capacity", f"must be positive, got {er}")
    c_res = _number(doc, "c_res", "c_res")
    beta = _number(doc, "beta", "beta")
    gamma = _number(doc, "gamma", "gamma")
    if not c_res > 0:
        raise ConfigError("c_res", f"must be positive, got {c_res}")
    if not beta > 1:
        raise ConfigError("beta", f"must exceed 1, got {beta}")
    if not gamma > beta:
        raise ConfigError("gamma", f"must exceed beta ({beta}), got {gamma}")
    types = _parse_types(doc.get("types"))
    if len(types) > n:
        raise ConfigError("types", "more types than consumers")
    sweep = _parse_sweep(doc.get("sweep"))
    epsilon0 = _number(doc, "epsilon0", "epsilon0", required=False)
    needs_anchor = any(t.epsilon is None for t in types) and not (
        sweep is not None and sweep.param == "epsilon_last")
    if needs_anchor and epsilon0 is None:
        raise ConfigError("epsilon0", "required when any type epsilon is 'derive'")
    if epsilon0 is not None and epsilon0 < 1:
        raise ConfigError("epsilon0", f"must be >= 1, got {epsilon0}")

    scenario = Scenario(
        n=n, res_capacity=er, prices=PriceSchedule(c_res, beta, gamma), types=types,
        epsilon0=epsilon0, sweep=sweep, algorithm=_parse_algorithm(doc.get("algorithm")),
        oracle=_parse_oracle(doc.get("oracle")), outputs=dict(doc.get("outputs") or {}))
    if scenario.derives and not (sweep and sweep.param == "epsilon_last"):
        try:
            scenario.base_instance()
        except DomainError as exc:
            raise ConfigError("types[].epsilon", f"derivation failed: {exc}") from exc
    return scenario


def with_seed(scenario: Scenario, seed: int) -> Scenario:
    algo = scenario.algorithm or AlgorithmConfig()
    return replace(scenario, algorithm=replace(algo, rng_seed=int(seed)))


# -- drivers ---------------------------------------------------------------------------


def _per_type(prefix: str, m: int) -> list[str]:
    return [f"{prefix}_{i}" for i in range(m)]


def sweep_columns(scenario: Scenario) -> list[str]:
    m = len(scenario.types)
    axis = [scenario.sweep.param] if scenario.sweep else []
    return (axis + ["case", "ne_exists", "ne_demand", "d_total", "cost_opt", "cost_ne_worst", "poa"]
            + _per_type("p_res_opt", m) + _per_type("p_res_worst", m)
            + _per_type("p_res_best", m) + _per_type("epsilon", m) + ["note"])


def _evaluate(instance: GameInstance) -> dict:
    report = equilibrium.solve(instance)
    opt_p, opt = central.optimal_profile(instance)
    row = {
        "case": str(report.case.variant),
        "ne_exists": report.ne_exists,
        "ne_demand": report.ne_demand,
        "d_total": d_total(instance),
        "cost_opt": opt.total,
        "cost_ne_worst": None,
        "poa": None,
    }
    for i, v in enumerate(opt_p.p_res):
        row[f"p_res_opt_{i}"] = v
    for i, v in enumerate(instance.epsilons):
        row[f"epsilon_{i}"] = float(v)
    if report.ne_exists:
        worst = central.social_cost(report.worst_profile, instance).total
        row["cost_ne_worst"] = worst
        row["poa"] = worst / opt.total
        for i, (w, b) in enumerate(zip(report.worst_profile.p_res, report.best_profile.p_res)):
            row[f"p_res_worst_{i}"] = w
            row[f"p_res_best_{i}"] = b
    return row


def run_scenario(scenario: Scenario) -> list[dict]:
    """One row per sweep point (or a single row), in axis order."""
    points = scenario.sweep_points() or [(None, None)]
    rows = []
    for raw, applied in points:
        row = {}
        if scenario.sweep is not None:
            row[scenario.sweep.param] = raw
        try:
            instance = scenario.instance_at(applied)
        except GameError as exc:
            row["note"] = str(exc)
            rows.append(row)
            continue
        row.update(_evaluate(instance))
        rows.append(row)
    return rows


def algorithm_columns(m: int) -> list[str]:
    return ["iteration", "x_sigma", "demand"] + _per_type("eqp", m) + ["converged", "ne_demand"]


def run_algorithm(scenario: Scenario) -> list[dict]:
    """Per-iteration trace of the best-response run plus a closing comparison row."""
    instance = scenario.base_instance()
    config = scenario.algorithm or AlgorithmConfig()
    trace = bestresponse.run(instance, config)
    rows = []
    n = instance.n_consumers
    for k, (snap, xs) in enumerate(zip(trace.snapshots, trace.x_sigma_history), start=1):
        row = {"iteration": k, "x_sigma": xs,
               "demand": n * math.fsum(instance.weights * instance.demands * snap),
               "converged": trace.converged_at == k}
        row.update({f"eqp_{i}": float(v) for i, v in enumerate(snap)})
        rows.append(row)
    final = {"iteration": "final", "x_sigma": trace.final_x_sigma,
             "demand": aggregate_demand(trace.final_profile, instance),
             "converged": trace.converged_at is not None,
             "ne_demand": equilibrium.solve(instance).ne_demand}
    final.update({f"eqp_{i}": v for i, v in enumerate(trace.final_profile.p_res)})
    rows.append(final)
    return rows


ORACLE_COLUMNS = ["n", "type", "p", "profile", "exact_cost", "meanfield_cost", "gap"]


def oracle_check(scenario: Scenario) -> list[dict]:
    base = scenario.base_instance()
    profiles = scenario.oracle.profiles or ((0.5,) * base.n_types,)
    n_values = scenario.oracle.n_values or (base.n_consumers,)
    rows = []
    for n in n_values:
        er = base.res_capacity * n / base.n_consumers if scenario.oracle.scale_capacity else base.res_capacity
        inst = replace(base, n_consumers=n, res_capacity=er)
        for prof in profiles:
            profile = StrategyProfile(prof)
            for i in range(inst.n_types):
                exact = oracle.exact_cost_res(i, profile, inst)
                mf = oracle.meanfield_cost_res(i, profile, inst)
                rows.append({"n": n, "type": i, "p": profile.p_res[i],
                             "profile": ";".join(format_value(x) for x in profile.p_res),
                             "exact_cost": exact, "meanfield_cost": mf, "gap": abs(exact - mf)})
    return rows


# -- CSV -------------------------------------------------------------------------------


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()
