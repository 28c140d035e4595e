"""Reaching the equilibrium without a coordinator.

Each class repeatedly best-responds to the running expected demand,
damping its move by a random factor.  Across seeds the final demand lands
next to the closed-form equilibrium demand.
"""

from pathlib import Path

import numpy as np

from energy_source_game import AlgorithmConfig, aggregate_demand, ingest_config, run, solve

game = ingest_config(Path(__file__).parent.parent / "scenarios" / "two_type_reference.yaml").base_instance()
target = solve(game).ne_demand

finals = []
for seed in range(20):
    trace = run(game, AlgorithmConfig(rng_seed=seed))
    finals.append(aggregate_demand(trace.final_profile, game))
    if seed < 3:
        print(f"seed {seed}: order {trace.order}, {trace.iterations} rounds, "
              f"final demand {finals[-1]:.4f}")

print(f"\nclosed form {target:.4f}; median over 20 seeds {np.median(finals):.4f}")

es = run(game, AlgorithmConfig(policy="ES", rng_seed=0))
print(f"equal sharing instead: {es.iterations} rounds, final profile {es.final_profile.p_res}")
