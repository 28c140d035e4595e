"""A residential community of five household classes.

The smallest households are risk-seeking (epsilon = 1); every other class
gets the risk degree that lets an equilibrium exist.  With renewables
covering half of the everyone-competes demand, we compare the
uncoordinated outcome with central dispatch.
"""

from pathlib import Path

from energy_source_game import d_total, ingest_config, price_of_anarchy, solve

scenario = ingest_config(Path(__file__).parent.parent / "scenarios" / "residential.yaml")
game = scenario.base_instance()

print(f"households: {game.n_consumers}, renewable capacity: {game.res_capacity}")
print(f"demand if everyone competes: {d_total(game)}")
for t in game.types:
    print(f"  class {t.index}: E={t.day_demand:>4}  share={t.weight:.2f}  epsilon={t.inv_risk_aversion:.6f}")

report = solve(game)
print(f"\nregime: {report.case}")
print(f"equilibrium demand for renewables: {report.ne_demand:.2f}")

poa = price_of_anarchy(game)
print(f"worst equilibrium cost {poa.worst_ne_cost:.2f} vs optimum {poa.optimal_cost:.2f}")
print(f"price of anarchy: {poa.ratio:.4f}")
