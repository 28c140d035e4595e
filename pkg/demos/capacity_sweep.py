"""How much does the lack of coordination cost as renewable capacity grows?

Households over-compete for renewables, so the equilibrium pushes
aggregate demand to the point where the expected day bill matches the
night bill.  The gap to central dispatch is widest when capacity is half
of the total demand and closes once capacity covers everybody.
"""

from pathlib import Path

from energy_source_game.scenario import ingest_config, run_scenario

scenario = ingest_config(Path(__file__).parent.parent / "scenarios" / "residential_sweep.yaml")
rows = run_scenario(scenario)

print(f"{'ER/D_total':>10} {'regime':>7} {'optimal':>10} {'worst NE':>10} {'PoA':>7}")
for row in rows:
    print(f"{row['ER']:>10.2f} {row['case']:>7} {row['cost_opt']:>10.1f} "
          f"{row['cost_ne_worst']:>10.1f} {row['poa']:>7.4f}")

peak = max(rows, key=lambda r: r["poa"])
print(f"\nleast efficient at ER = {peak['ER']} * D_total (PoA {peak['poa']:.4f})")
