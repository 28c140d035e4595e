"""Two consumer classes with different risk attitudes.

We vary how much the large consumers would rather not shift their load to
the night and derive the small consumers' attitude so an equilibrium
exists.  The price of anarchy first grows and then shrinks as the large
consumers start competing for sure.  Once every class prefers to compete
outright, the outcome is efficient.
"""

from pathlib import Path

from energy_source_game import ingest_config, price_of_anarchy
from energy_source_game.scenario import run_scenario

here = Path(__file__).parent.parent / "scenarios"
rows = run_scenario(ingest_config(here / "risk_sweep.yaml"))

for row in rows[::100] + [rows[-1]]:
    print(f"eps_1={row['epsilon_last']:.4f}  eps_0={row['epsilon_0']:.4f}  "
          f"PoA-1={row['poa'] - 1:.3e}  p_worst=({row['p_res_worst_0']:.4f}, {row['p_res_worst_1']:.4f})")
peak = max(rows, key=lambda r: r["poa"])
print(f"peak inefficiency at eps_1={peak['epsilon_last']}")

always = ingest_config(here / "always_compete.yaml").base_instance()
print(f"\nwhen everyone prefers to compete: PoA = {price_of_anarchy(always).ratio}")
