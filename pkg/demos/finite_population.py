"""How good is the mean-field cost in small communities?

The exact expected bill averages over every way the other consumers can
turn out.  The mean-field bill plugs in their expected load.  The two
agree for deterministic play and approach each other as the community
grows.
"""

from energy_source_game import GameInstance, PriceSchedule
from energy_source_game.oracle import (exact_cost_res, exact_cost_res_enumeration, is_ne_exact,
                                       meanfield_cost_res)

prices = PriceSchedule(c_res=1.0, beta=1.5, gamma=3.0)
duo = GameInstance.from_arrays(2, 1.0, prices, [1.0], [1.0], [1.0])
for p in (0.0, 0.5, 1.0):
    print(f"two consumers, opponent competes w.p. {p}: exact bill {exact_cost_res(0, [p], duo)}")
print(f"p=0.5 is an exact equilibrium: {is_ne_exact([0.5], duo)}")

print("\ncapacity growing with the community (ER = N/4), p = 0.5")
for n in (10, 20, 40):
    game = GameInstance.from_arrays(n, n / 4, prices, [1.0], [1.0], [1.0])
    exact = exact_cost_res(0, [0.5], game)
    mf = meanfield_cost_res(0, [0.5], game)
    # brute force visits 2^(N-1) outcomes, so only the smallest size
    brute = f"{exact_cost_res_enumeration(0, [0.5], game):.6f}" if n <= 10 else "-"
    print(f"N={n:>3}: exact {exact:.6f}  brute force {brute:>8}  mean-field {mf:.6f}  gap {abs(exact - mf):.5f}")
