"""
A market without equilibrium
============================

Three goods, three buyers, a seller with zero costs.  The relaxation beats
every integer allocation, and a grid search over prices finds nothing.
"""
from pakmarket import catalog, efficient_allocation, enumerate_equilibrium_prices, solve_welfare

market = catalog.load("no_equilibrium")
result = solve_welfare(market)
best = efficient_allocation(market)

print("integer optimum ", result.swp_value)
print("relaxed optimum ", result.swlp_value, f"(gap {result.gap})")
print("an efficient allocation:")
for l, k in enumerate(best.allocation):
    print(f"  buyer {market.buyer_name(l)}: {k.label(market.supply.names)}")

top = max(v for b in market.buyers for _, v in b.agents[0])
found = enumerate_equilibrium_prices(market, top, limit=1)
print(f"equilibrium prices with every price in [0, {top}]:", found or "none")
