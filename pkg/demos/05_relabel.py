"""
Splitting identical units into distinct labels
==============================================

Two identical units of A become A_1 and A_2.  Each copy of a package that
holds A gets one of the original incremental steps, and welfare does not move.
"""
from pakmarket import catalog, collapse_prices, efficient_allocation, relabel_identical, solve_welfare

market = catalog.load("two_goods")
split = relabel_identical(market, "A")

print("new varieties:", split.supply.names)
for node, steps in split.seller.schedule.steps:
    print(f"  {split.label(node):<6} steps {list(steps)}")

print("optimal welfare before:", efficient_allocation(market).welfare)
print("optimal welfare after: ", efficient_allocation(split).welfare)

res = solve_welfare(split)
if res.integral:
    back = collapse_prices(market, "A", res.certificate.prices)
    print("prices on the original packages:", {market.label(s): str(p) for s, p in back.items()})
