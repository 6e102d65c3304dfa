"""
Values and costs of package multisets
=====================================

One buyer controls two unit-demand agents; the seller has two units each of
goods A and B and sells the bundle AB at a discount on the first copy.
"""
from pakmarket import PackageMultiset, aggregate_value, catalog, total_cost

market = catalog.load("two_goods")
buyer = market.buyers[0]
names = market.supply.names

# the buyer's value for a multiset is the best way to hand its copies to agents
for counts in ({1: 1}, {1: 1, 2: 1}, {3: 1}, {3: 2}, {1: 2, 3: 1}):
    k = PackageMultiset(counts)
    match = aggregate_value(buyer, k)
    print(f"value {k.label(names):<14} = {match.value}")

print()

# the seller pays the incremental steps of every node each package reaches
for counts in ({1: 1}, {3: 1}, {3: 2}, {1: 1, 2: 1, 3: 1}):
    k = PackageMultiset(counts)
    print(f"cost  {k.label(names):<14} = {total_cost(market.seller, k)}")
