"""
Characteristic sets on the complete graph
=========================================

On the graph with every package as a node, the multiset that produces given
forward totals has a closed form, and so do the net prices.
"""
from pakmarket import (
    PackageMultiset,
    characteristic,
    complete_characteristic,
    complete_dual,
    complete_graph,
    dual_prices,
    forward_totals,
)

graph = complete_graph(3)
names = ("A", "B", "C")
k = PackageMultiset({0b111: 1, 0b011: 2, 0b100: 1})
totals = forward_totals(graph, k)
print("sold:", k.label(names))
print("forward totals:", {PackageMultiset.of(s).label(names): y for s, y in totals.items()})

print("recovered:", characteristic(graph, totals).label(names))
print("closed form agrees:", {s: c for s, c in complete_characteristic(3, totals).items() if c} == dict(k))

prices = {s: bin(s).count("1") * 3 + s % 2 for s in graph.nodes}
print("net prices agree:", dual_prices(graph, prices) == complete_dual(3, prices))
