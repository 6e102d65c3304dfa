"""
Ascending package auctions
==========================

Six bidders compete for A, B and AB.  First against a seller with additive
costs, then through an auctioneer acting for a seller with reservation
values, which enter as dummy bidders.
"""
from pakmarket import catalog, format_trace, run_ascending_auction, run_extended_auction

market = catalog.load("additive_auction")
plain = run_ascending_auction(market)
print(format_trace(plain))
print("equilibrium:", plain.verification.ok)
print()

ext = run_extended_auction(catalog.load("extended_auction"))
# dummy bidders clutter the table, so show only prices and the outcome
for rnd in ext.rounds:
    print(rnd.t, tuple(rnd.prices.values()))
names = ext.instance.supply.names
for l, k in enumerate(ext.extras["regular_allocation"]):
    if k:
        print("bidder", ext.instance.buyer_name(l), "wins", k.label(names))
print("value from the seller's side:", ext.extras["seller_view_welfare"])
