"""
Walrasian equilibrium through the welfare relaxation
====================================================

Four unit-demand buyers face a seller of one A and one B.  The relaxed
welfare program has an integral optimum, so its duals give prices that
support the efficient allocation.
"""
from pakmarket import catalog, enumerate_equilibrium_prices, solve_welfare, verify_equilibrium
from pakmarket.welfare import check_pricing_decomposition

market = catalog.load("four_buyers")
result = solve_welfare(market)
print("integer optimum  ", result.swp_value)
print("relaxed optimum  ", result.swlp_value)

cert = result.certificate
print("prices           ", {market.label(s): str(p) for s, p in cert.prices.items()})
for l, k in enumerate(cert.allocation):
    if k:
        print(f"buyer {market.buyer_name(l)} gets {k.label(market.supply.names)}, pays {cert.payment(l)}")

# independent brute-force check: every buyer and the seller are best-responding
print("verified         ", verify_equilibrium(market, cert.prices, cert.allocation).ok)
print("decomposition ok ", check_pricing_decomposition(market, cert).ok)

# all integer price vectors up to 12 that work
print("\nall integer equilibrium prices (A, B, AB):")
for vec in enumerate_equilibrium_prices(market, 12):
    print("   ", vec)
