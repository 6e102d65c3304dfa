import itertools
import random
import warnings

import pytest

import oracles
from pakmarket import (
    AdditiveMarginal,
    BuyerValuation,
    MarketInstance,
    PackageMultiset,
    RevenueMax,
    SetFunction,
    Supply,
    catalog,
    enumerate_feasible,
    verify_equilibrium,
)
from pakmarket.auction import (
    PreconditionWarning,
    format_trace,
    revenue_to_cost,
    run_ascending_auction,
    run_extended_auction,
    seller_view_optimum,
)
from pakmarket.errors import DomainError
from pakmarket.preferences import seller_objective

A, B, AB = 1, 2, 3


def unit_market(costs, buyers, n=2):
    return MarketInstance(Supply("ABC"[:n], (1,) * n), AdditiveMarginal(costs), [BuyerValuation.unit(b) for b in buyers])


def test_revenue_to_cost_on_reservation_values():
    seller = revenue_to_cost(SetFunction.from_mapping(2, {A: 2, B: 4, AB: 8}))
    assert seller.costs.as_dict() == {A: 4, B: 6, AB: 8}


@pytest.mark.parametrize("seed", range(4))
def test_revenue_and_cost_sellers_choose_alike(seed):
    rng = random.Random(seed)
    n = 3
    values = oracles.monotone_superadditive(n, rng)
    revenue = RevenueMax(SetFunction.from_mapping(n, values))
    cost = revenue_to_cost(revenue.values)
    supply = Supply("ABC", (1, 1, 1))
    packages = list(range(1, 8))
    offers = list(enumerate_feasible(supply, packages))
    for _ in range(30):
        prices = {s: rng.randint(0, 20) for s in packages}
        rev = [seller_objective(revenue, prices, k) for k in offers]
        cst = [seller_objective(cost, prices, k) for k in offers]
        best_rev = {i for i, v in enumerate(rev) if v == max(rev)}
        best_cst = {i for i, v in enumerate(cst) if v == max(cst)}
        assert best_rev == best_cst
        # the two objectives differ by a constant
        assert len({r - c for r, c in zip(rev, cst)}) == 1


def test_single_buyer_stops_at_once():
    result = run_ascending_auction(unit_market({1: 1}, [{1: 5}], n=1))
    assert [r.t for r in result.rounds] == [0]
    assert result.prices == {1: 1}
    assert result.allocation == (PackageMultiset({1: 1}),)
    assert result.verification.ok


def test_no_interest_leaves_everything_unsold():
    result = run_ascending_auction(unit_market({A: 3, B: 3, AB: 6}, [{A: 1, B: 2, AB: 3}]))
    assert result.allocation == (PackageMultiset(),)
    assert len(result.rounds) == 1


def _random_run(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    costs = oracles.min_closed_subadditive(n, rng)
    buyers = [
        {s: v for s, v in oracles.monotone_superadditive(n, rng).items() if s}
        for _ in range(rng.randint(1, 5))
    ]
    inst = unit_market({s: c for s, c in costs.items() if s}, buyers, n)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return inst, run_ascending_auction(inst)


@pytest.mark.parametrize("seed", range(60))
def test_prices_rise_by_one_on_overdemand_only(seed):
    inst, result = _random_run(seed)
    for before, after in zip(result.rounds, result.rounds[1:]):
        for s in inst.packages:
            step = after.prices[s] - before.prices[s]
            assert step == (1 if s in before.overdemanded else 0)
    assert not result.rounds[-1].overdemanded
    assert result.verification.ok
    assert result.certificate.welfare == result.verification.efficient_welfare


@pytest.mark.parametrize("seed", range(60))
def test_merged_packages_are_priced_additively(seed):
    _, result = _random_run(seed)
    for sq in result.squeezed:
        if sq.outcome == "merged":
            assert sq.price_identity


def test_squeezed_outcomes_on_reserve_market():
    result = run_ascending_auction(catalog.load("reserve_auction"))
    assert {(sq.package, sq.outcome, sq.buyer) for sq in result.squeezed} == {(A, "assigned", 0), (B, "assigned", 2)}


def test_extended_auction_without_costs_matches_plain_auction():
    inst = catalog.load("reserve_auction")
    plain = run_ascending_auction(inst)
    ext = run_extended_auction(inst)
    assert ext.extras["regular_allocation"] == plain.allocation
    assert ext.extras["seller_view_welfare"] == 12 == seller_view_optimum(inst)
    assert ext.rounds[0].t == -1
    assert ext.verification.ok


def test_extended_auction_with_auctioneer_costs():
    ext = run_extended_auction(catalog.load("extended_auction"))
    regular = ext.extras["regular_allocation"]
    assert regular[4] == PackageMultiset({AB: 1})
    assert all(not k for i, k in enumerate(regular) if i != 4)
    assert ext.prices == {A: 5, B: 7, AB: 11}
    assert ext.verification.ok


def test_extended_auction_worthless_to_buyers():
    inst = MarketInstance(
        Supply("AB", (1, 1)),
        RevenueMax(SetFunction.from_mapping(2, {A: 2, B: 4, AB: 8})),
        [BuyerValuation.unit({A: 0, B: 0, AB: 0}) for _ in range(2)],
    )
    ext = run_extended_auction(inst)
    assert all(not k for k in ext.extras["regular_allocation"])
    assert ext.extras["seller_keeps"] == AB
    assert ext.extras["seller_view_welfare"] == 8


def test_precondition_warnings():
    with pytest.warns(PreconditionWarning, match="not superadditive"):
        run_ascending_auction(unit_market({A: 1, B: 1, AB: 2}, [{A: 5, B: 5, AB: 6}]))
    with pytest.warns(PreconditionWarning, match="not subadditive"):
        run_ascending_auction(unit_market({A: 1, B: 1, AB: 5}, [{A: 5, B: 5, AB: 12}]))


def test_shape_requirements():
    inst = MarketInstance(Supply("A", (2,)), AdditiveMarginal({1: 1}), [BuyerValuation.unit({1: 3})])
    with pytest.raises(DomainError):
        run_ascending_auction(inst)
    with pytest.raises(DomainError):
        run_extended_auction(catalog.load("additive_auction"))


def test_trace_rendering():
    result = run_ascending_auction(catalog.load("additive_auction"))
    text = format_trace(result)
    assert text.splitlines()[0].startswith("t | prices (A,B,AB)")
    assert "squeezed out AB -> L5 (assigned)" in text
    events = result.trace_events()
    assert events[0]["event"] == "round" and events[-1]["event"] == "end"
    assert events[-1]["allocation"]["L5"] == "{AB}"
    assert len(result.price_path) == len(result.rounds)


def test_brute_force_agrees_on_small_markets():
    rng = random.Random(77)
    for _ in range(25):
        inst, result = _random_run(rng.randint(1000, 10 ** 6))
        tables = [dict(b.agents[0]) for b in inst.buyers]
        table = dict(inst.seller.table)
        n = inst.n
        best = None
        for choice in itertools.product([None] + list(inst.packages), repeat=len(tables)):
            used = [s for s in choice if s is not None]
            if any(a & b for a, b in itertools.combinations(used, 2)):
                continue
            w = sum(t.get(s, 0) for t, s in zip(tables, choice) if s) - sum(table[s] for s in used)
            best = w if best is None or w > best else best
        assert verify_equilibrium(inst, result.prices, result.allocation).welfare == best
