import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pakmarket import (
    AdditiveMarginal,
    BuyerValuation,
    IncrementalCfg,
    IncrementalCostSchedule,
    MarketInstance,
    PackageMultiset,
    RevenueMax,
    SetFunction,
    SetUnion,
    Supply,
    aggregate_value,
    buyer_demand,
    catalog,
    check_subadditive,
    check_superadditive,
    enumerate_feasible,
    make_cfg,
    seller_supply,
    total_cost,
)
from pakmarket.errors import DomainError, InfeasiblePartitionError, ValidationError
from pakmarket.preferences import additive_to_cfg, max_weight_matching

A, B, AB = 1, 2, 3
TWO_GOODS = make_cfg(2, [A, B, AB], [(AB, A), (AB, B)])
EXAMPLE2 = IncrementalCfg(TWO_GOODS, IncrementalCostSchedule({A: [1, 2], B: [1, 2], AB: [-1, 0]}))
TWO_EACH = Supply(("A", "B"), (2, 2))
ONE_EACH = Supply(("A", "B"), (1, 1))
COVER_VALUES = {1: 1, 2: 2, 4: 0, 3: 4, 5: 2, 6: 2, 7: 4}
COVER_COSTS = {1: 2, 2: 2, 4: 0, 3: 4, 5: 2, 6: 3, 7: 4}


def test_cost_examples():
    assert total_cost(EXAMPLE2, {AB: 1}) == 1
    assert total_cost(EXAMPLE2, {A: 1, B: 1, AB: 1}) == 5
    assert total_cost(EXAMPLE2, {}) == 0
    assert total_cost(AdditiveMarginal({A: 4}), {}) == 0


def test_cost_beyond_schedule():
    with pytest.raises(InfeasiblePartitionError):
        total_cost(EXAMPLE2, {A: 3})


def test_set_union_and_revenue_costs():
    union = SetUnion(SetFunction.from_mapping(2, {A: 4, B: 6, AB: 8}))
    assert total_cost(union, {A: 1, B: 1}) == 8
    assert total_cost(union, {A: 1}) == 4
    with pytest.raises(DomainError):
        total_cost(union, {A: 1, AB: 1})
    with pytest.raises(DomainError):
        total_cost(RevenueMax(SetFunction.from_mapping(2, {A: 2, B: 4, AB: 8})), {A: 1})


def test_decreasing_steps_rejected():
    with pytest.raises(ValidationError) as err:
        IncrementalCostSchedule({AB: [-1, -2]}, names=("A", "B"))
    assert "(AB, r=2)" in str(err.value)
    assert err.value.clause == "increasing-incremental-cost"


def test_negative_total_cost_rejected_at_load():
    seller = IncrementalCfg(TWO_GOODS, IncrementalCostSchedule({A: [0], B: [0], AB: [-1]}))
    with pytest.raises(ValidationError) as err:
        MarketInstance(ONE_EACH, seller, [])
    assert err.value.clause == "nonnegative-cost"


EXAMPLE1 = BuyerValuation([{A: 3, B: 5, AB: 9}, {A: 1, B: 2, AB: 9}])


def test_value_examples():
    assert aggregate_value(EXAMPLE1, {A: 1, B: 1, AB: 1}).value == 14
    assert aggregate_value(EXAMPLE1, {A: 1, B: 1}).value == 6
    assert aggregate_value(EXAMPLE1, {}).value == 0
    match = aggregate_value(EXAMPLE1, {A: 1, B: 1, AB: 1})
    assert sum(EXAMPLE1.value(q, s) for q, s in enumerate(match.assignment) if s) == 14


agent_tables = st.lists(
    st.dictionaries(st.integers(1, 7), st.integers(0, 12), max_size=7), min_size=1, max_size=4
)
small_multisets = st.dictionaries(st.integers(1, 7), st.integers(0, 2), max_size=4).filter(
    lambda k: sum(k.values()) <= 4
)


@given(agent_tables, small_multisets)
def test_value_matches_permutation_oracle(tables, k):
    buyer = BuyerValuation(tables)
    assert aggregate_value(buyer, k).value == oracles.aggregate_value_by_permutation(tables, k)


@given(agent_tables, small_multisets, st.integers(1, 7))
def test_value_is_monotone(tables, k, extra):
    buyer = BuyerValuation(tables)
    bigger = dict(k)
    bigger[extra] = bigger.get(extra, 0) + 1
    assert aggregate_value(buyer, bigger).value >= aggregate_value(buyer, k).value


@settings(max_examples=200)
@given(
    st.lists(st.dictionaries(st.integers(1, 15), st.integers(0, 20), max_size=10), min_size=1, max_size=9),
    st.dictionaries(st.integers(1, 15), st.integers(0, 3), max_size=6),
)
def test_matching_methods_agree(tables, k):
    ms = PackageMultiset(k)
    exhaustive = max_weight_matching(tables, ms, method="exhaustive")
    hungarian = max_weight_matching(tables, ms, method="hungarian")
    assert exhaustive.value == hungarian.value
    for plan in (exhaustive.assignment, hungarian.assignment):
        used = {}
        for s in plan:
            if s is not None:
                used[s] = used.get(s, 0) + 1
        assert all(c <= ms[s] for s, c in used.items())


def test_demand_examples():
    buyer1 = BuyerValuation.unit({A: 3, B: 5, AB: 9})
    d = buyer_demand(buyer1, {A: 4, B: 5, AB: 9}, TWO_EACH)
    assert d.utility == 0
    assert set(d.bundles) == {PackageMultiset(), PackageMultiset({B: 1}), PackageMultiset({AB: 1})}
    buyer4 = BuyerValuation.unit({A: 6, B: 2, AB: 11})
    d4 = buyer_demand(buyer4, {A: 5, B: 5, AB: 10}, TWO_EACH)
    assert d4.utility == 1
    assert set(d4.bundles) == {PackageMultiset({A: 1}), PackageMultiset({AB: 1})}
    nothing = buyer_demand(BuyerValuation.unit({}), {A: 0, B: 3, AB: 1}, TWO_EACH)
    assert PackageMultiset() in nothing.bundles


def test_supply_examples():
    seller = AdditiveMarginal({A: 4, B: 6, AB: 8})
    tied = seller_supply(seller, {A: 5, B: 7, AB: 10}, ONE_EACH)
    assert tied.utility == 2
    assert set(tied.bundles) == {PackageMultiset({AB: 1}), PackageMultiset({A: 1, B: 1})}
    unique = seller_supply(seller, {A: 5, B: 7, AB: 11}, ONE_EACH)
    assert unique.bundles == (PackageMultiset({AB: 1}),) and unique.utility == 3
    idle = seller_supply(seller, {A: 0, B: 0, AB: 0}, ONE_EACH)
    assert idle.bundles == (PackageMultiset(),)


@settings(max_examples=60)
@given(st.integers(0, 10_000))
def test_correspondences_are_exact_argmax(seed):
    rng = random.Random(seed)
    buyer = BuyerValuation([{s: rng.randint(0, 9) for s in (A, B, AB)} for _ in range(rng.randint(1, 3))])
    prices = {s: rng.randint(0, 9) for s in (A, B, AB)}
    d = buyer_demand(buyer, prices, TWO_EACH)
    utils = {
        k: oracles.aggregate_value_by_permutation([dict(t) for t in buyer.agents], k)
        - sum(prices[s] * c for s, c in k.items())
        for k in enumerate_feasible(TWO_EACH, (A, B, AB))
    }
    best = max(utils.values())
    assert d.utility == best
    assert set(d.bundles) == {k for k, u in utils.items() if u == best}
    s = seller_supply(EXAMPLE2, prices, TWO_EACH)
    steps = {A: [1, 2], B: [1, 2], AB: [-1, 0]}
    profits = {}
    for k in enumerate_feasible(TWO_EACH, (A, B, AB)):
        cost = oracles.incremental_cost([A, B, AB], [(AB, A), (AB, B)], steps, k)
        if cost is not None:
            profits[k] = sum(prices[t] * c for t, c in k.items()) - cost
    top = max(profits.values())
    assert s.utility == top
    assert set(s.bundles) == {k for k, u in profits.items() if u == top}


def test_additivity_checks():
    assert check_superadditive(COVER_VALUES, 3)
    assert not check_subadditive(COVER_COSTS, 3)
    additive = {s: sum(j + 1 for j in range(3) if s >> j & 1) for s in range(1, 8)}
    assert check_superadditive(additive, 3) and check_subadditive(additive, 3)


def test_cost_of_a_multiset_dominates_separate_copies():
    steps = {A: [1, 2], B: [1, 2], AB: [-1, 0]}
    for k in enumerate_feasible(TWO_EACH, (A, B, AB)):
        whole = total_cost(EXAMPLE2, k)
        parts = sum(total_cost(EXAMPLE2, {s: 1}) * c for s, c in k.items())
        assert whole >= parts
        assert whole == oracles.incremental_cost([A, B, AB], [(AB, A), (AB, B)], steps, k)


@given(small_multisets, small_multisets)
def test_additive_cost_is_modular(k1, k2):
    seller = AdditiveMarginal({s: s * 2 + 1 for s in range(1, 8)})
    both = PackageMultiset(k1) + PackageMultiset(k2)
    assert total_cost(seller, both) == total_cost(seller, k1) + total_cost(seller, k2)


@pytest.mark.parametrize("units", [(1, 1), (2, 2), (2, 1), (1, 3)])
def test_additive_adapter_reproduces_costs(units):
    supply = Supply(("A", "B"), units)
    seller = AdditiveMarginal({A: 4, B: 6, AB: 8})
    adapted = MarketInstance(supply, additive_to_cfg(seller, supply), []).seller
    for k in enumerate_feasible(supply, (A, B, AB)):
        assert total_cost(adapted, k) == total_cost(seller, k)


def test_schedules_truncate_to_supply():
    inst = MarketInstance(Supply(("A", "B"), (2, 1)), EXAMPLE2, [])
    assert inst.seller.schedule.table == {A: (1, 2), B: (1,), AB: (-1,)}


def test_example_document_costs():
    seller = catalog.load("two_goods").seller
    assert total_cost(seller, {AB: 2}) == 5
