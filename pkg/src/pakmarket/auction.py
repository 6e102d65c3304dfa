"""Ascending package auctions with unit-demand buyers and one unit per variety.

Each round every buyer names one utility-maximising package (or nothing when
nothing beats zero surplus), the seller names a utility-maximising family of
disjoint packages, and every package demanded more often than supplied goes
up by one.  When nothing is overdemanded, packages the seller offered but
nobody wanted ("squeezed out") either stay with the seller, when their price
never moved, or go to the last buyer who asked for them.

:func:`run_extended_auction` adds an auctioneer with its own costs and two
dummy bidders per package that stand in for the seller's reservation values.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import AuctionFailure, DomainError
from .instance import MarketInstance
from .market import PackageMultiset, Supply, enumerate_feasible, package_size
from .preferences import (
    AdditiveMarginal,
    BuyerValuation,
    RevenueMax,
    SetUnion,
    check_subadditive,
    check_superadditive,
    seller_objective,
)
from .setfunctions import SetFunction, is_superadditive, set_function_dual
from .welfare import EquilibriumCertificate, EquilibriumCheck, certificate_from_prices, verify_equilibrium


class PreconditionWarning(UserWarning):
    """Auction inputs fall outside the conditions that guarantee an equilibrium."""


def revenue_to_cost(values: SetFunction) -> SetUnion:
    """Cost-based seller equivalent to a revenue maximiser with reservation ``values``."""
    return SetUnion(set_function_dual(values))


@dataclass(frozen=True)
class AuctionRound:
    t: int
    prices: dict
    supply: PackageMultiset
    demands: tuple
    overdemanded: tuple


@dataclass(frozen=True)
class SqueezedOut:
    """What happened to one squeezed-out package.

    ``outcome`` is ``"kept"`` (stays with the seller), ``"assigned"`` (to a
    buyer holding nothing) or ``"merged"`` (joined to the buyer's package).
    """

    package: int
    outcome: str
    buyer: int | None = None
    merged_with: int | None = None
    price_identity: bool | None = None


@dataclass(frozen=True)
class AuctionResult:
    instance: MarketInstance
    rounds: tuple[AuctionRound, ...]
    prices: dict
    allocation: tuple[PackageMultiset, ...]
    squeezed: tuple[SqueezedOut, ...]
    certificate: EquilibriumCertificate
    verification: EquilibriumCheck | None
    warnings: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)

    def trace_events(self) -> list[dict]:
        """Structured trace: one event per round, one per squeezed-out package, then the end."""
        names = self.instance.supply.names
        label = self.instance.supply.label
        events = []
        for rnd in self.rounds:
            events.append({
                "event": "round",
                "t": rnd.t,
                "prices": {label(s): rnd.prices[s] for s in sorted(rnd.prices)},
                "supply": [label(s) for s in rnd.supply.copies()],
                "demands": {self.instance.buyer_name(l): (label(d) if d else None) for l, d in enumerate(rnd.demands)},
                "overdemanded": [label(s) for s in rnd.overdemanded],
            })
        for sq in self.squeezed:
            events.append({
                "event": "squeezed_out",
                "package": label(sq.package),
                "outcome": sq.outcome,
                "buyer": None if sq.buyer is None else self.instance.buyer_name(sq.buyer),
                "merged_with": None if sq.merged_with is None else label(sq.merged_with),
            })
        events.append({
            "event": "end",
            "allocation": {self.instance.buyer_name(l): k.label(names) for l, k in enumerate(self.allocation)},
        })
        return events

    @property
    def price_path(self) -> list[tuple]:
        packages = self.instance.packages
        return [tuple(r.prices[s] for s in packages) for r in self.rounds]


def _require_auction_shape(instance: MarketInstance) -> None:
    if any(u != 1 for u in instance.supply.units):
        raise DomainError("the ascending auction needs exactly one unit of every variety")
    if any(b.num_agents != 1 for b in instance.buyers):
        raise DomainError("the ascending auction needs single-agent (unit-demand) buyers")


def _precondition_warnings(instance: MarketInstance, costs) -> list[str]:
    notes = []
    n = instance.n
    for l, buyer in enumerate(instance.buyers):
        if not check_superadditive(buyer.agent_values(0), n):
            notes.append(f"values of buyer {instance.buyer_name(l)} are not superadditive")
    if costs is not None:
        table = costs.as_dict() if isinstance(costs, SetFunction) else costs
        if len(table) == (1 << n) - 1 and not check_subadditive(table, n):
            notes.append("seller costs are not subadditive")
    if isinstance(instance.seller, RevenueMax) and not is_superadditive(instance.seller.values):
        notes.append("seller reservation values are not superadditive")
    for note in notes:
        warnings.warn(note, PreconditionWarning, stacklevel=3)
    return notes


def _supply_key(k: PackageMultiset, supply: Supply):
    return (-sum(package_size(s) * c for s, c in k.items()), k.total, k.copies())


def _best_supply(objective, candidates, prices, supply):
    best_value, best = None, []
    for k in candidates:
        value = objective(prices, k)
        if best_value is None or value > best_value:
            best_value, best = value, [k]
        elif value == best_value:
            best.append(k)
    return min(best, key=lambda k: _supply_key(k, supply))


def _straightforward(values: dict, prices: dict, packages) -> int | None:
    best, choice = 0, None
    for s in packages:
        u = values.get(s, 0) - prices[s]
        if u > best:
            best, choice = u, s
    return choice


def _core(
    instance,
    values,
    objective,
    start,
    reserve,
    first_t=0,
    scripted=None,
    preferred=frozenset(),
):
    packages = instance.packages
    candidates = [
        k for k in enumerate_feasible(instance.supply, packages)
        if _objective_defined(objective, start, k)
    ]
    top = {s: max([v.get(s, 0) for v in values] + [start[s]]) for s in packages}
    guard = sum(top[s] - start[s] for s in packages) + 2
    prices = dict(start)
    rounds = []
    t = first_t
    while True:
        if len(rounds) > guard:
            raise AuctionFailure(f"no termination within {guard} rounds")
        demands = []
        for l, v in enumerate(values):
            if scripted is not None and l in scripted:
                demands.append(scripted[l](t))
            else:
                demands.append(_straightforward(v, prices, packages))
        offer = _best_supply(objective, candidates, prices, instance.supply)
        counts = {}
        for d in demands:
            if d is not None:
                counts[d] = counts.get(d, 0) + 1
        over = tuple(sorted(s for s, c in counts.items() if c > offer[s]))
        rounds.append(AuctionRound(t, dict(prices), offer, tuple(demands), over))
        if not over:
            break
        for s in over:
            prices[s] += 1
        t += 1

    final = rounds[-1]
    holding: list[int | None] = list(final.demands)
    squeezed = []
    demanded = set(d for d in final.demands if d is not None)
    for s in final.supply.copies():
        if s in demanded:
            continue
        if prices[s] == reserve[s]:
            squeezed.append(SqueezedOut(s, "kept"))
            continue
        last_t, winner = None, None
        for rnd in rounds[:-1]:
            for l, d in enumerate(rnd.demands):
                if d != s:
                    continue
                better = (
                    last_t is None
                    or rnd.t > last_t
                    or (rnd.t == last_t and (l in preferred) > (winner in preferred))
                    or (rnd.t == last_t and (l in preferred) == (winner in preferred) and l < winner)
                )
                if better:
                    last_t, winner = rnd.t, l
        if winner is None:
            squeezed.append(SqueezedOut(s, "kept"))
            continue
        own = holding[winner]
        if own is None:
            holding[winner] = s
            squeezed.append(SqueezedOut(s, "assigned", winner))
        else:
            merged = own | s
            identity = merged in prices and prices[merged] == prices[own] + prices[s]
            holding[winner] = merged
            squeezed.append(SqueezedOut(s, "merged", winner, own, identity))
    allocation = tuple(PackageMultiset.of(h) if h is not None else PackageMultiset() for h in holding)
    return rounds, prices, allocation, tuple(squeezed)


def _objective_defined(objective, prices, k):
    try:
        objective(prices, k)
    except (DomainError, ValueError):
        return False
    return True


def run_ascending_auction(instance: MarketInstance, verify: bool = True) -> AuctionResult:
    """Run the ascending auction from the seller's reservation prices.

    Starting prices are the seller's package costs (additive or set-union
    seller) or reservation values (revenue-maximising seller).  Among the
    seller's optimal offers the one selling the most units is preferred, then
    the one with fewest packages, then the lexicographically smallest list of
    packages.  Buyers break ties towards the smallest package.  The final
    allocation is checked with :func:`verify_equilibrium` unless ``verify``
    is false.
    """
    _require_auction_shape(instance)
    seller = instance.seller
    packages = instance.packages
    if isinstance(seller, AdditiveMarginal):
        start = {s: seller.table[s] for s in packages}
        costs = seller.table
    elif isinstance(seller, SetUnion):
        start = {s: seller.costs[s] for s in packages}
        costs = seller.costs
    elif isinstance(seller, RevenueMax):
        start = {s: seller.values[s] for s in packages}
        costs = None
    else:
        raise DomainError("the ascending auction needs an additive, set-union or revenue seller")
    notes = _precondition_warnings(instance, costs)
    values = [b.agent_values(0) for b in instance.buyers]

    def objective(prices, k):
        return seller_objective(seller, prices, k)

    rounds, prices, allocation, squeezed = _core(instance, values, objective, start, dict(start))
    certificate = certificate_from_prices(instance, prices, allocation)
    check = verify_equilibrium(instance, prices, allocation) if verify else None
    return AuctionResult(instance, tuple(rounds), prices, allocation, squeezed, certificate, check, tuple(notes))


def dummy_buyers(values: SetFunction, packages) -> list[BuyerValuation]:
    """Two bidders per package ``S`` valuing any superpackage of ``S`` at ``values[S]``."""
    out = []
    for s in packages:
        table = {b: values[s] for b in packages if b & s == s}
        out.append(BuyerValuation.unit(table, f"dummy:{s}:1"))
        out.append(BuyerValuation.unit(table, f"dummy:{s}:2"))
    return out


def run_extended_auction(instance: MarketInstance, auctioneer_costs: AdditiveMarginal | None = None,
                         verify: bool = True) -> AuctionResult:
    """Auction run by an auctioneer with its own costs on behalf of a revenue-maximising seller.

    The seller's reservation values enter through dummy bidders.  Prices
    start one below the reservation values; the dummies demand their own
    package in that opening round only, which lifts every price to the
    reservation value.  Squeezed-out packages whose last demand came from a
    dummy go back to the dummy.  The result's ``instance`` is the market with
    the dummies and the auctioneer as seller; ``extras`` reports the outcome
    from the original seller's point of view.
    """
    if not isinstance(instance.seller, RevenueMax):
        raise DomainError("the extended auction needs a revenue-maximising seller")
    _require_auction_shape(instance)
    costs = auctioneer_costs or instance.auctioneer_costs
    packages = instance.packages
    if costs is None:
        costs = AdditiveMarginal({s: 0 for s in packages})
    v0 = instance.seller.values
    dummies = dummy_buyers(v0, packages)
    regular = len(instance.buyers)
    augmented = MarketInstance(instance.supply, costs, tuple(instance.buyers) + tuple(dummies), packages)
    notes = _precondition_warnings(instance, costs.table)
    values = [b.agent_values(0) for b in augmented.buyers]
    scripted = {}
    for i, s in enumerate(packages):
        for copy in (0, 1):
            scripted[regular + 2 * i + copy] = (lambda t, s=s: s if t < 0 else None)
    start = {s: v0[s] - 1 for s in packages}
    reserve = dict(costs.table)

    def objective(prices, k):
        return seller_objective(costs, prices, k)

    rounds, prices, allocation, squeezed = _core(
        augmented, values, objective, start, reserve, first_t=-1, scripted=scripted,
        preferred=frozenset(range(regular, len(values))),
    )
    certificate = certificate_from_prices(augmented, prices, allocation)
    check = verify_equilibrium(augmented, prices, allocation) if verify else None
    kept = v0.full
    for k in allocation[:regular]:
        kept &= ~k.union()
    regular_value = sum(b.value(0, s) for b, k in zip(instance.buyers, allocation[:regular]) for s in k)
    extras = {
        "regular_allocation": allocation[:regular],
        "seller_keeps": kept,
        "seller_view_welfare": regular_value + v0[kept],
    }
    return AuctionResult(augmented, tuple(rounds), prices, allocation, squeezed, certificate, check,
                         tuple(notes), extras)


def seller_view_optimum(instance: MarketInstance) -> int:
    """Best total of buyer values plus the seller's value for what it keeps, by enumeration."""
    from .welfare import efficient_allocation

    if not isinstance(instance.seller, RevenueMax):
        raise DomainError("needs a revenue-maximising seller")
    return efficient_allocation(instance).welfare


def format_trace(result: AuctionResult) -> str:
    """Plain-text table with one line per round."""
    inst = result.instance
    label = inst.supply.label
    names = inst.supply.names
    header = ["t", "prices (" + ",".join(label(s) for s in inst.packages) + ")", "supply", "demands", "overdemanded"]
    lines = [" | ".join(header)]
    for rnd in result.rounds:
        prices = "(" + ",".join(str(rnd.prices[s]) for s in inst.packages) + ")"
        demands = " ".join(label(d) if d else "-" for d in rnd.demands)
        over = ",".join(label(s) for s in rnd.overdemanded) or "-"
        lines.append(" | ".join([str(rnd.t), prices, rnd.supply.label(names), demands, over]))
    for sq in result.squeezed:
        who = "seller" if sq.buyer is None else inst.buyer_name(sq.buyer)
        lines.append(f"squeezed out {label(sq.package)} -> {who} ({sq.outcome})")
    return "\n".join(lines)
