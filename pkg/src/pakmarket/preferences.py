"""Seller cost models and buyer valuations.

Sellers
    :class:`IncrementalCfg`   incremental cost steps on a cost function graph
    :class:`AdditiveMarginal` fixed cost per package copy
    :class:`SetUnion`         cost of the union of disjoint packages
    :class:`RevenueMax`       maximises sales revenue plus the value of what is kept

Buyers hold one or more unit-demand agents; a buyer's value for a multiset
of packages is the best assignment of package copies to its agents.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cfg import CostFunctionGraph, forward_totals
from .errors import DomainError, InfeasiblePartitionError, ValidationError
from .market import PackageMultiset, Supply, enumerate_feasible, package_label, package_members
from .setfunctions import SetFunction, subadditivity_failures, superadditivity_failures

EXHAUSTIVE_AGENT_LIMIT = 6


def _check_int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{what} must be an integer, got {value!r}")


@dataclass(frozen=True)
class IncrementalCostSchedule:
    """Finite list of incremental cost steps per node.

    ``steps[S][r - 1]`` is the cost of the ``r``-th copy touching node ``S``.
    Steps past the end of a list are infeasible.  Lists must be
    nondecreasing.
    """

    steps: tuple[tuple[int, tuple[int, ...]], ...]

    def __init__(self, steps: Mapping[int, Iterable[int]], names: tuple[str, ...] | None = None):
        normal = []
        for mask in sorted(steps):
            seq = tuple(steps[mask])
            for r, value in enumerate(seq, start=1):
                _check_int(value, f"incremental cost of package {mask} step {r}")
            for r in range(1, len(seq)):
                if seq[r] < seq[r - 1]:
                    label = package_label(mask, names) if names else str(mask)
                    raise ValidationError(
                        f"increasing incremental cost violated at ({label}, r={r + 1})",
                        clause="increasing-incremental-cost",
                    )
            normal.append((mask, seq))
        object.__setattr__(self, "steps", tuple(normal))

    @property
    def table(self) -> dict[int, tuple[int, ...]]:
        return dict(self.steps)

    def finite_steps(self, node: int) -> tuple[int, ...]:
        return self.table.get(node, ())

    def step(self, node: int, r: int) -> int | None:
        """Cost of step ``r`` (1-based), or ``None`` when infeasible."""
        seq = self.finite_steps(node)
        return seq[r - 1] if 1 <= r <= len(seq) else None

    @property
    def max_steps(self) -> int:
        return max((len(seq) for _, seq in self.steps), default=0)

    def truncated(self, caps: Mapping[int, int]) -> IncrementalCostSchedule:
        return IncrementalCostSchedule({m: seq[: caps.get(m, len(seq))] for m, seq in self.steps})


@dataclass(frozen=True)
class IncrementalCfg:
    graph: CostFunctionGraph
    schedule: IncrementalCostSchedule

    def __post_init__(self):
        for mask, _ in self.schedule.steps:
            if mask not in self.graph:
                raise ValidationError(f"cost steps given for package {mask} outside the graph", clause="schedule-nodes")


@dataclass(frozen=True)
class AdditiveMarginal:
    """Each package copy costs ``costs[S]`` regardless of the rest."""

    costs: tuple[tuple[int, int], ...]

    def __init__(self, costs: Mapping[int, int]):
        for mask, value in costs.items():
            _check_int(value, f"cost of package {mask}")
            if value < 0:
                raise ValidationError(f"cost of package {mask} is negative", clause="nonnegative-cost")
        object.__setattr__(self, "costs", tuple(sorted(costs.items())))

    @property
    def table(self) -> dict[int, int]:
        return dict(self.costs)


@dataclass(frozen=True)
class SetUnion:
    """Cost ``c(union of packages)`` for a family of disjoint packages."""

    costs: SetFunction


@dataclass(frozen=True)
class RevenueMax:
    """Seller who keeps unsold items at ``values`` of their union."""

    values: SetFunction


SellerModel = Union[IncrementalCfg, AdditiveMarginal, SetUnion, RevenueMax]


@dataclass(frozen=True)
class BuyerValuation:
    """A buyer made of unit-demand agents, each with a value per package.

    Packages missing from an agent's table are worth zero to that agent.
    """

    agents: tuple[tuple[tuple[int, int], ...], ...]
    name: str = ""

    def __init__(self, agents: Iterable[Mapping[int, int]], name: str = ""):
        normal = []
        for q, table in enumerate(agents):
            for mask, value in table.items():
                _check_int(value, f"value of agent {q} for package {mask}")
                if mask <= 0:
                    raise DomainError("agents value nonempty packages only")
            normal.append(tuple(sorted(table.items())))
        if not normal:
            raise DomainError("a buyer needs at least one agent")
        object.__setattr__(self, "agents", tuple(normal))
        object.__setattr__(self, "name", name)

    @classmethod
    def unit(cls, values: Mapping[int, int], name: str = "") -> BuyerValuation:
        return cls([values], name)

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    def agent_values(self, q: int) -> dict[int, int]:
        return dict(self.agents[q])

    def value(self, q: int, package: int) -> int:
        return self.agent_values(q).get(package, 0)


@dataclass(frozen=True)
class Matching:
    value: int
    assignment: tuple[int | None, ...]


def _match_exhaustive(agent_tables, k: PackageMultiset) -> Matching:
    order = list(k)

    @lru_cache(maxsize=None)
    def best(i, remaining):
        if i == len(agent_tables):
            return 0, ()
        skip_value, skip_plan = best(i + 1, remaining)
        result = (skip_value, (None,) + skip_plan)
        for idx, mask in enumerate(order):
            if remaining[idx] and mask in agent_tables[i]:
                rest = remaining[:idx] + (remaining[idx] - 1,) + remaining[idx + 1:]
                sub_value, sub_plan = best(i + 1, rest)
                total = agent_tables[i][mask] + sub_value
                if total > result[0]:
                    result = (total, (mask,) + sub_plan)
        return result

    value, plan = best(0, tuple(k[m] for m in order))
    return Matching(value, plan)


def _match_hungarian(agent_tables, k: PackageMultiset) -> Matching:
    copies = k.copies()
    if not copies or not agent_tables:
        return Matching(0, tuple(None for _ in agent_tables))
    weights = np.array([[max(t.get(m, 0), 0) for m in copies] for t in agent_tables], dtype=float)
    rows, cols = linear_sum_assignment(weights, maximize=True)
    plan: list[int | None] = [None] * len(agent_tables)
    value = 0
    for r, c in zip(rows, cols):
        gain = agent_tables[r].get(copies[c], 0)
        if gain > 0:
            plan[r] = copies[c]
            value += gain
    return Matching(value, tuple(plan))


def max_weight_matching(agent_tables, k: PackageMultiset, method: str = "auto") -> Matching:
    """Best assignment of the copies in ``k`` to agents, each agent taking at most one.

    ``method`` is ``"exhaustive"``, ``"hungarian"`` or ``"auto"`` (exhaustive
    for at most six agents).
    """
    tables = tuple(dict(t) if not isinstance(t, dict) else t for t in agent_tables)
    if method == "auto":
        method = "exhaustive" if len(tables) <= EXHAUSTIVE_AGENT_LIMIT else "hungarian"
    if method == "exhaustive":
        return _match_exhaustive(tables, k)
    if method == "hungarian":
        if any(v < 0 for t in tables for v in t.values()):
            raise DomainError("hungarian matching assumes nonnegative values")
        return _match_hungarian(tables, k)
    raise DomainError(f"unknown matching method {method!r}")


def aggregate_value(buyer: BuyerValuation, k: Mapping[int, int], method: str = "auto") -> Matching:
    """Value of the multiset ``k`` to ``buyer`` with the agent each copy goes to."""
    if not isinstance(k, PackageMultiset):
        k = PackageMultiset(k)
    return max_weight_matching([buyer.agent_values(q) for q in range(buyer.num_agents)], k, method)


def total_cost(seller: SellerModel, k: Mapping[int, int]) -> int:
    """Seller cost of producing ``k``.

    Raises :class:`InfeasiblePartitionError` when an incremental step runs out
    and :class:`DomainError` for models without a cost function.
    """
    if isinstance(seller, IncrementalCfg):
        totals = forward_totals(seller.graph, k)
        cost = 0
        for node, r_max in totals.items():
            seq = seller.schedule.finite_steps(node)
            if r_max > len(seq):
                raise InfeasiblePartitionError(f"node {node} needs step {r_max} but only {len(seq)} exist")
            cost += sum(seq[:r_max])
        return cost
    if isinstance(seller, AdditiveMarginal):
        table = seller.table
        cost = 0
        for mask, count in k.items():
            if count and mask not in table:
                raise DomainError(f"no cost given for package {mask}")
            cost += table.get(mask, 0) * count
        return cost
    if isinstance(seller, SetUnion):
        ms = k if isinstance(k, PackageMultiset) else PackageMultiset(k)
        if not ms.is_disjoint_family():
            raise DomainError("set-union costs need pairwise disjoint packages")
        return seller.costs[ms.union()]
    if isinstance(seller, RevenueMax):
        raise DomainError("a revenue-maximising seller has no cost function; use seller_objective")
    raise DomainError(f"unknown seller model {type(seller).__name__}")


def seller_objective(seller: SellerModel, prices: Mapping[int, object], k: Mapping[int, int]):
    """What the seller maximises when selling ``k`` at ``prices``."""
    revenue = sum(prices[m] * c for m, c in k.items())
    if isinstance(seller, RevenueMax):
        ms = k if isinstance(k, PackageMultiset) else PackageMultiset(k)
        if not ms.is_disjoint_family():
            raise DomainError("a revenue-maximising seller sells disjoint packages")
        return revenue + seller.values[seller.values.full & ~ms.union()]
    return revenue - total_cost(seller, k)


@dataclass(frozen=True)
class Demand:
    """Optimal multisets and the optimal utility."""

    bundles: tuple[PackageMultiset, ...]
    utility: object


def _price_packages(prices: Mapping[int, object], packages):
    if packages is None:
        return sorted(prices)
    missing = [m for m in packages if m not in prices]
    if missing:
        raise DomainError(f"no price for packages {missing}")
    return sorted(packages)


def buyer_demand(buyer: BuyerValuation, prices: Mapping[int, object], supply: Supply, packages=None) -> Demand:
    """All utility-maximising feasible multisets for ``buyer``.

    ``packages`` defaults to the packages that carry a price.
    """
    pkgs = _price_packages(prices, packages)
    best = None
    argmax: list[PackageMultiset] = []
    for k in enumerate_feasible(supply, pkgs):
        u = aggregate_value(buyer, k).value - sum(prices[m] * c for m, c in k.items())
        if best is None or u > best:
            best, argmax = u, [k]
        elif u == best:
            argmax.append(k)
    return Demand(tuple(argmax), best)


def seller_supply(seller: SellerModel, prices: Mapping[int, object], supply: Supply, packages=None) -> Demand:
    """All objective-maximising feasible multisets for the seller."""
    pkgs = _price_packages(prices, packages)
    best = None
    argmax: list[PackageMultiset] = []
    for k in enumerate_feasible(supply, pkgs):
        try:
            u = seller_objective(seller, prices, k)
        except InfeasiblePartitionError:
            continue
        except DomainError:
            if isinstance(seller, (SetUnion, RevenueMax)):
                continue
            raise
        if best is None or u > best:
            best, argmax = u, [k]
        elif u == best:
            argmax.append(k)
    return Demand(tuple(argmax), best)


def _as_set_function(f, n):
    if isinstance(f, SetFunction):
        return f
    if n is None:
        raise DomainError("n is required for a plain mapping")
    return SetFunction.from_mapping(n, f, default=0)


def check_superadditive(f, n: int | None = None) -> bool:
    """``f(A) + f(B) <= f(A | B)`` for every disjoint pair; missing entries count as zero."""
    return not superadditivity_failures(_as_set_function(f, n))


def check_subadditive(f, n: int | None = None) -> bool:
    """``f(A) + f(B) >= f(A | B)`` for every disjoint pair; the table must be complete."""
    if not isinstance(f, SetFunction):
        f = SetFunction.from_mapping(n, f)
    return not subadditivity_failures(f)


def additive_to_cfg(seller: AdditiveMarginal, supply: Supply) -> IncrementalCfg:
    """Exact incremental-cost form of an additive seller.

    Singletons carry their own cost for every unit; a bundle carries its cost
    minus the cost of its singletons, once per copy.  Bundles point directly
    at their singletons.
    """
    from .cfg import star_graph

    table = seller.table
    for j in range(supply.n):
        if (1 << j) not in table:
            raise DomainError(f"additive costs must include the singleton of variety {supply.names[j]!r}")
    graph = star_graph(supply.n, table)
    steps = {}
    for m in graph.nodes:
        cap = min(supply.units[j] for j in package_members(m))
        if len(package_members(m)) == 1:
            steps[m] = [table[m]] * cap
        else:
            steps[m] = [table[m] - sum(table[1 << j] for j in package_members(m))] * cap
    return IncrementalCfg(graph, IncrementalCostSchedule(steps))
