"""Welfare maximisation, Walrasian equilibrium certificates and their checks.

The welfare program assigns package copies to unit-demand agents (``x``
variables, one per agent and valued package) and buys incremental cost steps
(``y`` variables, one per finite step of each graph node).  The number of
copies of package ``S`` that may be handed out is bounded by the
characteristic count of the step totals.  Its LP relaxation is integral
exactly when a Walrasian equilibrium exists, and the duals of the
"copies of S" rows are then equilibrium prices.

Independently of the LP, :func:`verify_equilibrium` and
:func:`enumerate_equilibrium_prices` work by brute force over feasible
multisets, so the two paths can be checked against each other.
"""
from __future__ import annotations

import os
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cfg import characteristic_matrix, forward_totals
from .errors import DomainError, InfeasiblePartitionError, ResourceLimitError
from .instance import MarketInstance
from .lp import LinearProgram, LpSolution, solve_ip, solve_lp
from .market import PackageMultiset, is_feasible, unpack
from .preferences import (
    AdditiveMarginal,
    IncrementalCfg,
    RevenueMax,
    additive_to_cfg,
    aggregate_value,
    buyer_demand,
    max_weight_matching,
    seller_objective,
    seller_supply,
    total_cost,
)

DEFAULT_PRICE_SEARCH_GUARD = 5_000_000


def price_search_guard() -> int:
    raw = os.environ.get("PAKMARKET_PRICE_GUARD")
    return int(raw) if raw is not None else DEFAULT_PRICE_SEARCH_GUARD


def cfg_seller(instance: MarketInstance) -> IncrementalCfg:
    """The seller as an incremental-cost graph; additive sellers are converted exactly."""
    if isinstance(instance.seller, IncrementalCfg):
        return instance.seller
    if isinstance(instance.seller, AdditiveMarginal):
        return additive_to_cfg(instance.seller, instance.supply)
    raise DomainError("the welfare program needs an incremental-cost or additive seller")


def cfg_instance(instance: MarketInstance) -> MarketInstance:
    if isinstance(instance.seller, IncrementalCfg):
        return instance
    return MarketInstance(instance.supply, cfg_seller(instance), instance.buyers)


@dataclass(frozen=True)
class SwlpEncoding:
    """The welfare program plus the meaning of every column and row."""

    lp: LinearProgram
    x_keys: tuple[tuple[int, int, int], ...]
    y_keys: tuple[tuple[int, int], ...]
    agent_rows: tuple[tuple[int, int], ...]
    package_rows: tuple[int, ...]
    step_rows: tuple[tuple[int, int], ...]

    @property
    def num_rows(self) -> int:
        return self.lp.num_rows

    def x_column(self, package: int, buyer: int, agent: int) -> int:
        return self.x_keys.index((package, buyer, agent))

    def objective_coefficient(self, package: int, buyer: int, agent: int) -> Fraction:
        return self.lp.c[self.x_column(package, buyer, agent)]


def build_swlp(instance: MarketInstance) -> SwlpEncoding:
    """Encode the welfare program of an incremental-cost (or additive) market.

    ``x_keys`` entries are ``(package, buyer, agent)`` and ``y_keys`` entries
    are ``(node, step)``.  Rows come in three blocks: one per agent, one per
    graph node and one per cost step.
    """
    seller = cfg_seller(instance)
    graph = seller.graph
    x_keys = []
    for l, buyer in enumerate(instance.buyers):
        for q in range(buyer.num_agents):
            for pkg, _ in buyer.agents[q]:
                if pkg in graph:
                    x_keys.append((pkg, l, q))
    y_keys = [(s, r) for s in graph.nodes for r in range(1, len(seller.schedule.finite_steps(s)) + 1)]
    nx, ny = len(x_keys), len(y_keys)
    c = [instance.buyers[l].value(q, s) for s, l, q in x_keys]
    c += [-seller.schedule.step(s, r) for s, r in y_keys]

    rows, rhs = [], []
    agent_rows = [(l, q) for l, b in enumerate(instance.buyers) for q in range(b.num_agents)]
    for l, q in agent_rows:
        row = [0] * (nx + ny)
        for i, (_, l2, q2) in enumerate(x_keys):
            if (l2, q2) == (l, q):
                row[i] = 1
        rows.append(row)
        rhs.append(1)
    phi = characteristic_matrix(graph)
    node_pos = {s: i for i, s in enumerate(graph.nodes)}
    for s in graph.nodes:
        row = [0] * (nx + ny)
        for i, (pkg, _, _) in enumerate(x_keys):
            if pkg == s:
                row[i] = 1
        for j, (t, _) in enumerate(y_keys):
            coef = int(phi.matrix[node_pos[s], node_pos[t]])
            if coef:
                row[nx + j] = -coef
        rows.append(row)
        rhs.append(0)
    for j in range(ny):
        row = [0] * (nx + ny)
        row[nx + j] = 1
        rows.append(row)
        rhs.append(1)
    return SwlpEncoding(
        LinearProgram.build(c, rows, rhs),
        tuple(x_keys),
        tuple(y_keys),
        tuple(agent_rows),
        graph.nodes,
        tuple(y_keys),
    )


@dataclass(frozen=True)
class EquilibriumCertificate:
    """Prices, allocation and (when available) the matching dual values.

    ``assignment`` maps ``(buyer, agent)`` to the package that agent receives;
    ``retained`` lists the units of each variety left with the seller.
    """

    prices: dict
    allocation: tuple[PackageMultiset, ...]
    assignment: dict
    retained: tuple[int, ...]
    welfare: object
    agent_duals: dict | None = None
    step_duals: dict | None = None

    def payment(self, buyer: int):
        return sum(self.prices[s] * c for s, c in self.allocation[buyer].items())

    @property
    def sold(self) -> PackageMultiset:
        total = PackageMultiset()
        for k in self.allocation:
            total = total + k
        return total


@dataclass(frozen=True)
class WelfareResult:
    swp_value: Fraction
    swlp_value: Fraction
    integral: bool
    certificate: EquilibriumCertificate | None
    encoding: SwlpEncoding
    lp_solution: LpSolution
    ip_solution: LpSolution

    @property
    def gap(self) -> Fraction:
        return self.swlp_value - self.swp_value


def _allocation_from_x(instance, encoding, x):
    assignment = {}
    per_buyer = [dict() for _ in instance.buyers]
    for (s, l, q), value in zip(encoding.x_keys, x):
        if value == 1:
            assignment[(l, q)] = s
            per_buyer[l][s] = per_buyer[l].get(s, 0) + 1
    return tuple(PackageMultiset(d) for d in per_buyer), assignment


def _welfare_of(instance, allocation):
    values = sum(aggregate_value(b, k).value for b, k in zip(instance.buyers, allocation))
    sold = PackageMultiset()
    for k in allocation:
        sold = sold + k
    if isinstance(instance.seller, RevenueMax):
        return values + instance.seller.values[instance.seller.values.full & ~sold.union()]
    return values - total_cost(instance.seller, sold)


def solve_welfare(instance: MarketInstance) -> WelfareResult:
    """Solve the welfare program and its LP relaxation exactly.

    When the two optima agree the result carries an equilibrium certificate
    built from the integer optimum and the LP duals.
    """
    enc = build_swlp(instance)
    lp_sol = solve_lp(enc.lp)
    ip_sol = solve_ip(enc.lp)
    integral = lp_sol.value == ip_sol.value
    certificate = None
    if integral:
        allocation, assignment = _allocation_from_x(instance, enc, ip_sol.x)
        na = len(enc.agent_rows)
        np_ = len(enc.package_rows)
        y = lp_sol.y
        prices = {s: y[na + i] for i, s in enumerate(enc.package_rows)}
        agent_duals = {key: y[i] for i, key in enumerate(enc.agent_rows)}
        step_duals = {key: y[na + np_ + i] for i, key in enumerate(enc.step_rows)}
        sold = PackageMultiset()
        for k in allocation:
            sold = sold + k
        used = unpack(sold, instance.n)
        certificate = EquilibriumCertificate(
            prices=prices,
            allocation=allocation,
            assignment=assignment,
            retained=tuple(u - v for u, v in zip(instance.supply.units, used)),
            welfare=ip_sol.value,
            agent_duals=agent_duals,
            step_duals=step_duals,
        )
    return WelfareResult(ip_sol.value, lp_sol.value, integral, certificate, enc, lp_sol, ip_sol)


@dataclass(frozen=True)
class EquilibriumViolation:
    agent: str
    utility_gap: object
    better: PackageMultiset | None
    message: str


@dataclass(frozen=True)
class EquilibriumCheck:
    ok: bool
    violations: tuple[EquilibriumViolation, ...]
    welfare: object = None
    efficient_welfare: object = None

    def __bool__(self) -> bool:
        return self.ok


def _normalise_allocation(instance, allocation) -> tuple[PackageMultiset, ...]:
    if isinstance(allocation, Mapping):
        out = [PackageMultiset() for _ in instance.buyers]
        for l, k in allocation.items():
            if not 0 <= l < len(instance.buyers):
                raise DomainError(f"unknown buyer index {l}")
            out[l] = k if isinstance(k, PackageMultiset) else PackageMultiset(k)
        return tuple(out)
    out = tuple(k if isinstance(k, PackageMultiset) else PackageMultiset(k) for k in allocation)
    if len(out) != len(instance.buyers):
        raise DomainError("allocation needs one multiset per buyer")
    return out


def verify_equilibrium(instance: MarketInstance, prices: Mapping[int, object], allocation) -> EquilibriumCheck:
    """Check every buyer and the seller optimise at ``prices`` by brute force.

    ``allocation`` is a sequence of multisets (one per buyer) or a mapping
    from buyer index to multiset.  When the check passes, the allocation's
    welfare is also compared with the efficient welfare; a mismatch would
    contradict the first welfare theorem and is reported as a violation.
    """
    alloc = _normalise_allocation(instance, allocation)
    missing = [s for s in instance.packages if s not in prices]
    if missing:
        raise DomainError(f"no price for packages {missing}")
    sold = PackageMultiset()
    for k in alloc:
        for s in k:
            if s not in instance.packages:
                raise DomainError(f"package {s} is not tradable")
        sold = sold + k
    if not is_feasible(sold, instance.supply):
        raise DomainError("allocation exceeds the supply")

    violations = []
    for l, (buyer, k) in enumerate(zip(instance.buyers, alloc)):
        got = aggregate_value(buyer, k).value - sum(prices[s] * c for s, c in k.items())
        demand = buyer_demand(buyer, prices, instance.supply, instance.packages)
        if got < demand.utility:
            violations.append(
                EquilibriumViolation(
                    instance.buyer_name(l),
                    demand.utility - got,
                    demand.bundles[0],
                    f"buyer {instance.buyer_name(l)} prefers {demand.bundles[0].label(instance.supply.names)}",
                )
            )
    supply = seller_supply(instance.seller, prices, instance.supply, instance.packages)
    try:
        got = seller_objective(instance.seller, prices, sold)
    except (InfeasiblePartitionError, DomainError):
        got = None
    if got is None or got < supply.utility:
        violations.append(
            EquilibriumViolation(
                "seller",
                None if got is None else supply.utility - got,
                supply.bundles[0],
                f"seller prefers to sell {supply.bundles[0].label(instance.supply.names)}",
            )
        )
    welfare = efficient = None
    if not violations:
        welfare = _welfare_of(instance, alloc)
        efficient = efficient_allocation(instance).welfare
        if welfare != efficient:
            violations.append(
                EquilibriumViolation("market", efficient - welfare, None, "equilibrium allocation is not efficient")
            )
    return EquilibriumCheck(not violations, tuple(violations), welfare, efficient)


@dataclass(frozen=True)
class EfficientAllocation:
    welfare: int
    allocation: tuple[PackageMultiset, ...]
    assignment: dict


@lru_cache(maxsize=256)
def efficient_allocation(instance: MarketInstance) -> EfficientAllocation:
    """Welfare-maximising allocation by enumeration of feasible multisets.

    For each multiset the buyers' joint value is a maximum-weight matching of
    package copies to all agents of all buyers; the first maximiser in
    enumeration order is returned.
    """
    agents = [(l, q) for l, b in enumerate(instance.buyers) for q in range(b.num_agents)]
    tables = [instance.buyers[l].agent_values(q) for l, q in agents]
    best = None
    for k in instance.feasible_multisets():
        try:
            if isinstance(instance.seller, RevenueMax):
                if not k.is_disjoint_family():
                    continue
                base = instance.seller.values[instance.seller.values.full & ~k.union()]
            else:
                base = -total_cost(instance.seller, k)
        except InfeasiblePartitionError:
            continue
        match = max_weight_matching(tables, k)
        total = match.value + base
        if best is None or total > best[0]:
            best = (total, match.assignment)
    welfare, plan = best
    per_buyer = [dict() for _ in instance.buyers]
    assignment = {}
    for (l, q), s in zip(agents, plan):
        if s is not None:
            assignment[(l, q)] = s
            per_buyer[l][s] = per_buyer[l].get(s, 0) + 1
    return EfficientAllocation(welfare, tuple(PackageMultiset(d) for d in per_buyer), assignment)


def indirect_utility(instance: MarketInstance, prices: Mapping[int, object], buyer: int):
    return buyer_demand(instance.buyers[buyer], prices, instance.supply, instance.packages).utility


def complete_duals(instance: MarketInstance, prices: Mapping[int, object]) -> tuple[dict, dict]:
    """Cheapest agent and step duals compatible with ``prices``.

    Each agent's dual is its best surplus (at least zero) and each step's
    dual is its net price minus its cost (at least zero).
    """
    seller = cfg_seller(instance)
    graph = seller.graph
    agent_duals = {}
    for l, buyer in enumerate(instance.buyers):
        for q in range(buyer.num_agents):
            surplus = [v - prices[s] for s, v in buyer.agents[q] if s in graph]
            agent_duals[(l, q)] = max([0] + surplus)
    psi = characteristic_matrix(graph).dual(prices)
    step_duals = {}
    for s in graph.nodes:
        for r, cost in enumerate(seller.schedule.finite_steps(s), start=1):
            step_duals[(s, r)] = max(0, psi[s] - cost)
    return agent_duals, step_duals


def certificate_from_prices(instance: MarketInstance, prices: Mapping[int, object], allocation) -> EquilibriumCertificate:
    """Wrap an allocation and prices into a certificate with completed duals."""
    alloc = _normalise_allocation(instance, allocation)
    assignment = {}
    for l, (buyer, k) in enumerate(zip(instance.buyers, alloc)):
        match = aggregate_value(buyer, k)
        for q, s in enumerate(match.assignment):
            if s is not None:
                assignment[(l, q)] = s
    sold = PackageMultiset()
    for k in alloc:
        sold = sold + k
    used = unpack(sold, instance.n)
    agent_duals = step_duals = None
    if isinstance(instance.seller, (IncrementalCfg, AdditiveMarginal)):
        agent_duals, step_duals = complete_duals(instance, prices)
    return EquilibriumCertificate(
        prices=dict(prices),
        allocation=alloc,
        assignment=assignment,
        retained=tuple(u - v for u, v in zip(instance.supply.units, used)),
        welfare=_welfare_of(instance, alloc),
        agent_duals=agent_duals,
        step_duals=step_duals,
    )


@dataclass(frozen=True)
class CheckItem:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class DecompositionReport:
    items: tuple[CheckItem, ...]

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.ok]

    def __bool__(self) -> bool:
        return self.ok


def check_pricing_decomposition(instance: MarketInstance, certificate: EquilibriumCertificate) -> DecompositionReport:
    """Check the structure that optimal duals must have around an integral optimum.

    Covers dual feasibility, strong duality, complementary slackness, the
    per-agent and per-step consequences of optimality, the decomposition of
    each package price into cost-plus-surplus steps along everything the
    package reaches, and the matching identity for net prices.  Missing duals
    are completed from the prices.
    """
    seller = cfg_seller(instance)
    graph = seller.graph
    sched = seller.schedule
    p = {s: Fraction(certificate.prices[s]) for s in graph.nodes}
    if certificate.agent_duals is None or certificate.step_duals is None:
        b, d = complete_duals(instance, p)
    else:
        b, d = certificate.agent_duals, certificate.step_duals
    b = {k: Fraction(v) for k, v in b.items()}
    d = {k: Fraction(v) for k, v in d.items()}
    psi = characteristic_matrix(graph).dual(p)

    x = {}
    for l, buyer in enumerate(instance.buyers):
        for q in range(buyer.num_agents):
            for s, _ in buyer.agents[q]:
                if s in graph:
                    x[(s, l, q)] = 0
    for (l, q), s in certificate.assignment.items():
        x[(s, l, q)] = 1
    totals = forward_totals(graph, certificate.sold)
    y = {(s, r): int(r <= totals[s]) for s in graph.nodes for r in range(1, len(sched.finite_steps(s)) + 1)}
    x_by_pkg = {s: sum(v for (t, _, _), v in x.items() if t == s) for s in graph.nodes}
    x_by_agent = {}
    for (s, l, q), v in x.items():
        x_by_agent[(l, q)] = x_by_agent.get((l, q), 0) + v
    value = {(s, l, q): instance.buyers[l].value(q, s) for (s, l, q) in x}
    items: list[CheckItem] = []

    def record(name, failures):
        items.append(CheckItem(name, not failures, "; ".join(failures[:5])))

    record("nonnegative duals", [f"{k}" for k, v in list(b.items()) + list(d.items()) if v < 0]
           + [f"p({s})" for s, v in p.items() if v < 0])
    record("agent dual feasibility", [f"{key}" for key in x if b[key[1:]] + p[key[0]] < value[key]])
    record("step dual feasibility", [f"{key}" for key in y if d[key] - psi[key[0]] < -sched.step(*key)])
    for (s, r) in y:
        if totals[s] > len(sched.finite_steps(s)):
            record("step availability", [f"{s} needs step {totals[s]}"])
    primal = sum(value[k] * v for k, v in x.items()) - sum(sched.step(*k) * v for k, v in y.items())
    dual = sum(b.values()) + sum(d.values())
    record("strong duality", [] if primal == dual == Fraction(certificate.welfare) else
           [f"primal {primal}, dual {dual}, welfare {certificate.welfare}"])

    record("agent slackness", [f"{k}" for k, v in b.items() if x_by_agent.get(k, 0) < 1 and v != 0])
    record("package slackness", [f"{s}" for s in graph.nodes
                                 if sum(x_by_pkg[t] for t in graph.predecessors(s)) < totals[s] and p[s] != 0])
    record("step slackness", [f"{k}" for k, v in y.items() if v < 1 and d[k] != 0])
    record("assignment slackness", [f"{k}" for k, v in x.items() if v > 0 and b[k[1:]] != value[k] - p[k[0]]])
    record("step tightness", [f"{k}" for k, v in y.items() if v > 0 and d[k] + sched.step(*k) != psi[k[0]]])

    record("copies within totals", [f"{s}" for s in graph.nodes
                                    if sum(x_by_pkg[t] for t in graph.predecessors(s)) > totals[s]])
    record("priced packages are exhausted", [f"{s}" for s in graph.nodes if p[s] > 0
                                             and sum(x_by_pkg[t] for t in graph.predecessors(s)) != totals[s]])
    dominated = []
    full_demand = []
    for (l, q) in x_by_agent:
        options = {s: value[(s, l, q)] - p[s] for (s, l2, q2) in x if (l2, q2) == (l, q)}
        for s, surplus in options.items():
            rival = max([0] + [u for t, u in options.items() if t != s])
            if surplus < rival and x[(s, l, q)] != 0:
                dominated.append(f"{(s, l, q)}")
        if options and max(options.values()) > 0 and x_by_agent[(l, q)] != 1:
            full_demand.append(f"{(l, q)}")
    record("dominated packages unassigned", dominated)
    record("agents with positive surplus served", full_demand)
    record("cheap steps bought", [f"{k}" for k in y if sched.step(*k) < psi[k[0]] and y[k] != 1])
    record("expensive steps skipped", [f"{k}" for k in y if sched.step(*k) > psi[k[0]] and y[k] != 0])

    upper, equal = [], []
    for s in graph.nodes:
        reach = graph.successors(s)
        for r in range(1, sched.max_steps + 1):
            if any(sched.step(t, r) is None for t in reach):
                continue
            total = sum(sched.step(t, r) + d[(t, r)] for t in reach)
            if p[s] > total:
                upper.append(f"p({s}) > {total} at r={r}")
            if r <= totals[s] and p[s] != total:
                equal.append(f"p({s}) != {total} at r={r}")
    record("price bounded by reached steps", upper)
    record("price equals reached steps on used steps", equal)

    identity, next_step = [], []
    for s in graph.nodes:
        strict = graph.successors(s) - {s}
        used = totals[s]
        for r in range(1, used + 1):
            if any(sched.step(t, r) is None for t in strict):
                continue
            expected = p[s] - sum(sched.step(t, r) + d[(t, r)] for t in strict)
            if psi[s] != expected:
                identity.append(f"net price of {s} at r={r}")
        if used >= 1:
            nxt = sched.step(s, used + 1)
            if nxt is not None and d[(s, used)] + sched.step(s, used) > nxt:
                next_step.append(f"{s} at r={used}")
    record("net price identity", identity)
    record("last used step below next step", next_step)
    return DecompositionReport(tuple(items))


def _linear_constraints(instance, allocation):
    """Inequalities ``a . p >= rhs`` that characterise equilibrium prices for ``allocation``."""
    packages = instance.packages
    pos = {s: i for i, s in enumerate(packages)}
    feas = instance.feasible_multisets()

    def vec(k):
        out = [0] * len(packages)
        for s, c in k.items():
            out[pos[s]] += c
        return out

    cons: dict[tuple, object] = {}

    def add(coeff, rhs):
        key = tuple(coeff)
        if key not in cons or rhs > cons[key]:
            cons[key] = rhs

    for buyer, own in zip(instance.buyers, allocation):
        own_value = aggregate_value(buyer, own).value
        own_vec = vec(own)
        for k in feas:
            kv = vec(k)
            add([a - b for a, b in zip(kv, own_vec)], aggregate_value(buyer, k).value - own_value)
    sold = PackageMultiset()
    for k in allocation:
        sold = sold + k
    sold_vec = vec(sold)
    zero = {s: 0 for s in packages}
    base_sold = seller_objective(instance.seller, zero, sold)
    for k in feas:
        try:
            base_k = seller_objective(instance.seller, zero, k)
        except (InfeasiblePartitionError, DomainError):
            continue
        add([a - b for a, b in zip(sold_vec, vec(k))], base_k - base_sold)
    return cons


def enumerate_equilibrium_prices(
    instance: MarketInstance, bound: int, allocation=None, confirm: bool = True, limit: int | None = None
) -> list[tuple[int, ...]]:
    """Integer price vectors in ``[0, bound]`` supporting an efficient allocation.

    Vectors are ordered like ``instance.packages`` and returned in
    lexicographic order.  Any efficient allocation can be used because
    equilibrium prices support every efficient allocation.  The search
    walks the price grid one package at a time and abandons a branch as soon
    as some buyer or seller inequality cannot be met by any completion.  Each
    surviving vector is re-checked with :func:`verify_equilibrium` when
    ``confirm`` is set.  With ``limit`` the search stops after that many
    vectors, which is enough to decide existence.
    """
    if bound < 0:
        raise DomainError("bound must be nonnegative")
    if allocation is None:
        allocation = efficient_allocation(instance).allocation
    allocation = _normalise_allocation(instance, allocation)
    cons = _linear_constraints(instance, allocation)
    if any(all(a == 0 for a in key) and rhs > 0 for key, rhs in cons.items()):
        return []
    keys = [key for key, rhs in cons.items() if any(key) and _min_reach(key, bound) < rhs]
    npk = len(instance.packages)
    if not keys:
        A = np.zeros((0, npk), dtype=object)
        rhs = np.zeros(0, dtype=object)
    else:
        A = np.array(keys, dtype=object)
        rhs = np.array([cons[k] for k in keys], dtype=object)
    pos_part = np.where(A > 0, A, 0) if len(keys) else A
    tail_max = [np.zeros(len(keys), dtype=object) for _ in range(npk + 1)]
    for i in range(npk - 1, -1, -1):
        tail_max[i] = tail_max[i + 1] + (pos_part[:, i] * bound if len(keys) else 0)
    guard = price_search_guard()
    visited = 0
    results: list[tuple[int, ...]] = []
    prefix = [0] * npk

    def rec(i, partial):
        nonlocal visited
        if i == npk:
            vec = tuple(prefix)
            if not confirm or verify_equilibrium(instance, dict(zip(instance.packages, vec)), allocation).ok:
                results.append(vec)
            return
        for v in range(bound + 1):
            if limit is not None and len(results) >= limit:
                return
            visited += 1
            if visited > guard:
                raise ResourceLimitError(
                    f"price search visited more than {guard} grid points; raise PAKMARKET_PRICE_GUARD"
                )
            nxt = partial + A[:, i] * v if len(keys) else partial
            if len(keys) and np.any(nxt + tail_max[i + 1] < rhs):
                continue
            prefix[i] = v
            rec(i + 1, nxt)

    rec(0, np.zeros(len(keys), dtype=object))
    return results


def _min_reach(key, bound):
    return sum(a * bound for a in key if a < 0)


def lexicographic_min_prices(instance: MarketInstance) -> dict[int, Fraction] | None:
    """Optimal dual prices minimised package by package in canonical order.

    Returns ``None`` when the welfare program is not integral, since optimal
    duals are then not equilibrium prices.
    """
    result = solve_welfare(instance)
    if not result.integral:
        return None
    enc = result.encoding
    seller = cfg_seller(instance)
    graph = seller.graph
    nb, npk, nd = len(enc.agent_rows), len(graph.nodes), len(enc.step_rows)
    width = nb + npk + nd
    agent_pos = {key: i for i, key in enumerate(enc.agent_rows)}
    node_pos = {s: nb + i for i, s in enumerate(graph.nodes)}
    phi = characteristic_matrix(graph)
    rows, rhs, rels = [], [], []
    for s, l, q in enc.x_keys:
        row = [0] * width
        row[agent_pos[(l, q)]] = -1
        row[node_pos[s]] = -1
        rows.append(row)
        rhs.append(-instance.buyers[l].value(q, s))
        rels.append("<=")
    for j, (s, r) in enumerate(enc.step_rows):
        row = [0] * width
        row[nb + npk + j] = -1
        for t in graph.nodes:
            coef = phi.entry(t, s)
            if coef:
                row[node_pos[t]] += coef
        rows.append(row)
        rhs.append(seller.schedule.step(s, r))
        rels.append("<=")
    row = [0] * width
    for i in range(nb):
        row[i] = 1
    for j in range(nd):
        row[nb + npk + j] = 1
    rows.append(row)
    rhs.append(result.swlp_value)
    rels.append("=")
    fixed = {}
    for s in graph.nodes:
        c = [0] * width
        c[node_pos[s]] = -1
        sol = solve_lp(LinearProgram.build(c, rows, rhs, rels))
        fixed[s] = -sol.value
        row = [0] * width
        row[node_pos[s]] = 1
        rows.append(row)
        rhs.append(fixed[s])
        rels.append("=")
    return fixed


def market_value(instance: MarketInstance):
    """Efficient welfare computed by enumeration."""
    return efficient_allocation(instance).welfare


def describe_allocation(instance: MarketInstance, allocation: Sequence[PackageMultiset]) -> dict[str, str]:
    return {instance.buyer_name(l): k.label(instance.supply.names) for l, k in enumerate(allocation)}


__all__ = [
    "SwlpEncoding",
    "EquilibriumCertificate",
    "WelfareResult",
    "EquilibriumCheck",
    "EquilibriumViolation",
    "EfficientAllocation",
    "DecompositionReport",
    "CheckItem",
    "build_swlp",
    "solve_welfare",
    "verify_equilibrium",
    "efficient_allocation",
    "complete_duals",
    "certificate_from_prices",
    "check_pricing_decomposition",
    "enumerate_equilibrium_prices",
    "lexicographic_min_prices",
    "indirect_utility",
    "market_value",
    "cfg_seller",
    "cfg_instance",
    "describe_allocation",
]
