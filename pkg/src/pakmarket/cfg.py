"""Cost function graphs and the characteristic map.

A cost function graph is a DAG over packages whose arcs point from a package
to one of its strict subpackages.  Seller costs of a package are charged to
the package itself and to everything it reaches, so the count of copies
"touching" node ``S`` is

    Y[S] = sum of k[T] over every T that reaches S (T = S included).

:func:`characteristic` inverts that map, recovering the multiset ``k`` from
aggregate totals ``Y``.
"""
from __future__ import annotations

import heapq
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import DomainError, InconsistentTotalsError, ValidationError
from .market import PackageMultiset, all_packages, is_subpackage, package_members, package_size


@dataclass(frozen=True)
class Reachability:
    """Neighbourhoods of one node.

    ``successors`` and ``predecessors`` include the node itself; the
    ``strict_`` variants exclude it; ``direct_`` holds one-arc neighbours.
    """

    successors: frozenset
    strict_successors: frozenset
    predecessors: frozenset
    strict_predecessors: frozenset
    direct_successors: frozenset
    direct_predecessors: frozenset


@dataclass(frozen=True)
class Violation:
    clause: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=True)
class CostFunctionGraph:
    """Packages as nodes, arcs ``(superpackage, subpackage)``.

    Construct through :func:`make_cfg` to get validation and a minimal arc
    set; the bare constructor accepts anything so that :func:`validate_cfg`
    can report on broken graphs.
    """

    n: int
    nodes: tuple[int, ...]
    arcs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(set(self.nodes))))
        object.__setattr__(self, "arcs", tuple(sorted(set(map(tuple, self.arcs)))))

    @cached_property
    def _node_set(self) -> frozenset:
        return frozenset(self.nodes)

    @cached_property
    def _children(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {s: [] for s in self.nodes}
        for tail, head in self.arcs:
            if tail in out and head in out:
                out[tail].append(head)
        return {s: tuple(sorted(v)) for s, v in out.items()}

    @cached_property
    def _parents(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {s: [] for s in self.nodes}
        for tail, head in self.arcs:
            if tail in out and head in out:
                out[head].append(tail)
        return {s: tuple(sorted(v)) for s, v in out.items()}

    @cached_property
    def _closure(self) -> dict[int, frozenset]:
        reach: dict[int, frozenset] = {}

        def visit(s, stack):
            if s in reach:
                return reach[s]
            if s in stack:
                raise ValidationError("graph contains a cycle", clause="acyclic")
            stack.add(s)
            acc = {s}
            for child in self._children[s]:
                acc |= visit(child, stack)
            stack.discard(s)
            reach[s] = frozenset(acc)
            return reach[s]

        for s in self.nodes:
            visit(s, set())
        return reach

    @cached_property
    def _ancestors(self) -> dict[int, frozenset]:
        anc: dict[int, set] = {s: set() for s in self.nodes}
        for s, desc in self._closure.items():
            for t in desc:
                anc[t].add(s)
        return {s: frozenset(v) for s, v in anc.items()}

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Kahn order from sources to sinks, smallest mask first among ties."""
        indegree = {s: len(self._parents[s]) for s in self.nodes}
        ready = [s for s, d in indegree.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            s = heapq.heappop(ready)
            order.append(s)
            for child in self._children[s]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    heapq.heappush(ready, child)
        if len(order) != len(self.nodes):
            raise ValidationError("graph contains a cycle", clause="acyclic")
        return tuple(order)

    def __contains__(self, node) -> bool:
        return node in self._node_set

    def successors(self, node: int) -> frozenset:
        self._require(node)
        return self._closure[node]

    def predecessors(self, node: int) -> frozenset:
        self._require(node)
        return self._ancestors[node]

    def _require(self, node):
        if node not in self._node_set:
            raise DomainError(f"package {node} is not a node of the graph")


def validate_cfg(graph: CostFunctionGraph) -> ValidationReport:
    """List every structural requirement the graph violates."""
    violations: list[Violation] = []
    notes: list[str] = []
    nodes = graph._node_set
    full = (1 << graph.n) - 1
    for s in graph.nodes:
        if s <= 0 or s & ~full:
            violations.append(Violation("node-domain", f"node {s} is not a nonempty subset of the varieties"))
    for tail, head in graph.arcs:
        if tail not in nodes or head not in nodes:
            violations.append(Violation("arc-endpoints", f"arc ({tail}, {head}) leaves the node set"))
        elif tail == head or not is_subpackage(head, tail):
            violations.append(Violation("subset-arcs", f"arc ({tail}, {head}) does not point to a strict subpackage"))
    if violations:
        return ValidationReport(tuple(violations))
    try:
        graph.topological_order
    except ValidationError:
        return ValidationReport((Violation("acyclic", "graph contains a cycle"),))
    for s in graph.nodes:
        reach = graph.successors(s)
        for j in package_members(s):
            if (1 << j) not in reach:
                violations.append(
                    Violation("singleton-reachability", f"node {s} does not reach singleton of variety {j}")
                )
    for s in graph.nodes:
        if package_size(s) == 1 and graph._children[s]:
            violations.append(Violation("singleton-sink", f"singleton {s} has outgoing arcs"))
    if graph.nodes and not _weakly_connected(graph):
        if full in nodes:
            violations.append(Violation("weakly-connected", "graph is not weakly connected"))
        else:
            notes.append("graph is not weakly connected; the grand package is not a node")
    return ValidationReport(tuple(violations), tuple(notes))


def _weakly_connected(graph: CostFunctionGraph) -> bool:
    start = graph.nodes[0]
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for t in graph._children[s] + graph._parents[s]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return len(seen) == len(graph.nodes)


def make_cfg(n: int, nodes: Iterable[int], arcs: Iterable[tuple[int, int]]) -> CostFunctionGraph:
    """Validate a graph and return it with its minimal (transitively reduced) arc set."""
    raw = CostFunctionGraph(n, tuple(nodes), tuple(arcs))
    report = validate_cfg(raw)
    if not report.ok:
        first = report.violations[0]
        detail = "; ".join(v.message for v in report.violations)
        raise ValidationError(detail, clause=first.clause)
    keep = []
    for tail, head in raw.arcs:
        redundant = any(
            mid != head and head in raw.successors(mid) for mid in raw._children[tail]
        )
        if not redundant:
            keep.append((tail, head))
    return CostFunctionGraph(n, raw.nodes, tuple(keep))


def complete_graph(n: int) -> CostFunctionGraph:
    """Every nonempty package, each linked to the packages one variety smaller."""
    arcs = []
    for s in all_packages(n):
        if package_size(s) > 1:
            arcs.extend((s, s & ~(1 << j)) for j in package_members(s))
    return make_cfg(n, all_packages(n), arcs)


def star_graph(n: int, packages: Iterable[int]) -> CostFunctionGraph:
    """Given packages plus all singletons, each bundle linked straight to its singletons."""
    nodes = set(packages) | {1 << j for j in range(n)}
    arcs = [(s, 1 << j) for s in nodes if package_size(s) > 1 for j in package_members(s)]
    return make_cfg(n, nodes, arcs)


def reachability(graph: CostFunctionGraph, node: int) -> Reachability:
    succ = graph.successors(node)
    pred = graph.predecessors(node)
    return Reachability(
        successors=succ,
        strict_successors=succ - {node},
        predecessors=pred,
        strict_predecessors=pred - {node},
        direct_successors=frozenset(graph._children[node]),
        direct_predecessors=frozenset(graph._parents[node]),
    )


def forward_totals(graph: CostFunctionGraph, k: Mapping[int, int]) -> dict[int, int]:
    """Aggregate totals ``Y`` induced by the multiset ``k``."""
    for s in k:
        if k[s] and s not in graph:
            raise DomainError(f"package {s} is not a node of the graph")
    return {s: sum(k.get(t, 0) for t in graph.predecessors(s)) for s in graph.nodes}


def _admissible(graph: CostFunctionGraph, order: Sequence[int]) -> None:
    if sorted(order) != list(graph.nodes):
        raise DomainError("order must list every node exactly once")
    pos = {s: i for i, s in enumerate(order)}
    for tail, head in graph.arcs:
        if pos[tail] > pos[head]:
            raise DomainError(f"order visits {head} before its predecessor {tail}")


def characteristic_counts(graph, totals, order=None) -> dict:
    """Inverse of :func:`forward_totals` without the sign check.

    Values may be negative when ``totals`` is inconsistent.  ``order`` may be
    any topological order; the default is the canonical one.
    """
    if order is None:
        order = graph.topological_order
    else:
        _admissible(graph, order)
    for s in totals:
        if s not in graph:
            raise DomainError(f"package {s} is not a node of the graph")
    k = {}
    for s in order:
        k[s] = totals.get(s, 0) - sum(k[t] for t in graph.predecessors(s) if t != s)
    return k


def characteristic(graph, totals, order=None) -> PackageMultiset:
    """Multiset ``k`` whose aggregate totals equal ``totals``.

    Raises :class:`InconsistentTotalsError` naming the first node (in visiting
    order) with a negative count.
    """
    if order is None:
        order = graph.topological_order
    k = characteristic_counts(graph, totals, order)
    for s in order:
        value = k[s]
        if value < 0:
            raise InconsistentTotalsError(s, value)
        if value != int(value):
            raise DomainError("totals must be integers to yield a multiset")
    return PackageMultiset({s: int(v) for s, v in k.items()})


@dataclass(frozen=True)
class CharacteristicMatrix:
    """Integer matrix mapping totals to counts, rows and columns in ``nodes`` order."""

    nodes: tuple[int, ...]
    matrix: np.ndarray

    def entry(self, row_node: int, col_node: int) -> int:
        return int(self.matrix[self.nodes.index(row_node), self.nodes.index(col_node)])

    def apply(self, totals: Mapping[int, int]) -> dict[int, int]:
        y = [totals.get(s, 0) for s in self.nodes]
        return {s: sum(int(self.matrix[i, j]) * y[j] for j in range(len(y)) if self.matrix[i, j])
                for i, s in enumerate(self.nodes)}

    def dual(self, prices: Mapping[int, object]) -> dict[int, object]:
        """Transpose applied to package prices, exact for ints and Fractions."""
        p = [prices.get(s, 0) for s in self.nodes]
        out = {}
        for j, s in enumerate(self.nodes):
            out[s] = sum(int(self.matrix[i, j]) * p[i] for i in range(len(p)) if self.matrix[i, j])
        return out


def characteristic_matrix(graph: CostFunctionGraph) -> CharacteristicMatrix:
    nodes = graph.nodes
    mat = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
    for j, s in enumerate(nodes):
        column = characteristic_counts(graph, {s: 1})
        for i, t in enumerate(nodes):
            mat[i, j] = column[t]
    return CharacteristicMatrix(nodes, mat)


def dual_prices(graph: CostFunctionGraph, prices: Mapping[int, object]) -> dict[int, object]:
    """Net price per node: the characteristic matrix transposed times ``prices``."""
    return characteristic_matrix(graph).dual(prices)


def complete_characteristic(n: int, totals: Mapping[int, int]) -> dict[int, int]:
    """Closed-form characteristic counts for :func:`complete_graph`.

    Alternating sum over superpackages: ``k[S] = sum (-1)^(|T|-|S|) Y[T]`` for ``T >= S``.
    """
    full = (1 << n) - 1
    out = {}
    for s in all_packages(n):
        rest = package_members(full & ~s)
        total = 0
        for t in range(len(rest) + 1):
            for extra in combinations(rest, t):
                sup = s
                for j in extra:
                    sup |= 1 << j
                total += (-1) ** t * totals.get(sup, 0)
        out[s] = total
    return out


def complete_dual(n: int, prices: Mapping[int, object]) -> dict[int, object]:
    """Closed-form net prices for :func:`complete_graph`.

    Alternating sum over nonempty subpackages: ``sum (-1)^(|S|-|T|) p[T]``.
    """
    out = {}
    for s in all_packages(n):
        members = package_members(s)
        total = Fraction(0) if any(isinstance(v, Fraction) for v in prices.values()) else 0
        for t in range(len(members)):
            for dropped in combinations(members, t):
                sub = s
                for j in dropped:
                    sub &= ~(1 << j)
                total += (-1) ** t * prices.get(sub, 0)
        out[s] = total
    return out
