"""Market instances and relabelling of identical units."""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations

from .cfg import CostFunctionGraph, make_cfg
from .errors import DomainError, InfeasiblePartitionError, ResourceLimitError, ValidationError
from .market import PackageMultiset, Supply, all_packages, enumerate_feasible, package_members
from .preferences import (
    AdditiveMarginal,
    BuyerValuation,
    IncrementalCfg,
    IncrementalCostSchedule,
    RevenueMax,
    SellerModel,
    SetUnion,
    total_cost,
)


@dataclass(frozen=True)
class MarketInstance:
    """Supply, one seller and a tuple of buyers.

    ``packages`` is the set of tradable packages.  For an incremental-cost
    seller it is the node set of the cost graph; otherwise it defaults to
    every package the seller prices.  Incremental cost lists are truncated to
    the steps the supply can reach, and nonnegative total cost is checked over
    every feasible multiset when the supply is within the enumeration guard.
    """

    supply: Supply
    seller: SellerModel
    buyers: tuple[BuyerValuation, ...]
    packages: tuple[int, ...] = field(default=())
    auctioneer_costs: AdditiveMarginal | None = None

    def __post_init__(self):
        object.__setattr__(self, "buyers", tuple(self.buyers))
        n = self.supply.n
        seller = self.seller
        if isinstance(seller, IncrementalCfg):
            if seller.graph.n != n:
                raise ValidationError("graph and supply disagree on the number of varieties", clause="graph-size")
            caps = {m: min(self.supply.units[j] for j in package_members(m)) for m in seller.graph.nodes}
            seller = IncrementalCfg(seller.graph, seller.schedule.truncated(caps))
            object.__setattr__(self, "seller", seller)
            packages = seller.graph.nodes
            if self.packages and tuple(sorted(self.packages)) != packages:
                raise ValidationError("tradable packages must equal the graph nodes", clause="graph-nodes")
        elif isinstance(seller, AdditiveMarginal):
            packages = tuple(sorted(self.packages or seller.table))
            missing = [m for m in packages if m not in seller.table]
            if missing:
                raise ValidationError(f"no cost for packages {missing}", clause="cost-table")
        elif isinstance(seller, (SetUnion, RevenueMax)):
            table = seller.costs if isinstance(seller, SetUnion) else seller.values
            if table.n != n:
                raise ValidationError("set function and supply disagree on the number of varieties", clause="table-size")
            if any(u != 1 for u in self.supply.units):
                raise ValidationError("set-union and revenue sellers need one unit per variety", clause="single-unit")
            packages = tuple(sorted(self.packages or all_packages(n)))
        else:
            raise DomainError(f"unknown seller model {type(seller).__name__}")
        for m in packages:
            if m <= 0 or m >> n:
                raise ValidationError(f"package {m} is not a nonempty subset of the varieties", clause="package-domain")
        object.__setattr__(self, "packages", tuple(packages))
        for buyer in self.buyers:
            for table in buyer.agents:
                for m, _ in table:
                    if m >> n:
                        raise ValidationError(f"buyer {buyer.name!r} values package {m} outside 2^N", clause="package-domain")
        if self.auctioneer_costs is not None and not isinstance(self.auctioneer_costs, AdditiveMarginal):
            raise DomainError("auctioneer costs must be additive")
        if isinstance(seller, IncrementalCfg):
            _check_nonnegative_cost(self)

    @property
    def n(self) -> int:
        return self.supply.n

    @property
    def graph(self) -> CostFunctionGraph | None:
        return self.seller.graph if isinstance(self.seller, IncrementalCfg) else None

    def buyer_name(self, index: int) -> str:
        return self.buyers[index].name or str(index + 1)

    def label(self, mask: int) -> str:
        return self.supply.label(mask)

    def feasible_multisets(self) -> list[PackageMultiset]:
        return list(enumerate_feasible(self.supply, self.packages))


def _check_nonnegative_cost(instance: MarketInstance) -> None:
    try:
        candidates = enumerate_feasible(instance.supply, instance.packages)
        for k in candidates:
            try:
                cost = total_cost(instance.seller, k)
            except InfeasiblePartitionError:
                continue
            if cost < 0:
                raise ValidationError(
                    f"total cost {cost} of {k.label(instance.supply.names)} is negative",
                    clause="nonnegative-cost",
                )
    except ResourceLimitError:
        pass


def relabel_identical(
    instance: MarketInstance,
    variety: str | int,
    repeated: Mapping[tuple[str, ...], Mapping] | None = None,
    repeated_arcs: Iterable[tuple[tuple[str, ...], tuple[str, ...]]] = (),
) -> MarketInstance:
    """Split a variety with ``m`` identical units into ``m`` single-unit labels.

    A package holding the variety once has ``m`` images, one per label; image
    ``i`` receives only the ``i``-th incremental step of the original, every
    other step becoming infeasible.  Buyers value every image as the original.

    Packages that hold the variety ``m`` times (``AA`` for two units) can be
    supplied through ``repeated``: keys are tuples of variety names with
    repetition, values are mappings with ``"steps"`` (incremental costs) and
    ``"values"`` (``{(buyer_index, agent_index): value}``).  Arcs touching them
    go in ``repeated_arcs`` as pairs of such tuples; plain packages may appear
    there as tuples without repetition.
    """
    if not isinstance(instance.seller, IncrementalCfg):
        raise DomainError("relabelling needs an incremental-cost seller")
    supply = instance.supply
    a = supply.index(variety) if isinstance(variety, str) else variety
    if not 0 <= a < supply.n:
        raise DomainError(f"unknown variety {variety!r}")
    m = supply.units[a]
    if m < 2:
        raise DomainError("relabelling needs at least two identical units")

    base = supply.names[a]
    others = [j for j in range(supply.n) if j != a]
    names = [supply.names[j] for j in others] + [f"{base}_{i}" for i in range(1, m + 1)]
    if len(set(names)) != len(names):
        raise DomainError("relabelled names collide with existing varieties")
    units = [supply.units[j] for j in others] + [1] * m
    new_index = {j: i for i, j in enumerate(others)}
    label_bits = [1 << (len(others) + i) for i in range(m)]

    def rest_mask(counts: Mapping[int, int]) -> int:
        mask = 0
        for j, c in counts.items():
            if j != a and c:
                if c > 1:
                    raise DomainError("only the relabelled variety may repeat inside a package")
                mask |= 1 << new_index[j]
        return mask

    def images(counts: Mapping[int, int]) -> list[int]:
        rest = rest_mask(counts)
        c = counts.get(a, 0)
        if c == 0:
            return [rest]
        out = []
        for combo in combinations(range(m), c):
            mask = rest
            for i in combo:
                mask |= label_bits[i]
            out.append(mask)
        return out

    def counts_of_mask(mask: int) -> dict[int, int]:
        return {j: 1 for j in package_members(mask)}

    def counts_of_names(names_tuple) -> dict[int, int]:
        counts: dict[int, int] = {}
        for nm in names_tuple:
            j = supply.index(nm)
            counts[j] = counts.get(j, 0) + 1
        return counts

    originals: dict[tuple, dict] = {}
    for mask, seq in instance.seller.schedule.steps:
        originals[tuple(sorted(counts_of_mask(mask).items()))] = {"steps": seq, "values": None, "mask": mask}
    for mask in instance.packages:
        key = tuple(sorted(counts_of_mask(mask).items()))
        originals.setdefault(key, {"steps": (), "values": None, "mask": mask})
    for names_tuple, spec in (repeated or {}).items():
        counts = counts_of_names(names_tuple)
        if counts.get(a, 0) != m:
            raise DomainError("repeated packages must hold every unit of the relabelled variety")
        originals[tuple(sorted(counts.items()))] = {
            "steps": tuple(spec.get("steps", ())),
            "values": dict(spec.get("values", {})),
            "mask": None,
        }

    image_map: dict[tuple, list[int]] = {key: images(dict(key)) for key in originals}
    steps: dict[int, list[int]] = {}
    for key, info in originals.items():
        imgs = image_map[key]
        if dict(key).get(a, 0) == 0:
            steps[imgs[0]] = list(info["steps"])
        else:
            for i, img in enumerate(imgs):
                steps[img] = [info["steps"][i]] if i < len(info["steps"]) else []

    arcs = set()
    graph = instance.seller.graph
    orig_arcs = [
        (tuple(sorted(counts_of_mask(t).items())), tuple(sorted(counts_of_mask(h).items()))) for t, h in graph.arcs
    ]
    for tail_names, head_names in repeated_arcs:
        orig_arcs.append(
            (tuple(sorted(counts_of_names(tail_names).items())), tuple(sorted(counts_of_names(head_names).items())))
        )
    for tail, head in orig_arcs:
        if tail not in image_map or head not in image_map:
            raise DomainError("arc endpoint is not a known package")
        for t in image_map[tail]:
            for h in image_map[head]:
                if t != h and h & ~t == 0:
                    arcs.add((t, h))
    new_n = len(names)
    for j in range(new_n):
        if (1 << j) not in steps:
            steps[1 << j] = []
    new_graph = make_cfg(new_n, steps.keys(), arcs)

    buyers = []
    for li, buyer in enumerate(instance.buyers):
        agents = []
        for q in range(buyer.num_agents):
            table = {}
            for mask, value in buyer.agents[q]:
                for img in image_map[tuple(sorted(counts_of_mask(mask).items()))]:
                    table[img] = value
            for key, info in originals.items():
                if info["values"] is not None and (li, q) in info["values"]:
                    for img in image_map[key]:
                        table[img] = info["values"][(li, q)]
            agents.append(table)
        buyers.append(BuyerValuation(agents, buyer.name))

    return MarketInstance(
        Supply(tuple(names), tuple(units)),
        IncrementalCfg(new_graph, IncrementalCostSchedule(steps)),
        tuple(buyers),
    )


def label_images(instance: MarketInstance, variety: str | int) -> dict[int, tuple[int, ...]]:
    """Images of each original package under :func:`relabel_identical`, as new masks."""
    supply = instance.supply
    a = supply.index(variety) if isinstance(variety, str) else variety
    m = supply.units[a]
    others = [j for j in range(supply.n) if j != a]
    new_index = {j: i for i, j in enumerate(others)}
    out = {}
    for mask in instance.packages:
        rest = 0
        for j in package_members(mask):
            if j != a:
                rest |= 1 << new_index[j]
        if mask >> a & 1:
            out[mask] = tuple(rest | 1 << (len(others) + i) for i in range(m))
        else:
            out[mask] = (rest,)
    return out


def collapse_prices(instance: MarketInstance, variety: str | int, prices: Mapping[int, object]) -> dict[int, object]:
    """Price of each original package as the cheapest of its images."""
    return {mask: min(prices[img] for img in imgs) for mask, imgs in label_images(instance, variety).items()}
