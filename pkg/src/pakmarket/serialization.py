"""JSON market documents and certificates.

A market document looks like::

    {
      "schema_version": 1,
      "varieties": [{"name": "A", "units": 2}, {"name": "B", "units": 2}],
      "graph": [["AB", "A"], ["AB", "B"]],
      "seller": {"type": "incremental", "steps": {"A": [1, 2], "B": [1, 2], "AB": [-1, 0]}},
      "buyers": [{"name": "1", "agents": [{"A": 3, "B": 5, "AB": 9}]}]
    }

Packages are written as strings (``"AB"`` when every variety name is a
single character, ``"apple+pear"`` otherwise) or as lists of variety names.
``graph`` is an arc list, ``"complete"`` or ``"star"``; it defaults to
``"star"`` (bundles point at their singletons).  Seller types are
``incremental``, ``additive``, ``set_union`` and ``revenue``.  Numbers must
be integers; rationals in certificates are ``{"num": n, "den": d}``.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .cfg import complete_graph, make_cfg, star_graph
from .errors import DomainError, ValidationError
from .instance import MarketInstance
from .market import PackageMultiset, Supply, all_packages, package_members
from .preferences import (
    AdditiveMarginal,
    BuyerValuation,
    IncrementalCfg,
    IncrementalCostSchedule,
    RevenueMax,
    SetUnion,
)
from .setfunctions import SetFunction

SCHEMA_VERSION = 1


class _FloatSeen:
    def __init__(self, text):
        self.text = text


def _load_json(text: str):
    try:
        return json.loads(text, parse_float=_FloatSeen)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}", clause="json") from None


def _ptr(path, key):
    token = str(key).replace("~", "~0").replace("/", "~1")
    return f"{path}/{token}"


def _fail(path, message, clause="schema"):
    raise ValidationError(message, clause=clause, path=path or "/")


def _int(value, path):
    if isinstance(value, _FloatSeen):
        _fail(path, f"floats are not allowed ({value.text}); use integers", "integer")
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}", "integer")
    return value


def _obj(value, path, required=()):
    if not isinstance(value, dict):
        _fail(path, "expected an object")
    for key in required:
        if key not in value:
            _fail(_ptr(path, key), "missing required field")
    return value


def _list(value, path):
    if not isinstance(value, list):
        _fail(path, "expected an array")
    return value


def package_from_key(key, supply: Supply, path: str) -> int:
    """Parse a package written as a string or a list of variety names."""
    if isinstance(key, list):
        parts = key
    elif isinstance(key, str):
        if "+" in key:
            parts = key.split("+")
        elif key in supply.names:
            parts = [key]
        elif all(len(n) == 1 for n in supply.names):
            parts = list(key)
        else:
            _fail(path, f"cannot read package {key!r}", "package")
    else:
        _fail(path, "a package is a string or a list of variety names", "package")
    mask = 0
    for name in parts:
        if not isinstance(name, str) or name not in supply.names:
            _fail(path, f"unknown variety {name!r}", "package")
        bit = 1 << supply.names.index(name)
        if mask & bit:
            _fail(path, f"variety {name!r} repeated inside a package", "package")
        mask |= bit
    if not mask:
        _fail(path, "the empty package cannot be traded", "package")
    return mask


def _package_table(obj, supply, path):
    table = {}
    for key, value in _obj(obj, path).items():
        mask = package_from_key(key, supply, _ptr(path, key))
        if mask in table:
            _fail(_ptr(path, key), "package listed twice")
        table[mask] = value
    return table


def _set_function(obj, supply, path):
    table = {m: _int(v, _ptr(path, k)) for (m, v), k in zip(_package_table(obj, supply, path).items(), obj)}
    missing = [m for m in all_packages(supply.n) if m not in table]
    if missing:
        _fail(path, "needs a value for every nonempty package, missing " + ", ".join(supply.label(m) for m in missing))
    return SetFunction.from_mapping(supply.n, table)


def parse_market(text_or_doc) -> MarketInstance:
    """Build a :class:`MarketInstance` from a JSON string or an already loaded document.

    Raises :class:`ValidationError` with a JSON pointer in ``path`` and a
    short requirement tag in ``clause``.
    """
    doc = _load_json(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else text_or_doc
    _obj(doc, "", ("schema_version", "varieties", "seller", "buyers"))
    if _int(doc["schema_version"], "/schema_version") != SCHEMA_VERSION:
        _fail("/schema_version", f"unsupported schema version {doc['schema_version']}", "schema-version")

    names, units = [], []
    for i, item in enumerate(_list(doc["varieties"], "/varieties")):
        path = f"/varieties/{i}"
        _obj(item, path, ("name", "units"))
        if not isinstance(item["name"], str) or not item["name"] or "+" in item["name"]:
            _fail(_ptr(path, "name"), "variety names are nonempty strings without '+'")
        names.append(item["name"])
        units.append(_int(item["units"], _ptr(path, "units")))
    try:
        supply = Supply(tuple(names), tuple(units))
    except DomainError as exc:
        _fail("/varieties", str(exc), "varieties")

    packages = None
    if "packages" in doc:
        packages = []
        for i, key in enumerate(_list(doc["packages"], "/packages")):
            packages.append(package_from_key(key, supply, f"/packages/{i}"))
        if len(set(packages)) != len(packages):
            _fail("/packages", "package listed twice")

    seller_doc = _obj(doc["seller"], "/seller", ("type",))
    kind = seller_doc["type"]
    auctioneer = None
    if "auctioneer_costs" in doc:
        raw = _package_table(doc["auctioneer_costs"], supply, "/auctioneer_costs")
        auctioneer = _additive({m: v for m, v in raw.items()}, doc["auctioneer_costs"], "/auctioneer_costs")

    if kind == "incremental":
        _obj(seller_doc, "/seller", ("steps",))
        raw = _package_table(seller_doc["steps"], supply, "/seller/steps")
        steps = {}
        for (mask, seq), key in zip(raw.items(), seller_doc["steps"]):
            path = _ptr("/seller/steps", key)
            steps[mask] = [_int(v, f"{path}/{r}") for r, v in enumerate(_list(seq, path))]
        try:
            schedule = IncrementalCostSchedule(steps, supply.names)
        except ValidationError as exc:
            raise ValidationError(str(exc), clause=exc.clause, path="/seller/steps") from None
        nodes = set(packages) if packages is not None else set(steps)
        graph = _parse_graph(doc.get("graph", "star"), supply, nodes)
        extra = set(steps) - set(graph.nodes)
        if extra:
            _fail("/seller/steps", "cost steps for packages outside the graph: " + ", ".join(supply.label(m) for m in sorted(extra)))
        seller = IncrementalCfg(graph, schedule)
        packages = None
    elif kind == "additive":
        _obj(seller_doc, "/seller", ("costs",))
        raw = _package_table(seller_doc["costs"], supply, "/seller/costs")
        seller = _additive(raw, seller_doc["costs"], "/seller/costs")
    elif kind == "set_union":
        _obj(seller_doc, "/seller", ("costs",))
        seller = SetUnion(_set_function(seller_doc["costs"], supply, "/seller/costs"))
    elif kind == "revenue":
        _obj(seller_doc, "/seller", ("values",))
        seller = RevenueMax(_set_function(seller_doc["values"], supply, "/seller/values"))
    else:
        _fail("/seller/type", f"unknown seller type {kind!r}", "seller-type")

    buyers = []
    for i, item in enumerate(_list(doc["buyers"], "/buyers")):
        path = f"/buyers/{i}"
        _obj(item, path, ("agents",))
        name = item.get("name", str(i + 1))
        if not isinstance(name, str):
            _fail(_ptr(path, "name"), "buyer names are strings")
        agents = []
        agent_list = _list(item["agents"], _ptr(path, "agents"))
        if not agent_list:
            _fail(_ptr(path, "agents"), "a buyer needs at least one agent")
        for q, table in enumerate(agent_list):
            apath = f"{path}/agents/{q}"
            raw = _package_table(table, supply, apath)
            agents.append({m: _int(v, _ptr(apath, k)) for (m, v), k in zip(raw.items(), table)})
        buyers.append(BuyerValuation(agents, name))
    names_seen = [b.name for b in buyers]
    if len(set(names_seen)) != len(names_seen):
        _fail("/buyers", "buyer names must be unique")

    try:
        return MarketInstance(supply, seller, tuple(buyers), tuple(packages or ()), auctioneer)
    except ValidationError as exc:
        raise ValidationError(str(exc), clause=exc.clause, path=exc.path or "/") from None


def _additive(raw, original, path):
    table = {m: _int(v, _ptr(path, k)) for (m, v), k in zip(raw.items(), original)}
    try:
        return AdditiveMarginal(table)
    except ValidationError as exc:
        raise ValidationError(str(exc), clause=exc.clause, path=path) from None


def _parse_graph(spec, supply, nodes):
    if spec == "complete":
        if nodes and set(nodes) != set(all_packages(supply.n)):
            _fail("/graph", "a complete graph needs every nonempty package", "graph")
        return complete_graph(supply.n)
    try:
        if spec == "star":
            return star_graph(supply.n, nodes)
        arcs = []
        node_set = set(nodes) | {1 << j for j in range(supply.n)}
        for i, arc in enumerate(_list(spec, "/graph")):
            path = f"/graph/{i}"
            if not isinstance(arc, list) or len(arc) != 2:
                _fail(path, "an arc is a pair [from, to]", "graph")
            tail = package_from_key(arc[0], supply, f"{path}/0")
            head = package_from_key(arc[1], supply, f"{path}/1")
            node_set |= {tail, head}
            arcs.append((tail, head))
        return make_cfg(supply.n, node_set, arcs)
    except ValidationError as exc:
        if exc.path:
            raise
        raise ValidationError(str(exc), clause=exc.clause, path="/graph") from None


def _package_name(mask, supply):
    return supply.label(mask)


def serialize_market(instance: MarketInstance) -> dict:
    """Inverse of :func:`parse_market` up to arc normalisation."""
    supply = instance.supply
    name = lambda m: _package_name(m, supply)  # noqa: E731
    doc = {
        "schema_version": SCHEMA_VERSION,
        "varieties": [{"name": n, "units": u} for n, u in zip(supply.names, supply.units)],
        "packages": [name(m) for m in instance.packages],
    }
    seller = instance.seller
    if isinstance(seller, IncrementalCfg):
        doc["graph"] = [[name(t), name(h)] for t, h in seller.graph.arcs]
        doc["seller"] = {"type": "incremental", "steps": {name(m): list(seq) for m, seq in seller.schedule.steps}}
    elif isinstance(seller, AdditiveMarginal):
        doc["seller"] = {"type": "additive", "costs": {name(m): c for m, c in seller.costs}}
    elif isinstance(seller, SetUnion):
        doc["seller"] = {"type": "set_union", "costs": {name(m): v for m, v in seller.costs.as_dict().items()}}
    else:
        doc["seller"] = {"type": "revenue", "values": {name(m): v for m, v in seller.values.as_dict().items()}}
    if instance.auctioneer_costs is not None:
        doc["auctioneer_costs"] = {name(m): c for m, c in instance.auctioneer_costs.costs}
    doc["buyers"] = [
        {"name": instance.buyer_name(l), "agents": [{name(m): v for m, v in agent} for agent in b.agents]}
        for l, b in enumerate(instance.buyers)
    ]
    return doc


def dumps_market(instance: MarketInstance) -> str:
    return json.dumps(serialize_market(instance), indent=2)


def encode_number(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"cannot encode {value!r} exactly")
    return value


def decode_number(value, path="/"):
    if isinstance(value, dict):
        _obj(value, path, ("num", "den"))
        den = _int(value["den"], _ptr(path, "den"))
        if den == 0:
            _fail(_ptr(path, "den"), "zero denominator", "rational")
        return Fraction(_int(value["num"], _ptr(path, "num")), den)
    return _int(value, path)


def serialize_prices(instance: MarketInstance, prices) -> dict:
    return {instance.label(m): encode_number(prices[m]) for m in instance.packages}


def parse_prices(instance: MarketInstance, doc, path="/prices") -> dict:
    if isinstance(doc, (str, bytes)):
        doc = _load_json(doc)
    if isinstance(doc, dict) and "prices" in doc and isinstance(doc["prices"], dict):
        doc = doc["prices"]
        path = "/prices"
    table = _package_table(doc, instance.supply, path)
    prices = {m: decode_number(v, _ptr(path, k)) for (m, v), k in zip(table.items(), doc)}
    missing = [instance.label(m) for m in instance.packages if m not in prices]
    if missing:
        _fail(path, "missing prices for " + ", ".join(missing), "prices")
    return prices


def serialize_allocation(instance: MarketInstance, allocation) -> dict:
    return {
        instance.buyer_name(l): [instance.label(m) for m in k.copies()]
        for l, k in enumerate(allocation)
    }


def parse_allocation(instance: MarketInstance, doc, path="/allocation") -> tuple[PackageMultiset, ...]:
    if isinstance(doc, (str, bytes)):
        doc = _load_json(doc)
    if isinstance(doc, dict) and "allocation" in doc and isinstance(doc["allocation"], dict):
        doc = doc["allocation"]
        path = "/allocation"
    _obj(doc, path)
    names = [instance.buyer_name(l) for l in range(len(instance.buyers))]
    out = [PackageMultiset() for _ in names]
    for key, packages in doc.items():
        if key not in names:
            _fail(_ptr(path, key), f"unknown buyer {key!r}", "allocation")
        bpath = _ptr(path, key)
        masks = [package_from_key(p, instance.supply, f"{bpath}/{i}") for i, p in enumerate(_list(packages, bpath))]
        out[names.index(key)] = PackageMultiset.of(*masks)
    return tuple(out)


def serialize_certificate(instance: MarketInstance, certificate) -> dict:
    supply = instance.supply
    doc = {
        "prices": serialize_prices(instance, certificate.prices),
        "allocation": serialize_allocation(instance, certificate.allocation),
        "retained": {n: u for n, u in zip(supply.names, certificate.retained)},
        "welfare": encode_number(certificate.welfare),
    }
    if certificate.agent_duals is not None:
        doc["agent_duals"] = [
            {"buyer": instance.buyer_name(l), "agent": q, "value": encode_number(Fraction(v))}
            for (l, q), v in sorted(certificate.agent_duals.items())
        ]
    if certificate.step_duals is not None:
        doc["step_duals"] = [
            {"package": instance.label(s), "step": r, "value": encode_number(Fraction(v))}
            for (s, r), v in sorted(certificate.step_duals.items())
        ]
    return doc


def package_names(instance: MarketInstance, masks) -> list[str]:
    return [instance.label(m) for m in masks]


def members_by_name(instance: MarketInstance, mask: int) -> list[str]:
    return [instance.supply.names[j] for j in package_members(mask)]
