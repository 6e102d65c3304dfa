"""Bundled market documents used by the demos and tests.

========================  ====================================================
name                      contents
========================  ====================================================
``two_goods``             one buyer with two agents, two units each of A and B
``four_buyers``           four unit-demand buyers, same seller; equilibrium
``no_equilibrium``        three goods, three buyers, zero costs; no equilibrium
``reserve_auction``       six bidders, revenue seller with reservation values
``additive_auction``      same bidders, additive seller
``extended_auction``      revenue seller plus an auctioneer with own costs
``three_goods_tables``    revenue seller table on three goods, no buyers
``single_buyer``          one good, cost 1, one buyer valuing it at 5
========================  ====================================================
"""
from __future__ import annotations

from importlib import resources

from .instance import MarketInstance
from .serialization import parse_market


def names() -> list[str]:
    files = resources.files(__package__).joinpath("instances")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def text(name: str) -> str:
    return resources.files(__package__).joinpath("instances", f"{name}.json").read_text()


def path(name: str) -> str:
    return str(resources.files(__package__).joinpath("instances", f"{name}.json"))


def load(name: str) -> MarketInstance:
    return parse_market(text(name))
