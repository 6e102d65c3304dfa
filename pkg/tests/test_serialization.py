import copy
import json
from fractions import Fraction

import pytest

from pakmarket import PackageMultiset, catalog, solve_welfare, total_cost, verify_equilibrium
from pakmarket.errors import ValidationError
from pakmarket.serialization import (
    decode_number,
    dumps_market,
    encode_number,
    parse_allocation,
    parse_market,
    parse_prices,
    serialize_certificate,
    serialize_market,
)

A, B, AB = 1, 2, 3


def two_goods_doc():
    return json.loads(catalog.text("two_goods"))


@pytest.mark.parametrize("name", catalog.names())
def test_round_trip(name):
    inst = catalog.load(name)
    again = parse_market(dumps_market(inst))
    assert serialize_market(again) == serialize_market(inst)


def test_two_goods_cost():
    inst = catalog.load("two_goods")
    assert total_cost(inst.seller, PackageMultiset({AB: 2})) == 5


def test_float_rejected():
    text = catalog.text("two_goods").replace('"AB": 9}, {', '"AB": 9.0}, {')
    with pytest.raises(ValidationError) as err:
        parse_market(text)
    assert err.value.clause == "integer"
    assert err.value.path == "/buyers/0/agents/0/AB"


def test_decreasing_steps_rejected():
    doc = two_goods_doc()
    doc["seller"]["steps"]["AB"] = [0, -1]
    with pytest.raises(ValidationError) as err:
        parse_market(doc)
    assert err.value.clause == "increasing-incremental-cost"
    assert err.value.path == "/seller/steps"


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.pop("buyers"), "/buyers"),
        (lambda d: d.__setitem__("schema_version", 2), "/schema_version"),
        (lambda d: d["varieties"][0].__setitem__("units", "2"), "/varieties/0/units"),
        (lambda d: d["buyers"][0]["agents"][0].__setitem__("Z", 1), "/buyers/0/agents/0/Z"),
        (lambda d: d["seller"].__setitem__("type", "magic"), "/seller/type"),
        (lambda d: d.__setitem__("graph", [["AB"]]), "/graph/0"),
        (lambda d: d["buyers"].append(copy.deepcopy(d["buyers"][0])), "/buyers"),
    ],
)
def test_errors_point_at_the_field(mutate, path):
    doc = two_goods_doc()
    mutate(doc)
    with pytest.raises(ValidationError) as err:
        parse_market(doc)
    assert err.value.path == path


def test_invalid_json():
    with pytest.raises(ValidationError) as err:
        parse_market("{not json")
    assert err.value.clause == "json"


def test_graph_shorthands():
    doc = two_goods_doc()
    doc["graph"] = "complete"
    assert parse_market(doc).seller.graph.arcs == ((AB, A), (AB, B))
    del doc["graph"]
    assert parse_market(doc).seller.graph.arcs == ((AB, A), (AB, B))


def test_package_spellings():
    doc = {
        "schema_version": 1,
        "varieties": [{"name": "apple", "units": 1}, {"name": "pear", "units": 1}],
        "seller": {"type": "additive", "costs": {"apple": 1, "pear": 1, "apple+pear": 2}},
        "buyers": [{"agents": [{"apple": 2, "pear": 2, "apple+pear": 5}]}],
    }
    inst = parse_market(doc)
    assert inst.label(AB) == "apple+pear"
    doc["seller"]["costs"] = {"apple": 1, "pear": 1, "apple+kiwi": 2}
    with pytest.raises(ValidationError):
        parse_market(doc)
    doc["seller"]["costs"] = {"apple": 1, "pear": 1}
    doc["buyers"][0]["agents"][0] = {"apple": 2}
    assert parse_market(doc).buyers[0].name == "1"


def test_numbers():
    assert encode_number(Fraction(3, 2)) == {"num": 3, "den": 2}
    assert encode_number(Fraction(4, 2)) == 2
    assert decode_number({"num": 3, "den": 2}) == Fraction(3, 2)
    with pytest.raises(ValidationError):
        decode_number({"num": 1, "den": 0})


def test_certificate_reverifies():
    inst = catalog.load("four_buyers")
    cert = serialize_certificate(inst, solve_welfare(inst).certificate)
    text = json.dumps(cert)
    prices = parse_prices(inst, text)
    allocation = parse_allocation(inst, text)
    assert verify_equilibrium(inst, prices, allocation).ok
    assert cert["welfare"] == 16


def test_incomplete_prices_rejected():
    inst = catalog.load("four_buyers")
    with pytest.raises(ValidationError) as err:
        parse_prices(inst, {"A": 4, "B": 5})
    assert err.value.clause == "prices"
    with pytest.raises(ValidationError):
        parse_allocation(inst, {"nobody": ["A"]})
