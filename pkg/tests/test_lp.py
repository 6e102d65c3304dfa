import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pakmarket import LinearProgram, build_swlp, catalog, solve_ip, solve_lp
from pakmarket.errors import DomainError
from pakmarket.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LpCertificateError, LpSolution, certify


def test_single_variable():
    sol = solve_lp(LinearProgram.build([1], [[1]], [1]))
    assert sol.status == OPTIMAL
    assert sol.x == (1,) and sol.y == (1,) and sol.value == 1


def test_infeasible():
    assert solve_lp(LinearProgram.build([1], [[1], [-1]], [1, -2])).status == INFEASIBLE


def test_unbounded():
    assert solve_lp(LinearProgram.build([1, 0], [[-1, 1]], [3])).status == UNBOUNDED


def test_equality_rows_get_free_duals():
    # max -x s.t. x = 2: the multiplier on the equality is negative
    sol = solve_lp(LinearProgram.build([-1], [[1]], [2], ["="]))
    assert sol.value == -2 and sol.y == (-1,)


def test_redundant_equalities():
    lp = LinearProgram.build([1, 1], [[1, 1], [2, 2], [1, 0]], [2, 4, 2], ["=", "=", "<="])
    sol = solve_lp(lp)
    assert sol.value == 2
    certify(lp, sol)


def test_floats_and_bad_shapes_are_rejected():
    with pytest.raises(DomainError):
        LinearProgram.build([1.5], [[1]], [1])
    with pytest.raises(DomainError):
        LinearProgram.build([1, 2], [[1]], [1])


def test_exact_fractions():
    sol = solve_lp(LinearProgram.build([1, 1], [[2, 1], [1, 3]], [3, 4]))
    assert sol.x == (Fraction(1), Fraction(1))
    sol = solve_lp(LinearProgram.build([1], [[3]], [1]))
    assert sol.x == (Fraction(1, 3),) and sol.y == (Fraction(1, 3),)


def test_certificate_rejects_wrong_answers():
    lp = LinearProgram.build([1], [[1]], [1])
    with pytest.raises(LpCertificateError):
        certify(lp, LpSolution(OPTIMAL, (Fraction(1),), (Fraction(2),), Fraction(1)))


def test_four_buyers_relaxation():
    enc = build_swlp(catalog.load("four_buyers"))
    assert solve_lp(enc.lp).value == 16
    assert solve_ip(enc.lp).value == 16


def test_three_good_integer_program():
    enc = build_swlp(catalog.load("no_equilibrium"))
    assert solve_ip(enc.lp).value == 24


def test_zero_objective():
    lp = LinearProgram.build([0, 0], [[1, 1]], [1])
    assert solve_ip(lp).value == 0


def random_binary_program(rng):
    nv, nr = rng.randint(1, 6), rng.randint(1, 4)
    c = [rng.randint(-3, 8) for _ in range(nv)]
    rows = [[rng.randint(-1, 4) for _ in range(nv)] for _ in range(nr)]
    rhs = [rng.randint(0, 6) for _ in range(nr)]
    rels = ["<="] * nr
    for j in range(nv):
        rows.append([1 if i == j else 0 for i in range(nv)])
        rhs.append(1)
        rels.append("<=")
    return c, rows, rhs, rels


@pytest.mark.parametrize("seed", range(80))
def test_branch_and_bound_matches_enumeration(seed):
    c, rows, rhs, rels = random_binary_program(random.Random(seed))
    sol = solve_ip(LinearProgram.build(c, rows, rhs, rels))
    expected = oracles.ip_by_enumeration(c, rows, rhs, rels)
    assert sol.value == expected
    assert sol.is_integral()
    relaxed = solve_lp(LinearProgram.build(c, rows, rhs, rels))
    assert relaxed.value >= sol.value
    if relaxed.is_integral():
        assert relaxed.value == sol.value


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda nv: st.tuples(
            st.lists(st.integers(-3, 5), min_size=nv, max_size=nv),
            st.lists(st.lists(st.integers(-2, 4), min_size=nv, max_size=nv), min_size=1, max_size=4),
        )
    ),
    st.lists(st.integers(-2, 8), min_size=4, max_size=4),
)
def test_random_lps_agree_with_vertices(data, rhs):
    c, rows = data
    b = rhs[: len(rows)]
    rels = ["<="] * len(rows)
    status, value = oracles.lp_by_vertices(c, rows, b, rels)
    sol = solve_lp(LinearProgram.build(c, rows, b, rels))
    assert sol.status == status
    if status == OPTIMAL:
        assert sol.value == value
        # dual feasibility by substitution
        for j in range(len(c)):
            assert sum(rows[i][j] * sol.y[i] for i in range(len(rows))) >= c[j]
        # complementary slackness
        for i, row in enumerate(rows):
            slack = b[i] - sum(a * x for a, x in zip(row, sol.x))
            assert slack * sol.y[i] == 0
