"""Exact linear and integer programming over the rationals.

Problems have the form::

    maximise    c . x
    subject to  A[i] . x  (<= or =)  b[i]
                x >= 0

Everything is kept as :class:`fractions.Fraction`.  The simplex method runs
in two phases with Bland's rule, so it terminates on degenerate problems.
Duals are reported per original row: nonnegative for ``<=`` rows, free for
``=`` rows.  Every optimal answer is certified (primal and dual
feasibility plus equal objectives) before it is returned.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PakmarketError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _frac(value) -> Fraction:
    if isinstance(value, float):
        raise DomainError("floats are not accepted; use int or Fraction")
    return Fraction(value)


@dataclass(frozen=True)
class LinearProgram:
    c: tuple[Fraction, ...]
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    relations: tuple[str, ...]

    @classmethod
    def build(cls, c: Sequence, A: Sequence[Sequence], b: Sequence, relations: Sequence[str] | None = None):
        c = tuple(_frac(v) for v in c)
        A = tuple(tuple(_frac(v) for v in row) for row in A)
        b = tuple(_frac(v) for v in b)
        relations = tuple(relations) if relations is not None else ("<=",) * len(b)
        if len(A) != len(b) or len(relations) != len(b):
            raise DomainError("A, b and relations must have one entry per row")
        if any(len(row) != len(c) for row in A):
            raise DomainError("every row of A needs one entry per variable")
        if any(rel not in ("<=", "=") for rel in relations):
            raise DomainError("relations must be '<=' or '='")
        return cls(c, A, b, relations)

    @property
    def num_vars(self) -> int:
        return len(self.c)

    @property
    def num_rows(self) -> int:
        return len(self.b)

    def with_rows(self, rows, rhs, relations) -> LinearProgram:
        return LinearProgram(self.c, self.A + tuple(rows), self.b + tuple(rhs), self.relations + tuple(relations))


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: tuple[Fraction, ...] | None = None
    y: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def is_integral(self) -> bool:
        return self.x is not None and all(v.denominator == 1 for v in self.x)


class LpCertificateError(PakmarketError):
    """The solver produced an answer that fails its own optimality certificate."""


def _pivot(T, rhs, row, col, objective_rows):
    piv = T[row][col]
    if piv != 1:
        T[row] = [v / piv for v in T[row]]
        rhs[row] = rhs[row] / piv
    prow = T[row]
    for i in range(len(T)):
        if i != row:
            factor = T[i][col]
            if factor:
                Ti = T[i]
                T[i] = [a - factor * p for a, p in zip(Ti, prow)]
                rhs[i] -= factor * rhs[row]
    for obj in objective_rows:
        factor = obj[0][col]
        if factor:
            obj[0] = [a - factor * p for a, p in zip(obj[0], prow)]
            obj[1] += factor * rhs[row]


def _run_simplex(T, rhs, basis, reduced, allowed):
    """Maximise with reduced costs ``reduced = [row, value]`` using Bland's rule."""
    while True:
        entering = next((j for j in allowed if reduced[0][j] > 0), None)
        if entering is None:
            return OPTIMAL
        best_row, best_ratio = None, None
        for i, row in enumerate(T):
            coef = row[entering]
            if coef > 0:
                ratio = rhs[i] / coef
                if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and basis[i] < basis[best_row]):
                    best_row, best_ratio = i, ratio
        if best_row is None:
            return UNBOUNDED
        _pivot(T, rhs, best_row, entering, [reduced])
        basis[best_row] = entering


def _reduced_row(T, rhs, basis, cost):
    row = list(cost)
    value = Fraction(0)
    for i, bvar in enumerate(basis):
        cb = cost[bvar]
        if cb:
            row = [r - cb * t for r, t in zip(row, T[i])]
            value += cb * rhs[i]
    return [row, value]


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly, returning status, primal, per-row duals and value."""
    m, n = lp.num_rows, lp.num_vars
    signs, rels, A, b = [], [], [], []
    for row, rhs, rel in zip(lp.A, lp.b, lp.relations):
        if rhs < 0:
            signs.append(-1)
            A.append([-v for v in row])
            b.append(-rhs)
            rels.append(">=" if rel == "<=" else "=")
        else:
            signs.append(1)
            A.append(list(row))
            b.append(rhs)
            rels.append(rel)

    extra_cols = sum(1 if rel == "<=" else 2 if rel == ">=" else 1 for rel in rels)
    width = n + extra_cols
    T = [row + [Fraction(0)] * extra_cols for row in A]
    rhs = list(b)
    identity_col = [0] * m
    artificial = set()
    col = n
    for i, rel in enumerate(rels):
        if rel == "<=":
            T[i][col] = Fraction(1)
            identity_col[i] = col
            col += 1
        elif rel == ">=":
            T[i][col] = Fraction(-1)
            T[i][col + 1] = Fraction(1)
            identity_col[i] = col + 1
            artificial.add(col + 1)
            col += 2
        else:
            T[i][col] = Fraction(1)
            identity_col[i] = col
            artificial.add(col)
            col += 1
    basis = list(identity_col)
    all_cols = list(range(width))

    if artificial:
        phase1_cost = [Fraction(-1) if j in artificial else Fraction(0) for j in range(width)]
        reduced = _reduced_row(T, rhs, basis, phase1_cost)
        _run_simplex(T, rhs, basis, reduced, all_cols)
        if reduced[1] != 0:
            return LpSolution(INFEASIBLE)
        i = 0
        while i < len(T):
            if basis[i] in artificial:
                col = next((j for j in all_cols if j not in artificial and T[i][j] != 0), None)
                if col is None:
                    del T[i], rhs[i], basis[i]
                    continue
                _pivot(T, rhs, i, col, [])
                basis[i] = col
            i += 1

    cost = [Fraction(v) for v in lp.c] + [Fraction(0)] * extra_cols
    reduced = _reduced_row(T, rhs, basis, cost)
    allowed = [j for j in all_cols if j not in artificial]
    status = _run_simplex(T, rhs, basis, reduced, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    x = [Fraction(0)] * width
    for i, bvar in enumerate(basis):
        x[bvar] = rhs[i]
    x = tuple(x[:n])
    y = []
    for i in range(m):
        col = identity_col[i]
        y_i = sum((cost[basis[r]] * T[r][col] for r in range(len(T))), Fraction(0))
        y.append(signs[i] * y_i)
    solution = LpSolution(OPTIMAL, x, tuple(y), reduced[1])
    certify(lp, solution)
    return solution


def certify(lp: LinearProgram, sol: LpSolution) -> None:
    """Raise :class:`LpCertificateError` unless ``sol`` is a primal-dual optimal pair."""
    x, y = sol.x, sol.y
    if any(v < 0 for v in x):
        raise LpCertificateError("negative primal variable")
    for row, rhs, rel in zip(lp.A, lp.b, lp.relations):
        lhs = sum(a * v for a, v in zip(row, x))
        if (rel == "<=" and lhs > rhs) or (rel == "=" and lhs != rhs):
            raise LpCertificateError("primal row violated")
    for yi, rel in zip(y, lp.relations):
        if rel == "<=" and yi < 0:
            raise LpCertificateError("negative dual on an inequality row")
    for j in range(lp.num_vars):
        if sum(lp.A[i][j] * y[i] for i in range(lp.num_rows)) < lp.c[j]:
            raise LpCertificateError(f"dual constraint {j} violated")
    primal = sum(c * v for c, v in zip(lp.c, x))
    dual = sum(bi * yi for bi, yi in zip(lp.b, y))
    if primal != dual or primal != sol.value:
        raise LpCertificateError("primal and dual objectives differ")


def solve_ip(lp: LinearProgram, integer_vars: Sequence[int] | None = None) -> LpSolution:
    """Branch and bound on top of :func:`solve_lp`.

    Branches on the lowest-index fractional variable, exploring the
    round-down branch first; among equal optima the first one found is kept.
    The returned solution has no duals.
    """
    ints = set(range(lp.num_vars) if integer_vars is None else integer_vars)
    root = solve_lp(lp)
    if root.status != OPTIMAL:
        return LpSolution(root.status)
    best: LpSolution | None = None
    stack = [((), root)]
    while stack:
        cuts, sol = stack.pop()
        if sol is None:
            sub = lp.with_rows(*cuts) if cuts else lp
            sol = solve_lp(sub)
        if sol.status == UNBOUNDED:
            return LpSolution(UNBOUNDED)
        if sol.status != OPTIMAL or (best is not None and sol.value <= best.value):
            continue
        frac = next((j for j in sorted(ints) if sol.x[j].denominator != 1), None)
        if frac is None:
            best = LpSolution(OPTIMAL, sol.x, None, sol.value)
            continue
        v = sol.x[frac]
        unit = [Fraction(0)] * lp.num_vars
        unit[frac] = Fraction(1)
        neg = [-u for u in unit]
        rows, rhs, rels = (cuts or ((), (), ()))
        up = (rows + (tuple(neg),), rhs + (Fraction(-math.ceil(v)),), rels + ("<=",))
        down = (rows + (tuple(unit),), rhs + (Fraction(math.floor(v)),), rels + ("<=",))
        stack.append((up, None))
        stack.append((down, None))
    if best is None:
        return LpSolution(INFEASIBLE)
    return best
