"""Per-apartment price constructions shared by checkers and solvers."""

from __future__ import annotations

from fractions import Fraction

from flatsplit.lp import LpBuilder
from flatsplit.model import Assignment, Instance, PriceMatrix, welfare


def add_ef_rows(b: LpBuilder, inst: Instance, asg: Assignment, j: int, price_vars) -> None:
    """Envy-freeness of apartment ``j`` under ``asg``:
    V_i(own) - p(own) >= V_i(other) - p(other) for every ordered pair."""
    for i in range(inst.n):
        own = asg.room_of(i, j)
        for i2 in range(inst.n):
            if i2 == i:
                continue
            other = asg.room_of(i2, j)
            b.ge(
                {price_vars[other]: 1, price_vars[own]: -1},
                inst.values[i][j][other] - inst.values[i][j][own],
            )


def maximin_ef_prices(inst: Instance, asg: Assignment, j: int) -> PriceMatrix | None:
    """Envy-free prices for apartment ``j`` maximizing the minimum utility.

    Returns None when no envy-free prices exist under ``asg`` (i.e. the
    assignment is not welfare-maximizing in ``j``).  Deterministic: a fixed
    LP with Bland pivoting.
    """
    n = inst.n
    b = LpBuilder()
    p = [b.var(f"p{k}") for k in range(n)]
    t = b.var("t")
    b.eq({p[k]: 1 for k in range(n)}, inst.rents[j])
    add_ef_rows(b, inst, asg, j, p)
    for i in range(n):
        own = asg.room_of(i, j)
        b.le({t: 1, p[own]: 1}, inst.values[i][j][own])
    b.maximize({t: 1})
    out = b.solve()
    if not out.optimal:
        return None
    row = tuple(out.point[p[k]] for k in range(n))
    return PriceMatrix((row,))


def maximin_ef_profile(inst: Instance, asg: Assignment) -> PriceMatrix | None:
    """Per-apartment maximin envy-free prices for every apartment at once."""
    rows: list[tuple[Fraction, ...]] = []
    for j in range(inst.m):
        one = maximin_ef_prices(inst, asg, j)
        if one is None:
            return None
        rows.append(one.rows[0])
    return PriceMatrix(tuple(rows))


def equal_utility_prices(inst: Instance, asg: Assignment, j: int) -> tuple[Fraction, ...]:
    """Prices giving every player the same utility in apartment ``j``.

    Charging each player their value minus an equal share of the welfare
    makes all utilities welfare/n; the row sums to the rent by construction.
    """
    share = welfare(inst, asg, j) / inst.n
    row: list[Fraction] = [Fraction(0)] * inst.n
    for i in range(inst.n):
        k = asg.room_of(i, j)
        row[k] = inst.values[i][j][k] - share
    return tuple(row)
