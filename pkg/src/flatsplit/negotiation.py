"""Pairwise rent trades: apply them, reconstruct them, and bound them.

A negotiation moves an amount ``delta`` between two players across two
apartments: player ``i1`` pays ``delta`` more in apartment ``j1`` and less
in ``j2``, player ``i2`` the opposite.  Row sums (apartment rents) and each
player's total rent across all apartments are invariant, which is what
makes the calculus fair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from flatsplit.model import (
    Assignment,
    Instance,
    PartialSolution,
    PriceMatrix,
    utility,
)


class NotReachableError(ValueError):
    """Target prices differ in some player's total rent, so no sequence of
    trades can connect the two matrices."""


@dataclass(frozen=True)
class Negotiation:
    delta: Fraction
    i1: int
    i2: int
    j1: int
    j2: int

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValueError("negotiation amount must be positive")
        if self.i1 == self.i2:
            raise ValueError("a negotiation needs two distinct players")
        if self.j1 == self.j2:
            raise ValueError("a negotiation needs two distinct apartments")


def apply_negotiation(prices: PriceMatrix, asg: Assignment, t: Negotiation) -> PriceMatrix:
    """Price matrix after one trade; only the four touched entries change."""
    n, m = asg.n, asg.m
    for idx, bound in ((t.i1, n), (t.i2, n), (t.j1, m), (t.j2, m)):
        if not 0 <= idx < bound:
            raise IndexError(f"negotiation index {idx} out of range")
    rows = [list(r) for r in prices.rows]
    rows[t.j1][asg.room_of(t.i1, t.j1)] += t.delta
    rows[t.j2][asg.room_of(t.i1, t.j2)] -= t.delta
    rows[t.j1][asg.room_of(t.i2, t.j1)] -= t.delta
    rows[t.j2][asg.room_of(t.i2, t.j2)] += t.delta
    return PriceMatrix(tuple(tuple(r) for r in rows))


def replay(start: PriceMatrix, asg: Assignment, steps: tuple[Negotiation, ...]) -> PriceMatrix:
    cur = start
    for t in steps:
        cur = apply_negotiation(cur, asg, t)
    return cur


@dataclass(frozen=True)
class NegotiationLedger:
    """A trade sequence between two price matrices, tied to the assignment
    the trades were written against.  Construction verifies the replay."""

    assignment: Assignment
    start: PriceMatrix
    steps: tuple[Negotiation, ...]
    end: PriceMatrix

    def __post_init__(self) -> None:
        if replay(self.start, self.assignment, self.steps) != self.end:
            raise ValueError("ledger steps do not replay from start to end")


def reconstruct(asg: Assignment, start: PriceMatrix, target: PriceMatrix) -> NegotiationLedger:
    """A short trade sequence turning ``start`` into ``target``.

    Works apartment by apartment, balancing each one against the last
    apartment: within apartment j, players who still owe more under the
    target trade with players who owe less, greedily pairing the largest
    surplus with the largest deficit.  At most n*m steps, each with a
    positive amount.

    Raises NotReachableError when some player's total rent differs between
    the matrices (no trade changes player totals, so no sequence exists).
    """
    n, m = asg.n, asg.m
    for i in range(n):
        s = sum((start.price(j, asg.room_of(i, j)) for j in range(m)), Fraction(0))
        t = sum((target.price(j, asg.room_of(i, j)) for j in range(m)), Fraction(0))
        if s != t:
            raise NotReachableError(
                f"player {i} total rent differs: {s} -> {t}; not reachable by negotiation"
            )
    for j in range(m):
        if sum(start.rows[j], Fraction(0)) != sum(target.rows[j], Fraction(0)):
            raise NotReachableError(f"apartment {j} rent totals differ between matrices")

    steps: list[Negotiation] = []
    cur = start
    last = m - 1
    for j in range(m - 1):
        while True:
            deficits = [
                (target.price(j, asg.room_of(i, j)) - cur.price(j, asg.room_of(i, j)), i)
                for i in range(n)
            ]
            pos = [(d, i) for d, i in deficits if d > 0]
            neg = [(d, i) for d, i in deficits if d < 0]
            if not pos:
                break
            d_up, i_up = max(pos, key=lambda t: (t[0], -t[1]))
            d_dn, i_dn = min(neg, key=lambda t: (t[0], t[1]))
            delta = min(d_up, -d_dn)
            step = Negotiation(delta=delta, i1=i_up, i2=i_dn, j1=j, j2=last)
            cur = apply_negotiation(cur, asg, step)
            steps.append(step)
    assert cur == target, "balancing must finish at the target matrix"
    return NegotiationLedger(asg, start, tuple(steps), target)


def min_consensus_delta(
    inst: Instance, partial: PartialSolution, i: int, j_star: int
) -> tuple[Fraction, NegotiationLedger]:
    """Minimum total rent decrease in ``j_star`` that makes player ``i``
    weakly prefer it, plus a witness trade sequence achieving it.

    Every trade in the witness lowers player ``i``'s price in ``j_star`` by
    its amount and raises it in one preferred apartment.  The minimum is the
    water-filling level: sort the preference gaps decreasingly and take the
    largest average of a top segment, the segment sharing one extra slot
    with the chosen apartment.  Trading ``gap_j - level`` with each
    apartment whose gap exceeds the level attains it.
    """
    inst.check_player(i)
    inst.check_apartment(j_star)
    asg = partial.assignment
    base = utility(inst, partial, i, j_star)
    gaps = [
        (utility(inst, partial, i, j) - base, j)
        for j in range(inst.m)
        if j != j_star
    ]
    gaps = [(g, j) for g, j in gaps if g > 0]
    if gaps and inst.n < 2:
        raise ValueError("negotiations need a counterparty; single-player prices are fixed")
    if not gaps:
        return Fraction(0), NegotiationLedger(asg, partial.prices, (), partial.prices)
    gaps.sort(key=lambda t: (-t[0], t[1]))
    level = Fraction(0)
    running = Fraction(0)
    for k, (g, _) in enumerate(gaps, start=1):
        running += g
        cand = running / (k + 1)
        if cand > level:
            level = cand
    partner = 0 if i != 0 else 1  # any other player may take the matching side
    steps = []
    cur = partial.prices
    for g, j in gaps:
        amount = g - level
        if amount <= 0:
            continue
        step = Negotiation(delta=amount, i1=i, i2=partner, j1=j, j2=j_star)
        cur = apply_negotiation(cur, asg, step)
        steps.append(step)
    return level, NegotiationLedger(asg, partial.prices, tuple(steps), cur)
