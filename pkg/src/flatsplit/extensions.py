"""Splittable-market extensions: coalition values, core emptiness, and the
effect of adding an apartment on the optimal objective."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from flatsplit.lp import LpBuilder
from flatsplit.matching import hungarian_max_value
from flatsplit.model import Instance, MoneyLike, money
from flatsplit.solvers import Objective, NefOptimum, optimize_nef

COALITION_CAP = 6


@dataclass(frozen=True)
class ApartmentType:
    """One apartment type with unlimited copies.  Values may be negative
    here (a room can be a burden), unlike in the core model."""

    rent: Fraction
    room_values: tuple[tuple[Fraction, ...], ...]  # room_values[i][k]

    @staticmethod
    def build(rent: MoneyLike, room_values: Sequence[Sequence[MoneyLike]]) -> "ApartmentType":
        return ApartmentType(
            rent=money(rent),
            room_values=tuple(tuple(money(v) for v in row) for row in room_values),
        )

    @property
    def size(self) -> int:
        return len(self.room_values[0])


@dataclass(frozen=True)
class TypedApartmentMarket:
    n: int
    types: tuple[ApartmentType, ...]

    @staticmethod
    def build(n: int, types: Sequence[ApartmentType]) -> "TypedApartmentMarket":
        return TypedApartmentMarket(n=n, types=tuple(types))

    def __post_init__(self) -> None:
        for t, typ in enumerate(self.types):
            if typ.size < 1:
                raise ValueError(f"type {t} has no rooms")
            if len(typ.room_values) != self.n:
                raise ValueError(f"type {t} must list values for all {self.n} players")


def _size_multisets(sizes: Sequence[int], total: int):
    """Multisets of type indices whose sizes sum to ``total`` (types may
    repeat: unlimited copies)."""

    def rec(start: int, left: int, acc: list[int]):
        if left == 0:
            yield tuple(acc)
            return
        for t in range(start, len(sizes)):
            if sizes[t] <= left:
                acc.append(t)
                yield from rec(t, left - sizes[t], acc)
                acc.pop()

    yield from rec(0, total, [])


def coalition_value(market: TypedApartmentMarket, coalition: Sequence[int]) -> Fraction:
    """Best total utility the coalition can reach renting apartments on its
    own: maximize assigned values minus the rents of the chosen apartments,
    over all multisets of types housing exactly the coalition."""
    players = sorted(set(coalition))
    if len(players) > COALITION_CAP:
        raise ValueError(f"coalition larger than brute-force cap {COALITION_CAP}")
    if not players:
        return Fraction(0)
    sizes = [t.size for t in market.types]
    best: Optional[Fraction] = None
    for multiset in _size_multisets(sizes, len(players)):
        rent = sum((market.types[t].rent for t in multiset), Fraction(0))
        columns: list[tuple[int, int]] = [
            (t, k) for t in multiset for k in range(market.types[t].size)
        ]
        matrix = [
            [market.types[t].room_values[i][k] for (t, k) in columns]
            for i in players
        ]
        total = hungarian_max_value(matrix) - rent
        if best is None or total > best:
            best = total
    if best is None:
        raise ValueError("no combination of apartment sizes houses this coalition")
    return best


@dataclass(frozen=True)
class CoreResult:
    nonempty: bool
    allocation: Optional[tuple[Fraction, ...]] = None
    # minimal inconsistent system when empty: the grand-coalition equality is
    # implicit; this lists the coalition inequalities it clashes with
    violated_coalitions: Optional[tuple[frozenset[int], ...]] = None
    values: Optional[dict[frozenset[int], Fraction]] = None


def core_check(market: TypedApartmentMarket) -> CoreResult:
    """Decide core nonemptiness by LP feasibility over utility vectors.

    Transferable utility makes any split of an apartment's surplus
    realizable by prices, so the core question reduces to: does a vector alpha
    exist with total exactly v(all players) and coalition sums at least
    v(S)?  When infeasible, a deletion filter extracts a minimal
    inconsistent set of coalition constraints.
    """
    n = market.n
    if n > COALITION_CAP:
        raise ValueError(f"core check capped at {COALITION_CAP} players")
    players = list(range(n))
    table: dict[frozenset[int], Fraction] = {frozenset(): Fraction(0)}
    for size in range(1, n + 1):
        for S in combinations(players, size):
            table[frozenset(S)] = coalition_value(market, S)

    grand = frozenset(players)
    proper = [S for S in table if S and S != grand]
    proper.sort(key=lambda S: (len(S), sorted(S)))

    def feasible(coalitions: Sequence[frozenset[int]]) -> Optional[tuple[Fraction, ...]]:
        b = LpBuilder()
        alpha = [b.var(f"a{i}") for i in range(n)]
        b.eq({alpha[i]: 1 for i in range(n)}, table[grand])
        for S in coalitions:
            b.ge({alpha[i]: 1 for i in S}, table[S])
        out = b.solve()
        if not out.optimal:
            return None
        return tuple(out.point[f"a{i}"] for i in range(n))

    point = feasible(proper)
    if point is not None:
        return CoreResult(nonempty=True, allocation=point, values=table)

    kept = list(proper)
    for S in list(proper):
        trial = [T for T in kept if T != S]
        if feasible(trial) is None:
            kept = trial
    return CoreResult(
        nonempty=False, violated_coalitions=tuple(kept), values=table
    )


@dataclass(frozen=True)
class MonotonicityReport:
    value_before: Fraction
    value_after: Fraction
    direction: str  # "decreased" | "increased" | "unchanged"
    before: NefOptimum
    after: NefOptimum


def extend_instance(
    inst: Instance,
    extra_values: Sequence[Sequence[MoneyLike]],
    extra_rent: MoneyLike,
) -> Instance:
    """Append one apartment column (per-player room values) to an instance."""
    if len(extra_values) != inst.n:
        raise ValueError("extra apartment must list values for every player")
    for row in extra_values:
        if len(row) != inst.n:
            raise ValueError("extra apartment must have exactly n rooms")
    values = [
        list(inst.values[i]) + [tuple(money(v) for v in extra_values[i])]
        for i in range(inst.n)
    ]
    return Instance.build(
        values=values,
        rents=list(inst.rents) + [money(extra_rent)],
        normalized=inst.normalized,
    )


def monotonicity_probe(
    inst: Instance,
    extra_values: Sequence[Sequence[MoneyLike]],
    extra_rent: MoneyLike,
    objectives: Sequence[Objective],
) -> MonotonicityReport:
    """Optimal objective value before and after one more apartment appears.

    The value can move either way: a tempting new apartment can force
    expensive concessions (value drops) or dominate outright (value rises).
    """
    before = optimize_nef(inst, objectives)
    after = optimize_nef(extend_instance(inst, extra_values, extra_rent), objectives)
    if after.value < before.value:
        direction = "decreased"
    elif after.value > before.value:
        direction = "increased"
    else:
        direction = "unchanged"
    return MonotonicityReport(
        value_before=before.value,
        value_after=after.value,
        direction=direction,
        before=before,
        after=after,
    )
