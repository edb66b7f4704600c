"""Core domain types: instances, assignments, price matrices, utilities.

Conventions used throughout the package:

* ``n`` players and ``m`` apartments; every apartment has exactly ``n`` rooms.
* ``values[i][j][k]`` is player ``i``'s value for room ``k`` of apartment ``j``.
* ``rents[j]`` is the total rent of apartment ``j``.
* An assignment maps, per apartment, each player to a room (a bijection).
* All indices are 0-based.  All money amounts are ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Money = Fraction
MoneyLike = Union[Fraction, int, str]


def money(x: MoneyLike) -> Fraction:
    """Parse a money amount exactly.

    Accepts ints, Fractions, decimal strings ("12.5") and ratio strings
    ("1/3").  Binary floats are rejected: they would smuggle rounding into
    an otherwise exact pipeline.
    """
    if isinstance(x, Fraction):
        # normalize components to plain ints (mpq-backed Fractions carry mpz)
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, bool):
        raise TypeError("bool is not a money amount")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot parse money from {type(x).__name__}: {x!r}")


def money_str(x: Fraction) -> str:
    """Render a money amount exactly.

    Amounts with a 10-smooth denominator become plain decimal strings
    ("150", "0.5"); anything else falls back to a ratio string ("1/3") so
    the round trip stays lossless.
    """
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    if x.denominator == 1:
        return str(x.numerator)
    shift = max(twos, fives)
    scaled = x.numerator * 10**shift // x.denominator
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(shift + 1, "0")
    whole, frac = digits[:-shift], digits[-shift:]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def _money_grid(rows: Iterable[Iterable[MoneyLike]]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(money(v) for v in row) for row in rows)


@dataclass(frozen=True)
class Instance:
    """A multi-apartment rent division instance.

    ``normalized`` records whether the instance is supposed to satisfy the
    equal-total-value convention (each player's total value over all rooms
    equals the total rent over all apartments).  It is a validation flag,
    not a hard constraint: randomly sampled instances drop it.
    """

    values: tuple[tuple[tuple[Fraction, ...], ...], ...]
    rents: tuple[Fraction, ...]
    normalized: bool = False

    def __post_init__(self) -> None:
        n = len(self.values)
        m = len(self.rents)
        if n < 1:
            raise ValueError("need at least one player")
        if m < 1:
            raise ValueError("need at least one apartment")
        for i, per_apartment in enumerate(self.values):
            if len(per_apartment) != m:
                raise ValueError(f"player {i}: expected {m} apartments, got {len(per_apartment)}")
            for j, rooms in enumerate(per_apartment):
                if len(rooms) != n:
                    raise ValueError(
                        f"player {i}, apartment {j}: expected {n} rooms, got {len(rooms)}"
                    )

    @staticmethod
    def build(
        values: Sequence[Sequence[Sequence[MoneyLike]]],
        rents: Sequence[MoneyLike],
        normalized: bool = False,
    ) -> "Instance":
        vals = tuple(_money_grid(per_apartment) for per_apartment in values)
        return Instance(vals, tuple(money(r) for r in rents), normalized)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.rents)

    def value(self, i: int, j: int, k: int) -> Fraction:
        return self.values[i][j][k]

    def check_player(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"player index {i} out of range [0, {self.n})")

    def check_apartment(self, j: int) -> None:
        if not 0 <= j < self.m:
            raise IndexError(f"apartment index {j} out of range [0, {self.m})")

    def total_rent(self) -> Fraction:
        return sum(self.rents, Fraction(0))

    def player_total_value(self, i: int) -> Fraction:
        return sum((v for rooms in self.values[i] for v in rooms), Fraction(0))


@dataclass(frozen=True)
class Assignment:
    """Per-apartment bijections from players to rooms: ``perm[j][i]`` is the
    room of player ``i`` in apartment ``j``."""

    perm: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for j, p in enumerate(self.perm):
            if sorted(p) != list(range(len(p))):
                raise ValueError(f"apartment {j}: {p} is not a bijection")

    @staticmethod
    def build(perm: Sequence[Sequence[int]]) -> "Assignment":
        return Assignment(tuple(tuple(p) for p in perm))

    @staticmethod
    def identity(n: int, m: int) -> "Assignment":
        return Assignment(tuple(tuple(range(n)) for _ in range(m)))

    @property
    def m(self) -> int:
        return len(self.perm)

    @property
    def n(self) -> int:
        return len(self.perm[0])

    def room_of(self, i: int, j: int) -> int:
        return self.perm[j][i]


@dataclass(frozen=True)
class PriceMatrix:
    """Room prices: ``rows[j][k]`` is the price of room ``k`` in apartment
    ``j``.  A price matrix is valid for an instance when every row sums to
    that apartment's rent; see :func:`rows_match_rents`."""

    rows: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def build(rows: Sequence[Sequence[MoneyLike]]) -> "PriceMatrix":
        return PriceMatrix(_money_grid(rows))

    @staticmethod
    def constant(value: MoneyLike, n: int, m: int) -> "PriceMatrix":
        v = money(value)
        return PriceMatrix(tuple(tuple(v for _ in range(n)) for _ in range(m)))

    def price(self, j: int, k: int) -> Fraction:
        return self.rows[j][k]

    def with_price(self, j: int, k: int, value: Fraction) -> "PriceMatrix":
        rows = [list(r) for r in self.rows]
        rows[j][k] = value
        return PriceMatrix(tuple(tuple(r) for r in rows))


def rows_match_rents(inst: Instance, prices: PriceMatrix) -> bool:
    return all(
        sum(prices.rows[j], Fraction(0)) == inst.rents[j] for j in range(inst.m)
    )


@dataclass(frozen=True)
class PartialSolution:
    """An assignment plus prices, before an apartment has been chosen."""

    assignment: Assignment
    prices: PriceMatrix


@dataclass(frozen=True)
class Solution:
    """A partial solution plus the chosen apartment index."""

    partial: PartialSolution
    chosen: int

    def __post_init__(self) -> None:
        if not 0 <= self.chosen < self.partial.assignment.m:
            raise ValueError(f"chosen apartment {self.chosen} out of range")

    @property
    def assignment(self) -> Assignment:
        return self.partial.assignment

    @property
    def prices(self) -> PriceMatrix:
        return self.partial.prices


def utility(inst: Instance, partial: PartialSolution, i: int, j: int) -> Fraction:
    """Quasi-linear utility of player ``i`` for their assigned room in
    apartment ``j``: value minus price."""
    inst.check_player(i)
    inst.check_apartment(j)
    k = partial.assignment.room_of(i, j)
    return inst.values[i][j][k] - partial.prices.price(j, k)


def utilities_in(inst: Instance, partial: PartialSolution, j: int) -> tuple[Fraction, ...]:
    return tuple(utility(inst, partial, i, j) for i in range(inst.n))


def welfare(inst: Instance, asg: Assignment, j: int) -> Fraction:
    """Total value of the assigned rooms in apartment ``j`` minus its rent."""
    inst.check_apartment(j)
    total = sum((inst.values[i][j][asg.room_of(i, j)] for i in range(inst.n)), Fraction(0))
    return total - inst.rents[j]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def validate(inst: Instance) -> ValidationReport:
    """Report semantic problems with an instance without raising.

    Checks: negative room values, negative-dimension mismatches already
    rejected at construction, and (only when the flag is set) the
    normalization convention that each player's total value equals the
    total rent.
    """
    violations: list[str] = []
    for i in range(inst.n):
        for j in range(inst.m):
            for k in range(inst.n):
                if inst.values[i][j][k] < 0:
                    violations.append(
                        f"negative value: player {i}, apartment {j}, room {k} "
                        f"= {money_str(inst.values[i][j][k])}"
                    )
    if inst.normalized:
        total = inst.total_rent()
        for i in range(inst.n):
            got = inst.player_total_value(i)
            if got != total:
                violations.append(
                    f"normalization failure: player {i} total value "
                    f"{money_str(got)} != total rent {money_str(total)}"
                )
    return ValidationReport(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class EnvyMatrix:
    """Pairwise envy relative to a chosen apartment.

    ``entries[i][i2][j]`` is the utility player ``i`` would gain by taking
    player ``i2``'s room in apartment ``j`` instead of keeping their own
    room in the chosen apartment.  Positive entries are envy.
    """

    chosen: int
    entries: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def entry(self, i: int, i2: int, j: int) -> Fraction:
        return self.entries[i][i2][j]

    def max_envy(self) -> Fraction:
        return max(v for row in self.entries for col in row for v in col)


def envy_matrix(inst: Instance, sol: Solution) -> EnvyMatrix:
    asg, prices = sol.assignment, sol.prices
    base = [
        inst.values[i][sol.chosen][asg.room_of(i, sol.chosen)]
        - prices.price(sol.chosen, asg.room_of(i, sol.chosen))
        for i in range(inst.n)
    ]
    entries = tuple(
        tuple(
            tuple(
                inst.values[i][j][asg.room_of(i2, j)]
                - prices.price(j, asg.room_of(i2, j))
                - base[i]
                for j in range(inst.m)
            )
            for i2 in range(inst.n)
        )
        for i in range(inst.n)
    )
    return EnvyMatrix(chosen=sol.chosen, entries=entries)
