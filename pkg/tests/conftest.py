"""Shared helpers: canonical fixtures and random instance generation."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flatsplit.fixtures import dominant_two, mirrored_two, trio_base, trio_both
from flatsplit.model import Instance, PriceMatrix


@pytest.fixture
def e_mirrored() -> Instance:
    return mirrored_two()


@pytest.fixture
def e_dominant() -> Instance:
    return dominant_two()


@pytest.fixture
def e_trio() -> Instance:
    return trio_base()


@pytest.fixture
def e_trio_both() -> Instance:
    return trio_both()


def composition(rnd: random.Random, total: int, parts: int) -> list[int]:
    """Nonnegative integers summing to ``total`` (uniform cut points)."""
    if parts == 1:
        return [total]
    cuts = sorted(rnd.randint(0, total) for _ in range(parts - 1))
    out = []
    prev = 0
    for c in cuts:
        out.append(c - prev)
        prev = c
    out.append(total - prev)
    return out


def random_instance(
    rnd: random.Random,
    n: int | None = None,
    m: int | None = None,
    normalized: bool = False,
    max_value: int = 20,
) -> Instance:
    n = n if n is not None else rnd.randint(1, 4)
    m = m if m is not None else rnd.randint(1, 4)
    if normalized:
        total = rnd.randint(max(m, n), 12 * m)
        rents = composition(rnd, total, m)
        values = [
            [
                row
                for row in _chunks(composition(rnd, total, n * m), n)
            ]
            for _ in range(n)
        ]
        return Instance.build(values=values, rents=rents, normalized=True)
    values = [
        [[rnd.randint(0, max_value) for _ in range(n)] for _ in range(m)]
        for _ in range(n)
    ]
    rents = [rnd.randint(0, 3 * max_value) for _ in range(m)]
    return Instance.build(values=values, rents=rents, normalized=False)


def _chunks(seq: list[int], size: int) -> list[list[int]]:
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def random_price_matrix(rnd: random.Random, inst: Instance) -> PriceMatrix:
    """Valid prices (rows sum to rents) with random integer spread."""
    rows = []
    for j in range(inst.m):
        spread = [Fraction(rnd.randint(-15, 15)) for _ in range(inst.n)]
        correction = (inst.rents[j] - sum(spread, Fraction(0))) / inst.n
        rows.append(tuple(s + correction for s in spread))
    return PriceMatrix(tuple(rows))
