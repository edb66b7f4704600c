from fractions import Fraction as F

import pytest

from flatsplit.extensions import (
    ApartmentType,
    TypedApartmentMarket,
    coalition_value,
    core_check,
    extend_instance,
    monotonicity_probe,
)
from flatsplit.fixtures import (
    market_three_types,
    trio_base,
    trio_distinct_favorites_column,
    trio_tempting_column,
)
from flatsplit.solvers import maximin_objective


def test_coalition_values_of_the_empty_core_market():
    market = market_three_types()
    assert coalition_value(market, (0, 1, 2)) == 300
    assert coalition_value(market, (0, 1)) == 340
    assert coalition_value(market, (0, 2)) == 340
    assert coalition_value(market, (1, 2)) == 340
    assert coalition_value(market, (0,)) == -1360
    assert coalition_value(market, (1,)) == -280
    assert coalition_value(market, ()) == 0


def test_singleton_with_only_negative_option():
    market = TypedApartmentMarket.build(
        n=1, types=[ApartmentType.build(rent=0, room_values=[[-7]])]
    )
    assert coalition_value(market, (0,)) == -7


def test_coalition_cap():
    market = TypedApartmentMarket.build(
        n=7, types=[ApartmentType.build(rent=0, room_values=[[1]] * 7)]
    )
    with pytest.raises(ValueError):
        coalition_value(market, tuple(range(7)))


def test_core_empty_market_reports_pairwise_system():
    result = core_check(market_three_types())
    assert not result.nonempty
    assert set(result.violated_coalitions) == {
        frozenset({0, 1}),
        frozenset({0, 2}),
        frozenset({1, 2}),
    }


def test_core_nonempty_for_diagonal_market():
    # one 3-room type; each player loves a distinct room, rent covers value
    market = TypedApartmentMarket.build(
        n=3,
        types=[
            ApartmentType.build(
                rent=9, room_values=[[9, 0, 0], [0, 9, 0], [0, 0, 9]]
            ),
            ApartmentType.build(rent=5, room_values=[[0], [0], [0]]),
        ],
    )
    result = core_check(market)
    assert result.nonempty
    alloc = result.allocation
    assert sum(alloc, F(0)) == result.values[frozenset({0, 1, 2})]
    for S, v in result.values.items():
        if S:
            assert sum((alloc[i] for i in S), F(0)) >= v


def test_core_single_player_trivial():
    market = TypedApartmentMarket.build(
        n=1, types=[ApartmentType.build(rent=2, room_values=[[5]])]
    )
    result = core_check(market)
    assert result.nonempty
    assert result.allocation == (F(3),)


def test_monotonicity_probe_both_directions():
    trio = trio_base()
    objs = maximin_objective(3)
    down = monotonicity_probe(trio, trio_tempting_column(), 300, objs)
    assert down.value_before == 50
    assert down.value_after == F(75, 2)
    assert down.direction == "decreased"
    up = monotonicity_probe(trio, trio_distinct_favorites_column(), 300, objs)
    assert up.value_before == 50
    assert up.value_after == 200
    assert up.direction == "increased"


def test_monotonicity_probe_duplicate_apartment_unchanged():
    trio = trio_base()
    duplicate = [list(trio.values[i][0]) for i in range(3)]
    report = monotonicity_probe(trio, duplicate, trio.rents[0], maximin_objective(3))
    assert report.direction == "unchanged"
    assert report.value_before == report.value_after == 50


def test_extend_instance_validation():
    trio = trio_base()
    with pytest.raises(ValueError):
        extend_instance(trio, [[1, 2, 3], [1, 2, 3]], 10)
    with pytest.raises(ValueError):
        extend_instance(trio, [[1, 2], [1, 2], [1, 2]], 10)
